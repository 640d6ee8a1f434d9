#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "e7forge/elim.hpp"
#include "e7forge/parallel.hpp"

namespace e7forge {

/// Sparse accumulator for repeated bracket evaluations.
template <class K>
class Spa {
 public:
  explicit Spa(int dim) : vals_(static_cast<std::size_t>(dim), K(0)), used_(static_cast<std::size_t>(dim), 0) {}

  void add(int i, const K& v) {
    if (v.is_zero()) return;
    if (!used_[static_cast<std::size_t>(i)]) {
      used_[static_cast<std::size_t>(i)] = 1;
      touched_.push_back(i);
      vals_[static_cast<std::size_t>(i)] = v;
    } else {
      vals_[static_cast<std::size_t>(i)] = vals_[static_cast<std::size_t>(i)] + v;
    }
  }

  bool is_zero() const {
    for (int i : touched_)
      if (!vals_[static_cast<std::size_t>(i)].is_zero()) return false;
    return true;
  }

  SparseVec<K> take() {
    SparseVec<K> r;
    std::sort(touched_.begin(), touched_.end());
    for (int i : touched_) {
      if (!vals_[static_cast<std::size_t>(i)].is_zero()) r.push_back({i, vals_[static_cast<std::size_t>(i)]});
      vals_[static_cast<std::size_t>(i)] = K(0);
      used_[static_cast<std::size_t>(i)] = 0;
    }
    touched_.clear();
    return r;
  }

  void reset() {
    for (int i : touched_) {
      vals_[static_cast<std::size_t>(i)] = K(0);
      used_[static_cast<std::size_t>(i)] = 0;
    }
    touched_.clear();
  }

 private:
  std::vector<K> vals_;
  std::vector<char> used_;
  std::vector<int> touched_;
};

/// Finite-dimensional algebra over K given by a sparse structure-constant
/// tensor on a named basis: [b_i, b_j] = sum_k c_{ij}^k b_k. Antisymmetry is
/// enforced by construction; the Jacobi identity is a property to be checked,
/// never an assumption.
template <class K>
struct SCAlgebra {
  int dim = 0;
  std::vector<std::string> names;
  std::vector<SparseVec<K>> upper;  // c[i][j] for i < j at index i*dim + j

  SCAlgebra() = default;
  explicit SCAlgebra(int d, std::vector<std::string> basis_names = {})
      : dim(d), names(std::move(basis_names)), upper(static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
    if (names.empty())
      for (int i = 0; i < d; ++i) names.push_back("b" + std::to_string(i));
  }

  void set_bracket(int i, int j, SparseVec<K> v) {
    if (i == j) {
      if (!v.empty()) throw Error("[b_i, b_i] must vanish");
      return;
    }
    if (i < j)
      upper[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)] = std::move(v);
    else
      upper[static_cast<std::size_t>(j) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i)] = sv_neg(std::move(v));
  }

  const SparseVec<K>& upper_bracket(int i, int j) const {
    return upper[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
  }

  SparseVec<K> bracket_basis(int i, int j) const {
    if (i == j) return {};
    if (i < j) return upper_bracket(i, j);
    return sv_neg(upper_bracket(j, i));
  }

  /// acc += coeff * [b_i, b_j]
  void accumulate_basis_bracket(Spa<K>& acc, int i, int j, const K& coeff) const {
    if (i == j) return;
    const auto& row = i < j ? upper_bracket(i, j) : upper_bracket(j, i);
    if (i < j) {
      for (const auto& [k, v] : row) acc.add(k, coeff * v);
    } else {
      for (const auto& [k, v] : row) acc.add(k, -(coeff * v));
    }
  }

  SparseVec<K> bracket(const SparseVec<K>& x, const SparseVec<K>& y) const {
    Spa<K> acc(dim);
    for (const auto& [i, xi] : x)
      for (const auto& [j, yj] : y) accumulate_basis_bracket(acc, i, j, xi * yj);
    return acc.take();
  }

  SparseMat<K> ad_basis(int i) const {
    SparseMat<K> m(dim, dim);
    for (int j = 0; j < dim; ++j) {
      for (const auto& [k, v] : bracket_basis(i, j)) m.row[static_cast<std::size_t>(k)].push_back({j, v});
    }
    for (auto& r : m.row)
      std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return m;
  }

  SparseMat<K> ad(const SparseVec<K>& x) const {
    SparseMat<K> m(dim, dim);
    Spa<K> acc(dim);
    for (int j = 0; j < dim; ++j) {
      for (const auto& [i, xi] : x) accumulate_basis_bracket(acc, i, j, xi);
      for (const auto& [k, v] : acc.take()) m.row[static_cast<std::size_t>(k)].push_back({j, v});
    }
    for (auto& r : m.row)
      std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return m;
  }

  std::size_t tensor_nnz() const {
    std::size_t n = 0;
    for (const auto& v : upper) n += v.size();
    return n;
  }
};

// --- Jacobi ---

template <class K>
struct JacobiWitness {
  int i, j, k;
  SparseVec<K> residual;
};

template <class K>
struct JacobiReport {
  bool pass = false;
  std::size_t triples_checked = 0;
  std::optional<JacobiWitness<K>> witness;  // lexicographically first failure
};

/// Exact Jacobi check. Full mode sweeps all C(dim,3) basis triples; sampled
/// mode exists for development only and draws seeded random triples.
template <class K>
inline JacobiReport<K> jacobi_check_full(const SCAlgebra<K>& L) {
  JacobiReport<K> rep;
  const int n = L.dim;
  std::vector<std::optional<JacobiWitness<K>>> chunk_witness;
  std::vector<std::size_t> chunk_count;
  unsigned workers = worker_count();
  chunk_witness.resize(workers);
  chunk_count.assign(workers, 0);

  unsigned used = workers == 0 ? 1 : workers;
  std::vector<std::thread> threads;
  auto work = [&](unsigned w) {
    Spa<K> outer(n);
    for (int i = static_cast<int>(w); i < n; i += static_cast<int>(used)) {
      if (chunk_witness[w]) break;
      for (int j = i + 1; j < n && !chunk_witness[w]; ++j) {
        for (int k = j + 1; k < n; ++k) {
          // [[i,j],k] + [[j,k],i] + [[k,i],j]
          for (const auto& [s, v] : L.upper_bracket(i, j)) L.accumulate_basis_bracket(outer, s, k, v);
          for (const auto& [s, v] : L.upper_bracket(j, k)) L.accumulate_basis_bracket(outer, s, i, v);
          for (const auto& [s, v] : L.bracket_basis(k, i)) L.accumulate_basis_bracket(outer, s, j, v);
          ++chunk_count[w];
          if (!outer.is_zero()) {
            chunk_witness[w] = JacobiWitness<K>{i, j, k, outer.take()};
            break;
          }
          outer.reset();
        }
      }
    }
  };
  if (used <= 1) {
    work(0);
  } else {
    for (unsigned w = 0; w < used; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (unsigned w = 0; w < used; ++w) {
    rep.triples_checked += chunk_count[w];
    if (chunk_witness[w]) {
      if (!rep.witness || std::tie(chunk_witness[w]->i, chunk_witness[w]->j, chunk_witness[w]->k) <
                              std::tie(rep.witness->i, rep.witness->j, rep.witness->k))
        rep.witness = chunk_witness[w];
    }
  }
  rep.pass = !rep.witness.has_value();
  return rep;
}

template <class K>
inline JacobiReport<K> jacobi_check_sampled(const SCAlgebra<K>& L, std::size_t samples,
                                            std::uint64_t seed) {
  JacobiReport<K> rep;
  Rng rng(seed);
  Spa<K> outer(L.dim);
  for (std::size_t t = 0; t < samples; ++t) {
    int i = static_cast<int>(rng.next() % static_cast<std::uint64_t>(L.dim));
    int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(L.dim));
    int k = static_cast<int>(rng.next() % static_cast<std::uint64_t>(L.dim));
    for (const auto& [s, v] : L.bracket_basis(i, j)) L.accumulate_basis_bracket(outer, s, k, v);
    for (const auto& [s, v] : L.bracket_basis(j, k)) L.accumulate_basis_bracket(outer, s, i, v);
    for (const auto& [s, v] : L.bracket_basis(k, i)) L.accumulate_basis_bracket(outer, s, j, v);
    ++rep.triples_checked;
    if (!outer.is_zero()) {
      rep.witness = JacobiWitness<K>{i, j, k, outer.take()};
      rep.pass = false;
      return rep;
    }
    outer.reset();
  }
  rep.pass = true;
  return rep;
}

// --- Killing form ---

template <class K>
struct KillingResult {
  std::vector<std::vector<K>> matrix;  // dense dim x dim
  bool nondegenerate = false;
  std::uint64_t certificate_prime = 0;  // prime certifying full rank, when rational
};

template <class K>
inline std::vector<std::vector<K>> killing_matrix(const SCAlgebra<K>& L) {
  const int n = L.dim;
  std::vector<SparseMat<K>> ads;
  ads.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ads.push_back(L.ad_basis(i));
  std::vector<std::vector<K>> km(static_cast<std::size_t>(n), std::vector<K>(static_cast<std::size_t>(n), K(0)));
  parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = i; j < static_cast<std::size_t>(n); ++j) {
        K acc(0);
        for (int r = 0; r < n; ++r)
          for (const auto& [c, v] : ads[i].row[static_cast<std::size_t>(r)]) {
            K w = sv_get(ads[j].row[static_cast<std::size_t>(c)], r);
            if (!w.is_zero()) acc = acc + v * w;
          }
        km[i][j] = acc;
        km[j][i] = std::move(acc);
      }
    }
  });
  return km;
}

inline bool killing_nondegenerate(const std::vector<std::vector<Rational>>& km,
                                  std::uint64_t* prime_used = nullptr,
                                  const std::vector<std::uint64_t>& pool = default_prime_pool()) {
  SparseMat<Rational> m(static_cast<int>(km.size()), static_cast<int>(km.size()));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (!km[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero())
        m.row[static_cast<std::size_t>(i)].push_back({j, km[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
  std::uint64_t p = 0;
  int r = rank_mod_pool(m, pool, &p);
  if (prime_used) *prime_used = p;
  if (r == m.rows) return true;  // full rank mod p certifies full rational rank
  // modular rank only bounds below; settle deficiency exactly
  return rank_exact(m) == m.rows;
}

template <class K>
inline KillingResult<K> killing(const SCAlgebra<K>& L) {
  KillingResult<K> res;
  res.matrix = killing_matrix(L);
  if constexpr (std::is_same_v<K, Rational>) {
    res.nondegenerate = killing_nondegenerate(res.matrix, &res.certificate_prime);
  } else {
    // rational-valued entries reduce to the rational certificate
    std::vector<std::vector<Rational>> km(res.matrix.size());
    bool all_rational = true;
    for (std::size_t i = 0; i < res.matrix.size() && all_rational; ++i)
      for (const auto& v : res.matrix[i]) {
        if constexpr (std::is_same_v<K, QuadExt>) {
          if (!v.is_rational()) {
            all_rational = false;
            break;
          }
          km[i].push_back(v.rational_part());
        } else {
          all_rational = false;
          break;
        }
      }
    if (all_rational) {
      res.nondegenerate = killing_nondegenerate(km, &res.certificate_prime);
    } else {
      SparseMat<K> m(L.dim, L.dim);
      for (int i = 0; i < L.dim; ++i)
        for (int j = 0; j < L.dim; ++j)
          if (!res.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero())
            m.row[static_cast<std::size_t>(i)].push_back({j, res.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
      res.nondegenerate = rank_exact(m) == L.dim;
    }
  }
  return res;
}

/// Reinterpret rational structure constants over the quadratic extension
/// Q(sqrt(d)); constants, Jacobi status and Killing rank are preserved.
inline SCAlgebra<QuadExt> base_change(const SCAlgebra<Rational>& L, long long d) {
  (void)d;  // the extension parameter lives in the values produced later
  SCAlgebra<QuadExt> r(L.dim, L.names);
  for (std::size_t idx = 0; idx < L.upper.size(); ++idx) {
    SparseVec<QuadExt> v;
    v.reserve(L.upper[idx].size());
    for (const auto& [k, val] : L.upper[idx]) v.push_back({k, QuadExt(val)});
    r.upper[idx] = std::move(v);
  }
  return r;
}

// --- eigenspaces and roots ---

template <class K>
struct Eigenspace {
  Rational eigenvalue;
  std::vector<SparseVec<K>> basis;
};

namespace detail {

template <class K>
inline std::vector<Rational> eigenvalue_candidates(const std::vector<Rational>& expected) {
  std::vector<Rational> c = expected;
  for (int v = -4; v <= 4; ++v) c.push_back(Rational(v));
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

}  // namespace detail

/// Exact eigenspace decomposition of ad(h); requires the action to be
/// semisimple with eigenvalues in the candidate list (small integers plus the
/// caller's expectations), certified by the dimensions filling the space.
template <class K>
inline std::vector<Eigenspace<K>> ad_eigendecomposition(const SCAlgebra<K>& L, const SparseVec<K>& h,
                                                        const std::vector<Rational>& expected = {}) {
  SparseMat<K> A = L.ad(h);
  std::vector<Eigenspace<K>> out;
  int total = 0;
  for (const Rational& lambda : detail::eigenvalue_candidates<K>(expected)) {
    SparseMat<K> shifted = A;
    if (!lambda.is_zero())
      for (int i = 0; i < L.dim; ++i)
        sv_set(shifted.row[static_cast<std::size_t>(i)], i, A.at(i, i) - K(lambda));
    auto ker = kernel_basis(shifted);
    if (!ker.empty()) {
      total += static_cast<int>(ker.size());
      out.push_back(Eigenspace<K>{lambda, std::move(ker)});
    }
  }
  if (total != L.dim)
    throw NotSemisimpleOverField("eigenspaces fill only " + std::to_string(total) + " of " +
                                 std::to_string(L.dim) + " dimensions");
  return out;
}

template <class K>
struct RootDatum {
  std::vector<SparseVec<K>> cartan;                 // the supplied commuting elements
  std::vector<std::vector<Rational>> roots;         // nonzero weight tuples
  std::vector<std::vector<SparseVec<K>>> root_spaces;  // aligned with roots
  std::vector<std::vector<Rational>> gram_inverse;  // inverse Killing matrix on the cartan

  /// Killing-induced pairing of two weight vectors.
  Rational pairing(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    const std::size_t r = gram_inverse.size();
    Rational acc(0);
    for (std::size_t i = 0; i < r; ++i) {
      Rational row(0);
      for (std::size_t j = 0; j < r; ++j) row += gram_inverse[i][j] * b[j];
      acc += a[i] * row;
    }
    return acc;
  }
};

namespace detail {

inline std::vector<std::vector<Rational>> dense_inverse(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t sel = c;
    while (sel < n && a[sel][c].is_zero()) ++sel;
    if (sel == n) throw DegenerateOnS("matrix not invertible");
    std::swap(a[sel], a[c]);
    std::swap(inv[sel], inv[c]);
    Rational pivot_inv = a[c][c].inverse();
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] *= pivot_inv;
      inv[c][j] *= pivot_inv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      Rational f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

}  // namespace detail

template <class K>
struct WeightSpace {
  std::vector<Rational> weight;
  std::vector<SparseVec<K>> basis;
};

/// Simultaneous eigenspace refinement of a subspace under the adjoint action
/// of a commuting family; weights are certified rational integers from the
/// candidate list.
template <class K>
inline std::vector<WeightSpace<K>> simultaneous_weights(const SCAlgebra<K>& L,
                                                        const std::vector<SparseVec<K>>& space,
                                                        const std::vector<SparseVec<K>>& cartan) {
  using Piece = WeightSpace<K>;
  std::vector<Piece> pieces{Piece{{}, space}};
  for (const auto& h : cartan) {
    SparseMat<K> A = L.ad(h);
    std::vector<Piece> next;
    for (auto& piece : pieces) {
      // work in the echelon basis of the piece (same span, canonical rows)
      Echelon<K> ech(L.dim);
      for (const auto& v : piece.basis) ech.add_row(v);
      piece.basis.assign(ech.rows().begin(), ech.rows().end());
      const int m = static_cast<int>(piece.basis.size());
      std::vector<SparseVec<K>> images;
      images.reserve(static_cast<std::size_t>(m));
      for (const auto& v : piece.basis) {
        SparseVec<K> w = sm_apply(A, v);
        std::vector<std::pair<int, K>> coords;
        ech.reduce_tracked(w, coords);
        if (!w.empty())
          throw NotCartan("ad does not preserve a joint eigenspace (non-commuting family?)");
        SparseVec<K> cv;
        for (auto& [row, val] : coords) cv.push_back({row, val});
        std::sort(cv.begin(), cv.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        images.push_back(std::move(cv));
      }
      // small algebra on the restricted coordinates: reuse eigen machinery
      SparseMat<K> restricted(m, m);
      for (int c = 0; c < m; ++c)
        for (const auto& [r, v] : images[static_cast<std::size_t>(c)])
          restricted.row[static_cast<std::size_t>(r)].push_back({c, v});
      for (auto& rr : restricted.row)
        std::sort(rr.begin(), rr.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      int found = 0;
      for (const Rational& lambda : detail::eigenvalue_candidates<K>({})) {
        SparseMat<K> shifted = restricted;
        if (!lambda.is_zero())
          for (int i = 0; i < m; ++i)
            sv_set(shifted.row[static_cast<std::size_t>(i)], i, restricted.at(i, i) - K(lambda));
        auto ker = kernel_basis(shifted);
        if (ker.empty()) continue;
        found += static_cast<int>(ker.size());
        Piece np;
        np.weight = piece.weight;
        np.weight.push_back(lambda);
        for (const auto& kv : ker) {
          // lift restricted coordinates back to ambient vectors
          SparseVec<K> lifted;
          for (const auto& [ci, cv] : kv) lifted = sv_axpy(lifted, cv, piece.basis[static_cast<std::size_t>(ci)]);
          np.basis.push_back(std::move(lifted));
        }
        next.push_back(std::move(np));
      }
      if (found != m)
        throw NotSemisimpleOverField("restricted ad is not split semisimple over the field");
    }
    pieces = std::move(next);
  }
  return pieces;
}

/// Simultaneous eigenspace decomposition for a supplied commuting family.
/// The zero-weight space must equal the span of the family (this certifies it
/// is a Cartan subalgebra); nonzero weight spaces must be one-dimensional.
template <class K>
inline RootDatum<K> roots(const SCAlgebra<K>& L, const std::vector<SparseVec<K>>& cartan) {
  for (std::size_t i = 0; i < cartan.size(); ++i)
    for (std::size_t j = i + 1; j < cartan.size(); ++j)
      if (!L.bracket(cartan[i], cartan[j]).empty())
        throw NotCartan("supplied elements do not commute");

  std::vector<SparseVec<K>> whole;
  for (int i = 0; i < L.dim; ++i) whole.push_back(sv_unit(i, K(1)));
  auto pieces = simultaneous_weights(L, whole, cartan);

  RootDatum<K> datum;
  datum.cartan = cartan;
  // the zero-weight space must be exactly the span of the supplied family;
  // this is diagnosed before any multiplicity defect of nonzero weights
  std::vector<const std::vector<SparseVec<K>>*> zero_pieces;
  for (const auto& piece : pieces) {
    bool zero = true;
    for (const auto& w : piece.weight) zero &= w.is_zero();
    if (zero) zero_pieces.push_back(&piece.basis);
  }
  Echelon<K> zspan(L.dim);
  for (const auto* zb : zero_pieces)
    for (const auto& v : *zb) zspan.add_row(v);
  Echelon<K> cspan(L.dim);
  for (const auto& h : cartan) cspan.add_row(h);
  if (zspan.rank() != static_cast<int>(cartan.size()) || cspan.rank() != static_cast<int>(cartan.size()))
    throw NotCartan("zero-weight space has dimension " + std::to_string(zspan.rank()) +
                    ", expected " + std::to_string(cartan.size()));
  for (const auto& h : cartan)
    if (!zspan.in_row_space(h)) throw NotCartan("cartan element escapes the zero-weight space");

  for (auto& piece : pieces) {
    bool zero = true;
    for (const auto& w : piece.weight) zero &= w.is_zero();
    if (zero) continue;
    if (piece.basis.size() != 1)
      throw NotSplit("a nonzero weight space has dimension " + std::to_string(piece.basis.size()));
    datum.roots.push_back(piece.weight);
    datum.root_spaces.push_back(std::move(piece.basis));
  }

  // Killing form restricted to the cartan, inverted for weight pairings
  std::vector<std::vector<Rational>> cgram(cartan.size(), std::vector<Rational>(cartan.size()));
  for (std::size_t i = 0; i < cartan.size(); ++i) {
    SparseMat<K> adi = L.ad(cartan[i]);
    for (std::size_t j = i; j < cartan.size(); ++j) {
      SparseMat<K> adj = L.ad(cartan[j]);
      K acc(0);
      for (int r = 0; r < L.dim; ++r)
        for (const auto& [c, v] : adi.row[static_cast<std::size_t>(r)]) {
          K w = sv_get(adj.row[static_cast<std::size_t>(c)], r);
          if (!w.is_zero()) acc = acc + v * w;
        }
      Rational val = expect_rational(acc, "Killing value on the cartan");
      cgram[i][j] = val;
      cgram[j][i] = val;
    }
  }
  datum.gram_inverse = detail::dense_inverse(std::move(cgram));
  return datum;
}

// --- Dynkin type identification ---

namespace detail {

/// Simply-laced Cartan matrices with the standard (Bourbaki) numbering.
inline std::vector<std::vector<int>> bourbaki_cartan(const std::string& type) {
  auto chain_edges = [](int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i) e.push_back({i, i + 1});
    return e;
  };
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  if (type.size() < 2) throw Unrecognized("bad type label " + type);
  char family = type[0];
  n = std::stoi(type.substr(1));
  if (family == 'A') {
    edges = chain_edges(n);
  } else if (family == 'D') {
    if (n < 3) throw Unrecognized("D_n needs n >= 3");
    edges = chain_edges(n - 1);
    edges.push_back({n - 2, n});
  } else if (family == 'E') {
    if (n < 6 || n > 8) throw Unrecognized("E_n needs n in 6..8");
    // Bourbaki: chain 1-3-4-5-6(-7)(-8), with 2 attached to 4
    std::vector<int> chain{1, 3, 4, 5, 6};
    if (n >= 7) chain.push_back(7);
    if (n == 8) chain.push_back(8);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) edges.push_back({chain[i], chain[i + 1]});
    edges.push_back({2, 4});
  } else {
    throw Unrecognized("unsupported family " + type);
  }
  std::vector<std::vector<int>> cm(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) cm[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 2;
  for (auto [a, b] : edges) {
    cm[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] = -1;
    cm[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(a - 1)] = -1;
  }
  return cm;
}

inline bool cartan_permutation_equivalent(const std::vector<std::vector<int>>& a,
                                          const std::vector<std::vector<int>>& b) {
  const std::size_t n = a.size();
  if (b.size() != n) return false;
  std::vector<int> perm(n, -1);
  std::vector<char> used(n, 0);
  // backtracking on simultaneous row/column permutations
  std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
    if (i == n) return true;
    for (std::size_t t = 0; t < n; ++t) {
      if (used[t]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        if (a[i][j] != b[t][static_cast<std::size_t>(perm[j])]) ok = false;
        if (ok && a[j][i] != b[static_cast<std::size_t>(perm[j])][t]) ok = false;
      }
      if (!ok) continue;
      perm[i] = static_cast<int>(t);
      used[t] = 1;
      if (place(i + 1)) return true;
      used[t] = 0;
      perm[i] = -1;
    }
    return false;
  };
  return place(0);
}

}  // namespace detail

template <class K>
struct TypeIdentification {
  std::string label;
  int rank = 0;
  int root_count = 0;
  std::vector<std::vector<Rational>> simple_roots;
  std::vector<std::vector<int>> cartan_matrix;
  std::uint64_t functional_seed = 0;
  int retries = 0;
};

/// Identify the Dynkin type of a split semisimple root datum: pick a generic
/// rational functional (retrying on ties), take indecomposable positive roots
/// as simple, build the Cartan matrix from Killing pairings, and match it
/// against the standard tables up to simultaneous permutation.
template <class K>
inline TypeIdentification<K> identify_type(const RootDatum<K>& datum, std::uint64_t seed = 20240801) {
  TypeIdentification<K> id;
  id.functional_seed = seed;
  const std::size_t r = datum.gram_inverse.size();
  Rng rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    // lexicographic base weights with small random perturbation
    std::vector<Rational> w(r);
    Rational base(1);
    for (std::size_t i = r; i-- > 0;) {
      w[i] = base * Rational(rng.range(900, 1100));
      base = base * Rational(1 << 11);
    }
    auto value = [&](const std::vector<Rational>& root) {
      Rational acc(0);
      for (std::size_t i = 0; i < r; ++i) acc += w[i] * root[i];
      return acc;
    };
    bool tie = false;
    std::set<std::vector<Rational>> positive;
    for (const auto& root : datum.roots) {
      Rational v = value(root);
      if (v.is_zero()) {
        tie = true;
        break;
      }
      if (v.sign() > 0) positive.insert(root);
    }
    if (tie || positive.size() * 2 != datum.roots.size()) {
      ++id.retries;
      continue;
    }
    // simple = indecomposable positives
    std::vector<std::vector<Rational>> simple;
    for (const auto& alpha : positive) {
      bool decomposable = false;
      for (const auto& beta : positive) {
        if (beta == alpha) continue;
        std::vector<Rational> diff(r);
        for (std::size_t i = 0; i < r; ++i) diff[i] = alpha[i] - beta[i];
        if (positive.count(diff)) {
          decomposable = true;
          break;
        }
      }
      if (!decomposable) simple.push_back(alpha);
    }
    if (simple.size() != r) {
      ++id.retries;
      continue;
    }
    // Cartan matrix from Killing pairings
    std::vector<std::vector<int>> cm(r, std::vector<int>(r, 0));
    bool integral = true;
    for (std::size_t i = 0; i < r && integral; ++i)
      for (std::size_t j = 0; j < r && integral; ++j) {
        Rational n2 = Rational(2) * datum.pairing(simple[i], simple[j]) /
                      datum.pairing(simple[j], simple[j]);
        if (!n2.is_integer()) {
          integral = false;
          break;
        }
        cm[i][j] = static_cast<int>(n2.num().small_value());
      }
    if (!integral) {
      ++id.retries;
      continue;
    }
    id.simple_roots = simple;
    id.cartan_matrix = cm;
    id.rank = static_cast<int>(r);
    id.root_count = static_cast<int>(datum.roots.size());
    // match against candidate labels of this rank
    std::vector<std::string> candidates;
    candidates.push_back("A" + std::to_string(r));
    if (r >= 3) candidates.push_back("D" + std::to_string(r));
    if (r >= 6 && r <= 8) candidates.push_back("E" + std::to_string(r));
    for (const auto& label : candidates) {
      if (detail::cartan_permutation_equivalent(cm, detail::bourbaki_cartan(label))) {
        id.label = label;
        return id;
      }
    }
    throw Unrecognized("Cartan matrix matches no simply-laced type of rank " + std::to_string(r));
  }
  throw Unrecognized("no generic functional found (persistent ties)");
}

// --- Killing-orthogonal complement and subalgebra extraction ---

/// Killing-orthogonal complement of the span of S. Requires the Killing form
/// restricted to S to be nondegenerate (checked exactly).
template <class K>
inline std::vector<SparseVec<K>> killing_complement(const SCAlgebra<K>& L,
                                                    const std::vector<SparseVec<K>>& S,
                                                    const std::vector<std::vector<K>>* km_cache = nullptr) {
  std::vector<std::vector<K>> km = km_cache ? *km_cache : killing_matrix(L);
  const int n = L.dim;
  // rows of the constraint system: x such that K(x, s) = 0 for all s in S
  SparseMat<K> constraints(static_cast<int>(S.size()), n);
  for (std::size_t si = 0; si < S.size(); ++si) {
    std::vector<std::pair<int, K>> terms;
    for (int c = 0; c < n; ++c) {
      K acc(0);
      for (const auto& [i, v] : S[si]) acc = acc + v * km[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      if (!acc.is_zero()) terms.push_back({c, acc});
    }
    constraints.row[si] = sv_collect(std::move(terms));
  }
  // nondegeneracy of K on S: the |S| x |S| matrix of pairings has full rank
  SparseMat<K> gram(static_cast<int>(S.size()), static_cast<int>(S.size()));
  for (std::size_t si = 0; si < S.size(); ++si) {
    std::vector<std::pair<int, K>> terms;
    for (std::size_t sj = 0; sj < S.size(); ++sj) {
      K acc(0);
      for (const auto& [i, v] : S[si]) {
        K w(0);
        for (const auto& [jj, u] : S[sj]) w = w + u * km[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)];
        acc = acc + v * w;
      }
      if (!acc.is_zero()) terms.push_back({static_cast<int>(sj), acc});
    }
    gram.row[si] = sv_collect(std::move(terms));
  }
  if (rank_exact(gram) != static_cast<int>(S.size()))
    throw DegenerateOnS("Killing form degenerates on the given subspace");
  return kernel_basis(constraints);
}

/// Restrict L to the span of the given basis vectors. Throws unless the span
/// is closed under the bracket; names are generated from the indices.
template <class K>
inline SCAlgebra<K> subalgebra(const SCAlgebra<K>& L, const std::vector<SparseVec<K>>& basis,
                               std::vector<std::string> names = {}) {
  const int m = static_cast<int>(basis.size());
  CoordSpan<K> span(L.dim);
  for (const auto& v : basis) span.add_basis(v);
  SCAlgebra<K> sub(m, std::move(names));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      SparseVec<K> br = L.bracket(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
      if (br.empty()) continue;
      if (!span.contains(br)) throw Error("subspace is not closed under the bracket");
      sub.set_bracket(i, j, span.coords(br));
    }
  return sub;
}

// --- golden-file serialization ---

inline nlohmann::json scalgebra_to_json(const SCAlgebra<Rational>& L) {
  nlohmann::json j;
  j["dim"] = L.dim;
  j["names"] = L.names;
  nlohmann::json entries = nlohmann::json::array();
  for (int i = 0; i < L.dim; ++i)
    for (int jj = i + 1; jj < L.dim; ++jj)
      for (const auto& [k, v] : L.upper_bracket(i, jj))
        entries.push_back({i, jj, k, v.to_string()});
  j["c"] = entries;
  return j;
}

inline SCAlgebra<Rational> scalgebra_from_json(const nlohmann::json& j) {
  if (!j.contains("dim") || !j.contains("c")) throw IoError("structure-constant file: missing fields");
  int dim = j.at("dim").get<int>();
  std::vector<std::string> names;
  if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
  SCAlgebra<Rational> L(dim, names);
  std::map<std::tuple<int, int, int>, Rational> seen;
  for (const auto& e : j.at("c")) {
    if (!e.is_array() || e.size() != 4) throw IoError("structure-constant entry must be [i,j,k,value]");
    int i = e[0].get<int>(), jj = e[1].get<int>(), k = e[2].get<int>();
    Rational v = Rational::from_string(e[3].get<std::string>());
    if (i < 0 || i >= dim || jj < 0 || jj >= dim || k < 0 || k >= dim)
      throw IoError("structure-constant entry out of range");
    if (i == jj && !v.is_zero())
      throw IoError("antisymmetry violated: nonzero c[" + std::to_string(i) + "][" + std::to_string(i) + "]");
    auto key = i < jj ? std::make_tuple(i, jj, k) : std::make_tuple(jj, i, k);
    Rational canon = i < jj ? v : -v;
    auto it = seen.find(key);
    if (it != seen.end()) {
      if (!(it->second == canon))
        throw IoError("antisymmetry violated at entry (" + std::to_string(i) + "," + std::to_string(jj) +
                      "," + std::to_string(k) + ")");
    } else {
      seen.emplace(key, canon);
    }
  }
  std::map<std::pair<int, int>, SparseVec<Rational>> rowsets;
  for (const auto& [key, v] : seen) {
    auto [i, jj, k] = key;
    rowsets[{i, jj}].push_back({k, v});
  }
  for (auto& [ij, vec] : rowsets) {
    std::sort(vec.begin(), vec.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    L.set_bracket(ij.first, ij.second, std::move(vec));
  }
  return L;
}

}  // namespace e7forge
