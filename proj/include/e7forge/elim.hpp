#pragma once

#include <optional>

#include "e7forge/sparse.hpp"

namespace e7forge {

/// Incremental exact row-echelon engine over a field K.
///
/// Rows are kept pivot-normalized (leading coefficient 1, strictly increasing
/// pivot columns are NOT required across rows; a col->row map provides the
/// reduction order). Kernel vectors and row-space coordinates are canonical
/// given the insertion order, which every caller keeps deterministic.
template <class K>
class Echelon {
 public:
  explicit Echelon(int cols) : cols_(cols), col_pivot_(static_cast<std::size_t>(cols), -1) {}

  int cols() const { return cols_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  const std::vector<SparseVec<K>>& rows() const { return rows_; }
  const std::vector<int>& pivots() const { return pivot_cols_; }

  /// Reduce r against the current rows in place.
  void reduce(SparseVec<K>& r) const {
    std::size_t i = 0;
    while (i < r.size()) {
      int c = r[i].first;
      int prow = col_pivot_[static_cast<std::size_t>(c)];
      if (prow < 0) {
        ++i;
        continue;
      }
      K coeff = -r[i].second;
      r = sv_axpy(r, coeff, rows_[static_cast<std::size_t>(prow)]);
      // entries before position i are untouched (their columns have no pivot)
    }
  }

  /// Reduce r and record the coefficient taken from each pivot row.
  void reduce_tracked(SparseVec<K>& r, std::vector<std::pair<int, K>>& used) const {
    std::size_t i = 0;
    while (i < r.size()) {
      int c = r[i].first;
      int prow = col_pivot_[static_cast<std::size_t>(c)];
      if (prow < 0) {
        ++i;
        continue;
      }
      K coeff = r[i].second;
      used.push_back({prow, coeff});
      r = sv_axpy(r, -coeff, rows_[static_cast<std::size_t>(prow)]);
    }
  }

  /// Insert a row; returns true if it enlarged the row space.
  bool add_row(SparseVec<K> r) { return add_row_tracked(std::move(r), nullptr, nullptr); }

  /// Insert a row, optionally recording the pivot-row coefficients consumed
  /// by the reduction and the leading coefficient before normalization.
  bool add_row_tracked(SparseVec<K> r, std::vector<std::pair<int, K>>* used, K* lead_out) {
    if (used)
      reduce_tracked(r, *used);
    else
      reduce(r);
    if (r.empty()) return false;
    K lead = r.front().second;
    if (lead_out) *lead_out = lead;
    if (!lead.is_one()) {
      K inv = K(1) / lead;
      sv_scale(r, inv);
    }
    int pcol = r.front().first;
    col_pivot_[static_cast<std::size_t>(pcol)] = static_cast<int>(rows_.size());
    pivot_cols_.push_back(pcol);
    rows_.push_back(std::move(r));
    return true;
  }

  bool in_row_space(SparseVec<K> r) const {
    reduce(r);
    return r.empty();
  }

  /// Canonical basis of the null space of the stacked rows (as a matrix with
  /// `cols` columns): one vector per free column f, with x_f = 1.
  std::vector<SparseVec<K>> kernel_basis() const {
    std::vector<SparseVec<K>> basis;
    // process pivot rows in decreasing pivot-column order for back substitution
    std::vector<int> order(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pivot_cols_[static_cast<std::size_t>(a)] > pivot_cols_[static_cast<std::size_t>(b)]; });
    for (int f = 0; f < cols_; ++f) {
      if (col_pivot_[static_cast<std::size_t>(f)] >= 0) continue;
      SparseVec<K> x = sv_unit(f, K(1));
      for (int ri : order) {
        const auto& row = rows_[static_cast<std::size_t>(ri)];
        int p = pivot_cols_[static_cast<std::size_t>(ri)];
        if (p > f) continue;  // row involves only columns > ... skip impossible pivots
        // dot of row (excluding pivot) with current x
        K acc(0);
        std::size_t i = 0, j = 0;
        while (i < row.size() && j < x.size()) {
          if (row[i].first < x[j].first)
            ++i;
          else if (x[j].first < row[i].first)
            ++j;
          else {
            if (row[i].first != p) acc = acc + row[i].second * x[j].second;
            ++i;
            ++j;
          }
        }
        if (!acc.is_zero()) sv_set(x, p, -acc);
      }
      basis.push_back(std::move(x));
    }
    return basis;
  }

  std::vector<int> free_columns() const {
    std::vector<int> f;
    for (int c = 0; c < cols_; ++c)
      if (col_pivot_[static_cast<std::size_t>(c)] < 0) f.push_back(c);
    return f;
  }

 private:
  int cols_;
  std::vector<SparseVec<K>> rows_;
  std::vector<int> pivot_cols_;
  std::vector<int> col_pivot_;
};

/// A subspace with a remembered basis: vectors are inserted as basis elements
/// and arbitrary members can be re-expressed in that basis exactly.
template <class K>
class CoordSpan {
 public:
  explicit CoordSpan(int ambient) : ech_(ambient) {}

  /// Insert v as the next basis element; throws if v is dependent.
  void add_basis(const SparseVec<K>& v) {
    std::vector<std::pair<int, K>> used;
    K lead(1);
    int b = ech_.rank();
    if (!ech_.add_row_tracked(v, &used, &lead)) throw Error("basis vector is linearly dependent");
    SparseVec<K> e = sv_unit(b, K(1));
    for (auto& [row, c] : used) e = sv_axpy(e, -c, expr_[static_cast<std::size_t>(row)]);
    if (!lead.is_one()) sv_scale(e, K(1) / lead);
    expr_.push_back(std::move(e));
  }

  /// Coordinates of v in the inserted basis; throws if v escapes the span.
  SparseVec<K> coords(const SparseVec<K>& v) const {
    SparseVec<K> r = v;
    std::vector<std::pair<int, K>> used;
    ech_.reduce_tracked(r, used);
    if (!r.empty()) throw Error("vector escapes the subspace");
    SparseVec<K> out;
    for (auto& [row, c] : used) out = sv_axpy(out, c, expr_[static_cast<std::size_t>(row)]);
    return out;
  }

  bool contains(const SparseVec<K>& v) const { return ech_.in_row_space(v); }
  int size() const { return ech_.rank(); }

 private:
  Echelon<K> ech_;
  std::vector<SparseVec<K>> expr_;  // echelon row -> combination of inserted basis vectors
};

template <class K>
inline int rank_exact(const SparseMat<K>& m) {
  Echelon<K> e(m.cols);
  for (const auto& r : m.row) e.add_row(r);
  return e.rank();
}

/// Canonical kernel basis of m (viewed as linear map K^cols -> K^rows).
template <class K>
inline std::vector<SparseVec<K>> kernel_basis(const SparseMat<K>& m) {
  Echelon<K> e(m.cols);
  for (const auto& r : m.row) e.add_row(r);
  return e.kernel_basis();
}

/// Scale a rational vector to the canonical primitive integer form:
/// entries coprime integers, first nonzero entry positive.
inline SparseVec<Rational> sv_primitive(SparseVec<Rational> v) {
  if (v.empty()) return v;
  Int lcm(1);
  for (const auto& [i, val] : v) lcm = (lcm / Int::gcd(lcm, val.den())) * val.den();
  Int g(0);
  for (const auto& [i, val] : v) g = Int::gcd(g, val.num() * (lcm / val.den()));
  sv_scale(v, Rational(lcm, g));
  if (v.front().second.sign() < 0) sv_scale(v, Rational(-1));
  return v;
}

// --- prime-field reduction and modular rank ---

inline std::vector<std::uint64_t> default_prime_pool(int count = 8) {
  // first `count` primes above 2^20
  std::vector<std::uint64_t> primes;
  std::uint64_t n = (1ULL << 20) + 1;
  while (static_cast<int>(primes.size()) < count) {
    bool prime = n > 1;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) {
        prime = false;
        break;
      }
    if (prime) primes.push_back(n);
    ++n;
  }
  return primes;
}

inline Fp reduce_mod_p(const Rational& q, std::uint64_t p) {
  if (q.den().mod_u64(p) == 0)
    throw BadPrime("denominator " + q.den().to_string() + " vanishes mod " + std::to_string(p));
  Fp num(q.num().mod_u64(p), p);
  Fp den(q.den().mod_u64(p), p);
  return num / den;
}

/// Rank of a rational matrix over GF(p). Throws BadPrime when p divides any
/// denominator; a full-rank result certifies full rational rank, otherwise it
/// is only a lower bound.
inline int rank_mod_p(const SparseMat<Rational>& m, std::uint64_t p) {
  Echelon<Fp> e(m.cols);
  for (const auto& r : m.row) {
    SparseVec<Fp> fr;
    fr.reserve(r.size());
    for (const auto& [i, val] : r) {
      Fp v = reduce_mod_p(val, p);
      if (!v.is_zero()) fr.push_back({i, v});
    }
    e.add_row(std::move(fr));
  }
  return e.rank();
}

/// Modular rank with automatic retry over the default pool on BadPrime.
inline int rank_mod_pool(const SparseMat<Rational>& m, const std::vector<std::uint64_t>& pool,
                         std::uint64_t* used = nullptr) {
  for (std::uint64_t p : pool) {
    try {
      int r = rank_mod_p(m, p);
      if (used) *used = p;
      return r;
    } catch (const BadPrime&) {
      continue;
    }
  }
  throw BadPrime("every prime in the pool divides some denominator");
}

/// Dense exact Gaussian elimination; the independent oracle used by tests to
/// bound rank_mod_p from above on small matrices.
template <class K>
inline int rank_dense_oracle(std::vector<std::vector<K>> a) {
  int rows = static_cast<int>(a.size());
  if (rows == 0) return 0;
  int cols = static_cast<int>(a[0].size());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int sel = -1;
    for (int r = rank; r < rows; ++r)
      if (!a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].is_zero()) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    std::swap(a[static_cast<std::size_t>(sel)], a[static_cast<std::size_t>(rank)]);
    K inv = K(1) / a[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c)];
    for (int cc = c; cc < cols; ++cc)
      a[static_cast<std::size_t>(rank)][static_cast<std::size_t>(cc)] =
          a[static_cast<std::size_t>(rank)][static_cast<std::size_t>(cc)] * inv;
    for (int r = 0; r < rows; ++r) {
      if (r == rank) continue;
      K f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (f.is_zero()) continue;
      for (int cc = c; cc < cols; ++cc)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] =
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -
            f * a[static_cast<std::size_t>(rank)][static_cast<std::size_t>(cc)];
    }
    ++rank;
  }
  return rank;
}

}  // namespace e7forge
