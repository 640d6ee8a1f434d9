#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "e7forge/fano.hpp"

namespace e7forge {

/// A finite-dimensional space carrying commuting actions of the seven
/// sl1(Q_point) Lie algebras; a point that does not act is marked absent
/// (acts by zero). Generators are always the (i, j, k) basis of sl1.
template <class K>
struct ActionSpace {
  int dim = 0;
  std::array<std::optional<std::array<SparseMat<K>, 3>>, fano::kNumPoints> act;

  const SparseMat<K>* generator(int pt, int g) const {
    const auto& a = act[static_cast<std::size_t>(pt)];
    return a ? &(*a)[static_cast<std::size_t>(g)] : nullptr;
  }
};

/// The 16-dimensional line module V_alpha = Q_x (x) Q_u with the four
/// commuting sl1 actions: the first point of each pair acts by left
/// multiplication, the second by right multiplication by the conjugate.
template <class K>
struct VAlphaModule {
  int line = -1;
  std::array<int, 4> pts{};  // (x, y, u, v) in pairing order
  std::vector<std::string> basis_names;
  ActionSpace<K> space;
};

namespace detail {

template <class K>
std::array<SparseMat<K>, 3> pair_actions_left(const QuatAlgebra<K>& alg) {
  return {qleft_mul_matrix(Quat<K>::basis(alg, 1)), qleft_mul_matrix(Quat<K>::basis(alg, 2)),
          qleft_mul_matrix(Quat<K>::basis(alg, 3))};
}

template <class K>
std::array<SparseMat<K>, 3> pair_actions_right_conj(const QuatAlgebra<K>& alg) {
  return {qright_conj_mul_matrix(Quat<K>::basis(alg, 1)),
          qright_conj_mul_matrix(Quat<K>::basis(alg, 2)),
          qright_conj_mul_matrix(Quat<K>::basis(alg, 3))};
}

}  // namespace detail

/// Build V_alpha for an accepted labeling. Requires the resolved pairing of
/// the line; the two points of each pair must carry literally identical
/// symbols (validated upstream; rechecked here).
template <class K = Rational>
inline VAlphaModule<K> build_valpha(const FanoLabeling& L, const LinePairing& pairing, int line) {
  VAlphaModule<K> m;
  m.line = line;
  m.pts = {pairing[0][0], pairing[0][1], pairing[1][0], pairing[1][1]};
  auto symbol_of = [&](int pt) {
    return std::pair<K, K>(K(L.at(pt).a), K(L.at(pt).b));
  };
  for (int t = 0; t < 2; ++t) {
    auto [a1, b1] = symbol_of(pairing[static_cast<std::size_t>(t)][0]);
    auto [a2, b2] = symbol_of(pairing[static_cast<std::size_t>(t)][1]);
    if (!(a1 == a2 && b1 == b2))
      throw PairingUnavailable("pair on line " + fano::line_name(line) +
                               " joins points with different symbols");
  }

  auto [a1, b1] = symbol_of(pairing[0][0]);
  auto [a2, b2] = symbol_of(pairing[1][0]);
  QuatAlgebra<K> alg1(a1, b1, L.at(pairing[0][0]).declared_split);
  QuatAlgebra<K> alg2(a2, b2, L.at(pairing[1][0]).declared_split);

  static const char* kSyms[4] = {"1", "i", "j", "k"};
  m.space.dim = 16;
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) m.basis_names.push_back(std::string(kSyms[s]) + "*" + kSyms[t]);

  auto id4 = SparseMat<K>::identity(4);
  auto lift_first = [&](std::array<SparseMat<K>, 3> gens) {
    std::array<SparseMat<K>, 3> out{sm_kron(gens[0], id4), sm_kron(gens[1], id4),
                                    sm_kron(gens[2], id4)};
    return out;
  };
  auto lift_second = [&](std::array<SparseMat<K>, 3> gens) {
    std::array<SparseMat<K>, 3> out{sm_kron(id4, gens[0]), sm_kron(id4, gens[1]),
                                    sm_kron(id4, gens[2])};
    return out;
  };

  m.space.act[static_cast<std::size_t>(m.pts[0])] = lift_first(detail::pair_actions_left(alg1));
  m.space.act[static_cast<std::size_t>(m.pts[1])] =
      lift_first(detail::pair_actions_right_conj(alg1));
  m.space.act[static_cast<std::size_t>(m.pts[2])] = lift_second(detail::pair_actions_left(alg2));
  m.space.act[static_cast<std::size_t>(m.pts[3])] =
      lift_second(detail::pair_actions_right_conj(alg2));
  return m;
}

/// sl1(Q_pt) as an action space: its own point acts by the adjoint matrices,
/// every other point acts by zero.
template <class K = Rational>
inline ActionSpace<K> sl1_space(const FanoLabeling& L, int pt) {
  ActionSpace<K> s;
  s.dim = 3;
  QuatAlgebra<K> alg(K(L.at(pt).a), K(L.at(pt).b));
  s.act[static_cast<std::size_t>(pt)] = sl1_ad_matrices(alg);
  return s;
}

/// Tensor product with the Leibniz action g -> g (x) 1 + 1 (x) g.
template <class K>
inline ActionSpace<K> tensor_space(const ActionSpace<K>& a, const ActionSpace<K>& b) {
  ActionSpace<K> s;
  s.dim = a.dim * b.dim;
  auto ida = SparseMat<K>::identity(a.dim);
  auto idb = SparseMat<K>::identity(b.dim);
  for (int p = 0; p < fano::kNumPoints; ++p) {
    const auto& pa = a.act[static_cast<std::size_t>(p)];
    const auto& pb = b.act[static_cast<std::size_t>(p)];
    if (!pa && !pb) continue;
    std::array<SparseMat<K>, 3> gens{SparseMat<K>(s.dim, s.dim), SparseMat<K>(s.dim, s.dim),
                                     SparseMat<K>(s.dim, s.dim)};
    for (int g = 0; g < 3; ++g) {
      SparseMat<K> acc(s.dim, s.dim);
      if (pa) acc = sm_add(acc, sm_kron((*pa)[static_cast<std::size_t>(g)], idb));
      if (pb) acc = sm_add(acc, sm_kron(ida, (*pb)[static_cast<std::size_t>(g)]));
      gens[static_cast<std::size_t>(g)] = std::move(acc);
    }
    s.act[static_cast<std::size_t>(p)] = std::move(gens);
  }
  return s;
}

/// Exterior square with basis e_i ^ e_j, i < j, ordered lexicographically.
template <class K>
inline ActionSpace<K> wedge_space(const ActionSpace<K>& a) {
  ActionSpace<K> s;
  int n = a.dim;
  s.dim = n * (n - 1) / 2;
  std::vector<std::vector<int>> pair_index(static_cast<std::size_t>(n),
                                           std::vector<int>(static_cast<std::size_t>(n), -1));
  {
    int idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pair_index[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = idx++;
  }
  auto wedge_set = [&](SparseMat<K>& m, int i, int j, int col, const K& v) {
    if (i == j || v.is_zero()) return;
    if (i < j)
      m.set(pair_index[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], col,
            m.at(pair_index[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], col) + v);
    else
      m.set(pair_index[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)], col,
            m.at(pair_index[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)], col) - v);
  };
  for (int p = 0; p < fano::kNumPoints; ++p) {
    const auto& pa = a.act[static_cast<std::size_t>(p)];
    if (!pa) continue;
    std::array<SparseMat<K>, 3> gens{SparseMat<K>(s.dim, s.dim), SparseMat<K>(s.dim, s.dim),
                                     SparseMat<K>(s.dim, s.dim)};
    for (int g = 0; g < 3; ++g) {
      const auto& rho = (*pa)[static_cast<std::size_t>(g)];
      auto cols = sm_transpose(rho);  // cols.row[c] = column c of rho
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          int col = pair_index[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          for (const auto& [r, v] : cols.row[static_cast<std::size_t>(i)])
            wedge_set(gens[static_cast<std::size_t>(g)], r, j, col, v);
          for (const auto& [r, v] : cols.row[static_cast<std::size_t>(j)])
            wedge_set(gens[static_cast<std::size_t>(g)], i, r, col, v);
        }
    }
    s.act[static_cast<std::size_t>(p)] = std::move(gens);
  }
  return s;
}

/// Basis of the space of intertwiners M: source -> target, i.e. exact
/// solutions of M rho_s(g) = rho_t(g) M for every sl1 generator at every
/// point. An empty result is a valid outcome.
template <class K>
inline std::vector<SparseMat<K>> equivariant_map_space(const ActionSpace<K>& source,
                                                       const ActionSpace<K>& target) {
  const int ds = source.dim, dt = target.dim;
  Echelon<K> ech(dt * ds);
  for (int p = 0; p < fano::kNumPoints; ++p) {
    for (int g = 0; g < 3; ++g) {
      const SparseMat<K>* S = source.generator(p, g);
      const SparseMat<K>* T = target.generator(p, g);
      if (!S && !T) continue;
      // columns of S for fast access
      SparseMat<K> Scols = S ? sm_transpose(*S) : SparseMat<K>(ds, ds);
      for (int r = 0; r < dt; ++r) {
        for (int c = 0; c < ds; ++c) {
          std::vector<std::pair<int, K>> terms;
          if (S)
            for (const auto& [cp, v] : Scols.row[static_cast<std::size_t>(c)])
              terms.push_back({r * ds + cp, v});
          if (T)
            for (const auto& [rp, v] : T->row[static_cast<std::size_t>(r)])
              terms.push_back({rp * ds + c, -v});
          auto row = sv_collect(std::move(terms));
          if (!row.empty()) ech.add_row(std::move(row));
        }
      }
    }
  }
  std::vector<SparseMat<K>> basis;
  for (auto& v : ech.kernel_basis()) {
    if constexpr (std::is_same_v<K, Rational>) v = sv_primitive(std::move(v));
    basis.push_back(sm_unvec(v, dt, ds));
  }
  return basis;
}

/// Structural checks of a VAlphaModule (exact):
///  - actions of distinct points commute,
///  - each action is a Lie homomorphism from sl1,
///  - the joint action generates the full 256-dimensional endomorphism
///    algebra (rank certified modulo a prime from the default pool).
template <class K>
inline void verify_valpha(const FanoLabeling& L, const VAlphaModule<K>& m) {
  // commuting actions of distinct points
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int g = 0; g < 3; ++g)
        for (int h = 0; h < 3; ++h) {
          const auto* A = m.space.generator(m.pts[static_cast<std::size_t>(a)], g);
          const auto* B = m.space.generator(m.pts[static_cast<std::size_t>(b)], h);
          if (!sm_is_zero(sm_commutator(*A, *B)))
            throw Error("V_alpha actions of distinct points fail to commute");
        }
  // Lie homomorphism per point: [rho(s), rho(t)] = rho([s,t])
  for (int t = 0; t < 4; ++t) {
    int pt = m.pts[static_cast<std::size_t>(t)];
    QuatAlgebra<K> alg(K(L.at(pt).a), K(L.at(pt).b));
    auto ad = sl1_ad_matrices(alg);
    for (int s1 = 0; s1 < 3; ++s1)
      for (int s2 = 0; s2 < 3; ++s2) {
        auto lhs = sm_commutator(*m.space.generator(pt, s1), *m.space.generator(pt, s2));
        SparseMat<K> rhs(16, 16);
        for (int r = 0; r < 3; ++r) {
          K coeff = ad[static_cast<std::size_t>(s1)].at(r, s2);
          if (!coeff.is_zero())
            rhs = sm_add(rhs, sm_scale(*m.space.generator(pt, r), coeff));
        }
        if (!(lhs == rhs)) throw Error("V_alpha point action is not a Lie homomorphism");
      }
  }
  if constexpr (std::is_same_v<K, Rational>) {
    // joint generated algebra = End(V_alpha): the 256 pure-tensor images span
    QuatAlgebra<K> alg1(K(L.at(m.pts[0]).a), K(L.at(m.pts[0]).b));
    QuatAlgebra<K> alg2(K(L.at(m.pts[2]).a), K(L.at(m.pts[2]).b));
    SparseMat<Rational> coeff(256, 256);
    int row = 0;
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q)
        for (int r = 0; r < 4; ++r)
          for (int s = 0; s < 4; ++s) {
            auto mat = sm_kron(qtensor_to_end(Quat<K>::basis(alg1, p), Quat<K>::basis(alg1, q)),
                               qtensor_to_end(Quat<K>::basis(alg2, r), Quat<K>::basis(alg2, s)));
            coeff.row[static_cast<std::size_t>(row++)] = sm_vec(mat);
          }
    if (rank_mod_pool(coeff, default_prime_pool()) != 256)
      throw Error("joint action does not generate End(V_alpha)");
  }
}

}  // namespace e7forge
