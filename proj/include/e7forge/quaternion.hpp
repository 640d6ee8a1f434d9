#pragma once

#include <array>
#include <optional>
#include <string>

#include "e7forge/elim.hpp"
#include "e7forge/sparse.hpp"

namespace e7forge {

/// Quaternion algebra (a,b) over K: basis (1, i, j, k) with i^2 = a, j^2 = b,
/// k = ij = -ji, k^2 = -ab. declared_split marks the canonical split
/// presentation, which requires a = 1 so matrix units exist over the base
/// field with no square-root search.
template <class K>
struct QuatAlgebra {
  K a, b;
  bool declared_split = false;

  QuatAlgebra(K a_, K b_, bool split = false) : a(std::move(a_)), b(std::move(b_)), declared_split(split) {
    if (a.is_zero() || b.is_zero()) throw Error("quaternion symbol entries must be nonzero");
    if (declared_split && !a.is_one())
      throw Error("declared_split requires the canonical presentation a = 1");
  }

  bool same_symbol(const QuatAlgebra& o) const { return a == o.a && b == o.b; }
};

template <class K>
struct Quat {
  std::array<K, 4> c{K(0), K(0), K(0), K(0)};  // coordinates in (1, i, j, k)
  const QuatAlgebra<K>* alg = nullptr;

  Quat() = default;
  Quat(const QuatAlgebra<K>& algebra, std::array<K, 4> coords) : c(std::move(coords)), alg(&algebra) {}

  static Quat basis(const QuatAlgebra<K>& algebra, int idx) {
    Quat q;
    q.alg = &algebra;
    q.c[static_cast<std::size_t>(idx)] = K(1);
    return q;
  }

  static Quat scalar(const QuatAlgebra<K>& algebra, K v) {
    Quat q;
    q.alg = &algebra;
    q.c[0] = std::move(v);
    return q;
  }

  bool is_zero() const {
    for (const auto& v : c)
      if (!v.is_zero()) return false;
    return true;
  }

  friend bool operator==(const Quat& x, const Quat& y) { return x.c == y.c; }
};

namespace detail {
// basis_mul(a, b, r, c) -> (coeff as polynomial in {1, a, b, ab}, index)
// encoded as (which symbol factor, sign, target index)
enum class SymFactor { One, A, B, AB };

struct BasisProduct {
  SymFactor f;
  int sign;
  int idx;
};

// product table for (1, i, j, k); see the defining relations above
inline constexpr BasisProduct kQuatTable[4][4] = {
    {{SymFactor::One, 1, 0}, {SymFactor::One, 1, 1}, {SymFactor::One, 1, 2}, {SymFactor::One, 1, 3}},
    {{SymFactor::One, 1, 1}, {SymFactor::A, 1, 0}, {SymFactor::One, 1, 3}, {SymFactor::A, 1, 2}},
    {{SymFactor::One, 1, 2}, {SymFactor::One, -1, 3}, {SymFactor::B, 1, 0}, {SymFactor::B, -1, 1}},
    {{SymFactor::One, 1, 3}, {SymFactor::A, -1, 2}, {SymFactor::B, 1, 1}, {SymFactor::AB, -1, 0}}};

template <class K>
inline K sym_value(SymFactor f, const QuatAlgebra<K>& alg) {
  switch (f) {
    case SymFactor::One: return K(1);
    case SymFactor::A: return alg.a;
    case SymFactor::B: return alg.b;
    case SymFactor::AB: return alg.a * alg.b;
  }
  return K(0);
}
}  // namespace detail

template <class K>
inline Quat<K> operator+(const Quat<K>& x, const Quat<K>& y) {
  Quat<K> r = x;
  for (int t = 0; t < 4; ++t) r.c[static_cast<std::size_t>(t)] = x.c[static_cast<std::size_t>(t)] + y.c[static_cast<std::size_t>(t)];
  return r;
}

template <class K>
inline Quat<K> operator-(const Quat<K>& x, const Quat<K>& y) {
  Quat<K> r = x;
  for (int t = 0; t < 4; ++t) r.c[static_cast<std::size_t>(t)] = x.c[static_cast<std::size_t>(t)] - y.c[static_cast<std::size_t>(t)];
  return r;
}

template <class K>
inline Quat<K> operator*(const K& s, const Quat<K>& x) {
  Quat<K> r = x;
  for (auto& v : r.c) v = s * v;
  return r;
}

/// Bilinear associative product by the symbol relations.
template <class K>
inline Quat<K> qmul(const Quat<K>& x, const Quat<K>& y) {
  if (x.alg != y.alg && !(x.alg && y.alg && x.alg->same_symbol(*y.alg)))
    throw AlgebraMismatch();
  Quat<K> r;
  r.alg = x.alg;
  for (int s = 0; s < 4; ++s) {
    if (x.c[static_cast<std::size_t>(s)].is_zero()) continue;
    for (int t = 0; t < 4; ++t) {
      if (y.c[static_cast<std::size_t>(t)].is_zero()) continue;
      const auto& bp = detail::kQuatTable[s][t];
      K v = x.c[static_cast<std::size_t>(s)] * y.c[static_cast<std::size_t>(t)] * detail::sym_value<K>(bp.f, *x.alg);
      if (bp.sign < 0) v = -v;
      r.c[static_cast<std::size_t>(bp.idx)] = r.c[static_cast<std::size_t>(bp.idx)] + v;
    }
  }
  return r;
}

/// Canonical involution x -> Trd(x) - x.
template <class K>
inline Quat<K> qconj(const Quat<K>& x) {
  Quat<K> r = x;
  for (int t = 1; t < 4; ++t) r.c[static_cast<std::size_t>(t)] = -x.c[static_cast<std::size_t>(t)];
  return r;
}

template <class K>
inline K qtrd(const Quat<K>& x) {
  return x.c[0] + x.c[0];
}

/// Reduced norm x0^2 - a x1^2 - b x2^2 + ab x3^2.
template <class K>
inline K qnrd(const Quat<K>& x) {
  const K& a = x.alg->a;
  const K& b = x.alg->b;
  return x.c[0] * x.c[0] - a * x.c[1] * x.c[1] - b * x.c[2] * x.c[2] + a * b * x.c[3] * x.c[3];
}

/// (conjugate, reduced trace, reduced norm) in one call.
template <class K>
inline std::tuple<Quat<K>, K, K> qconj_trd_nrd(const Quat<K>& x) {
  return {qconj(x), qtrd(x), qnrd(x)};
}

/// Matrix units of a split quaternion algebra: e11, e12, e21, e22 with
/// e_{rs} e_{tu} = delta_{st} e_{ru} and e11 + e22 = 1. Requires a square
/// slot: a = t^2 or b = t^2 over the current field (a = 1 for declared_split
/// input; base change can create a slot for other symbols).
template <class K>
struct MatrixUnits {
  Quat<K> e11, e12, e21, e22;
};

namespace detail {

inline std::optional<Rational> rational_sqrt(const Rational& v) {
  if (v.sign() < 0) return std::nullopt;
  if (v.is_zero()) return Rational(0);
  auto isqrt = [](const Int& n) -> std::optional<Int> {
    if (n.sign() < 0) return std::nullopt;
    if (n.is_zero()) return Int(0);
    // Newton iteration; initial guess 2^(ceil(bits/2)) >= sqrt(n)
    Int x = n;
    Int guess(1);
    Int two(2);
    Int t = n;
    while (!(t < Int(1)) && !(t == Int(0))) {
      t = t / Int(4);
      guess = guess * two;
      if (t.is_zero()) break;
    }
    x = guess;
    while (true) {
      Int nx = (x + n / x) / two;
      if (!(nx < x)) break;
      x = nx;
    }
    if (x * x == n) return x;
    return std::nullopt;
  };
  auto sn = isqrt(v.num());
  auto sd = isqrt(v.den());
  if (!sn || !sd) return std::nullopt;
  return Rational(*sn, *sd);
}

/// A square root of v in the field K, if one exists in the cases the engine
/// meets: rational squares, and rational v with v/d a square (giving t*sqrt(d)).
template <class K>
std::optional<K> field_sqrt(const K& v);

template <>
inline std::optional<Rational> field_sqrt<Rational>(const Rational& v) {
  return rational_sqrt(v);
}

template <>
inline std::optional<QuadExt> field_sqrt<QuadExt>(const QuadExt& v) {
  if (v.is_rational()) {
    if (auto r = rational_sqrt(v.rational_part())) return QuadExt(*r);
    // v = d * (y^2)  =>  sqrt(v) = y * sqrt(d); the d of the ambient field is
    // not stored in a rational-embedded value, so the caller retries with the
    // field's d via field_sqrt_with_d below.
  }
  return std::nullopt;
}

inline std::optional<QuadExt> field_sqrt_with_d(const QuadExt& v, long long d) {
  if (auto r = field_sqrt<QuadExt>(v)) return r;
  if (v.is_rational() && d != 0) {
    Rational q = v.rational_part() / Rational(d);
    if (auto y = rational_sqrt(q)) return QuadExt(Rational(0), *y, d);
  }
  return std::nullopt;
}

}  // namespace detail

template <class K>
inline MatrixUnits<K> split_matrix_units(const QuatAlgebra<K>& alg, long long ambient_d = 0) {
  // find a square slot: a = t^2 (use generator i) or b = t^2 (use generator j)
  std::optional<K> t;
  int slot = -1;  // 1 = i, 2 = j
  auto try_slot = [&](const K& sym) -> std::optional<K> {
    if constexpr (std::is_same_v<K, QuadExt>) {
      return detail::field_sqrt_with_d(sym, ambient_d);
    } else {
      (void)ambient_d;
      return detail::field_sqrt<K>(sym);
    }
  };
  if (auto r = try_slot(alg.a)) {
    t = r;
    slot = 1;
  } else if (auto r = try_slot(alg.b)) {
    t = r;
    slot = 2;
  } else {
    throw NotSplitHere("symbol (" + alg.a.to_string() + "," + alg.b.to_string() +
                       ") has no square slot over the current field");
  }

  Quat<K> one = Quat<K>::scalar(alg, K(1));
  Quat<K> gen = Quat<K>::basis(alg, slot);
  K half = K(1) / K(2);
  K tinv = K(1) / *t;
  // e11 = (1 + gen/t)/2
  Quat<K> e11 = half * (one + tinv * gen);
  Quat<K> e22 = one - e11;

  // complementary generator u with u*gen = -gen*u
  for (int u_idx : {slot == 1 ? 2 : 1, 3}) {
    Quat<K> u = Quat<K>::basis(alg, u_idx);
    Quat<K> e12 = qmul(qmul(e11, u), e22);
    Quat<K> e21_raw = qmul(qmul(e22, u), e11);
    Quat<K> prod = qmul(e12, e21_raw);  // = nu * e11 for a scalar nu
    // read off nu against e11 (first nonzero coordinate of e11)
    K nu(0);
    for (int idx = 0; idx < 4; ++idx) {
      if (!e11.c[static_cast<std::size_t>(idx)].is_zero()) {
        nu = prod.c[static_cast<std::size_t>(idx)] / e11.c[static_cast<std::size_t>(idx)];
        break;
      }
    }
    if (nu.is_zero()) continue;
    Quat<K> e21 = (K(1) / nu) * e21_raw;
    return MatrixUnits<K>{e11, e12, e21, e22};
  }
  throw NotSplitHere("matrix-unit construction degenerated for (" + alg.a.to_string() + "," +
                     alg.b.to_string() + ")");
}

/// The map x (x) y  |->  (z |-> x z conj(y)) as a 4x4 matrix in (1, i, j, k).
/// Both tensor factors must carry the identical symbol.
template <class K>
inline SparseMat<K> qtensor_to_end(const Quat<K>& x, const Quat<K>& y) {
  if (!(x.alg && y.alg && x.alg->same_symbol(*y.alg))) throw SymbolMismatch();
  SparseMat<K> m(4, 4);
  Quat<K> ybar = qconj(y);
  for (int c = 0; c < 4; ++c) {
    Quat<K> img = qmul(qmul(x, Quat<K>::basis(*x.alg, c)), ybar);
    for (int r = 0; r < 4; ++r) m.set(r, c, img.c[static_cast<std::size_t>(r)]);
  }
  return m;
}

/// Left-multiplication matrix L_x in the basis (1, i, j, k).
template <class K>
inline SparseMat<K> qleft_mul_matrix(const Quat<K>& x) {
  SparseMat<K> m(4, 4);
  for (int c = 0; c < 4; ++c) {
    Quat<K> img = qmul(x, Quat<K>::basis(*x.alg, c));
    for (int r = 0; r < 4; ++r) m.set(r, c, img.c[static_cast<std::size_t>(r)]);
  }
  return m;
}

/// Right multiplication by conj(x): z |-> z conj(x). For trace-zero x this is
/// the second commuting copy of sl1 acting on the algebra.
template <class K>
inline SparseMat<K> qright_conj_mul_matrix(const Quat<K>& x) {
  SparseMat<K> m(4, 4);
  Quat<K> xb = qconj(x);
  for (int c = 0; c < 4; ++c) {
    Quat<K> img = qmul(Quat<K>::basis(*x.alg, c), xb);
    for (int r = 0; r < 4; ++r) m.set(r, c, img.c[static_cast<std::size_t>(r)]);
  }
  return m;
}

/// ad matrices of the sl1 basis (i, j, k) in its own coordinates:
/// [i,j] = 2k, [j,k] = -2b i, [i,k] = 2a j.
template <class K>
inline std::array<SparseMat<K>, 3> sl1_ad_matrices(const QuatAlgebra<K>& alg) {
  std::array<SparseMat<K>, 3> ad{SparseMat<K>(3, 3), SparseMat<K>(3, 3), SparseMat<K>(3, 3)};
  auto bracket = [&](int s, int t) {
    Quat<K> bs = Quat<K>::basis(alg, s + 1), bt = Quat<K>::basis(alg, t + 1);
    return qmul(bs, bt) - qmul(bt, bs);
  };
  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < 3; ++t) {
      Quat<K> br = bracket(s, t);
      for (int r = 0; r < 3; ++r)
        ad[static_cast<std::size_t>(s)].set(r, t, br.c[static_cast<std::size_t>(r + 1)]);
    }
  return ad;
}

}  // namespace e7forge
