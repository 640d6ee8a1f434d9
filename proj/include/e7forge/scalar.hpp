#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "e7forge/integer.hpp"

namespace e7forge {

/// Exact rational number; denominator > 0, gcd(|num|, den) = 1, zero is 0/1.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(int n) : num_(n), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(Int n) : num_(std::move(n)), den_(1) {}
  Rational(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  const Int& num() const { return num_; }
  const Int& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_integer() const { return den_.is_one(); }
  int sign() const { return num_.sign(); }

  friend Rational operator-(const Rational& a) {
    Rational r;
    r.num_ = -a.num_;
    r.den_ = a.den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }

  friend Rational operator-(const Rational& a, const Rational& b) {
    if (b.is_zero()) return a;
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }

  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.is_zero() || b.is_zero()) return Rational();
    // cross-reduce first to keep the fast integer path longer
    Int g1 = Int::gcd(a.num_, b.den_);
    Int g2 = Int::gcd(b.num_, a.den_);
    Rational r;
    r.num_ = (a.num_ / g1) * (b.num_ / g2);
    r.den_ = (a.den_ / g2) * (b.den_ / g1);
    return r;
  }

  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw DivisionByZero();
    if (a.is_zero()) return Rational();
    Int g1 = Int::gcd(a.num_, b.num_);
    Int g2 = Int::gcd(b.den_, a.den_);
    Rational r;
    r.num_ = (a.num_ / g1) * (b.den_ / g2);
    r.den_ = (a.den_ / g2) * (b.num_ / g1);
    if (r.den_.sign() < 0) {
      r.num_ = -r.num_;
      r.den_ = -r.den_;
    }
    return r;
  }

  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  Rational inverse() const {
    if (is_zero()) throw DivisionByZero();
    return Rational(1) / *this;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return (a.num_ * b.den_) < (b.num_ * a.den_);
  }

  std::string to_string() const {
    if (den_.is_one()) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
  }

  static Rational from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(Int::from_string(s));
    return Rational(Int::from_string(s.substr(0, slash)), Int::from_string(s.substr(slash + 1)));
  }

 private:
  Int num_, den_;

  void normalize() {
    if (den_.is_zero()) throw DivisionByZero();
    if (num_.is_zero()) {
      den_ = Int(1);
      return;
    }
    if (den_.sign() < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    Int g = Int::gcd(num_, den_);
    if (!g.is_one()) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
  }
};

inline Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

/// Element x + y*sqrt(d) of a quadratic extension of the rationals.
/// d = 0 marks a rational-embedded value (y must be 0); real values carry the
/// square-free non-square d of their field, and mixing distinct d's throws.
class QuadExt {
 public:
  QuadExt() = default;
  QuadExt(int v) : x_(v) {}
  QuadExt(long long v) : x_(v) {}
  QuadExt(Rational v) : x_(std::move(v)) {}
  QuadExt(Rational x, Rational y, long long d) : x_(std::move(x)), y_(std::move(y)), d_(d) {
    if (y_.is_zero()) d_ = 0;
  }

  const Rational& rational_part() const { return x_; }
  const Rational& surd_part() const { return y_; }
  long long d() const { return d_; }
  bool is_zero() const { return x_.is_zero() && y_.is_zero(); }
  bool is_one() const { return x_.is_one() && y_.is_zero(); }
  bool is_rational() const { return y_.is_zero(); }

  static long long join(long long d1, long long d2) {
    if (d1 == 0) return d2;
    if (d2 == 0) return d1;
    if (d1 != d2) throw FieldMismatch("quadratic extensions with different d");
    return d1;
  }

  friend QuadExt operator-(const QuadExt& a) { return QuadExt(-a.x_, -a.y_, a.d_); }

  friend QuadExt operator+(const QuadExt& a, const QuadExt& b) {
    return QuadExt(a.x_ + b.x_, a.y_ + b.y_, join(a.d_, b.d_));
  }
  friend QuadExt operator-(const QuadExt& a, const QuadExt& b) {
    return QuadExt(a.x_ - b.x_, a.y_ - b.y_, join(a.d_, b.d_));
  }
  friend QuadExt operator*(const QuadExt& a, const QuadExt& b) {
    long long d = join(a.d_, b.d_);
    if (a.y_.is_zero() && b.y_.is_zero()) return QuadExt(a.x_ * b.x_);
    return QuadExt(a.x_ * b.x_ + Rational(d) * a.y_ * b.y_, a.x_ * b.y_ + a.y_ * b.x_, d);
  }
  friend QuadExt operator/(const QuadExt& a, const QuadExt& b) { return a * b.inverse(); }

  QuadExt& operator+=(const QuadExt& b) { return *this = *this + b; }
  QuadExt& operator-=(const QuadExt& b) { return *this = *this - b; }
  QuadExt& operator*=(const QuadExt& b) { return *this = *this * b; }
  QuadExt& operator/=(const QuadExt& b) { return *this = *this / b; }

  QuadExt conj() const { return QuadExt(x_, -y_, d_); }

  /// Norm x^2 - d y^2; vanishes only at zero since d is not a square.
  Rational norm() const { return x_ * x_ - Rational(d_) * y_ * y_; }

  QuadExt inverse() const {
    if (is_zero()) throw DivisionByZero();
    Rational n = norm();
    return QuadExt(x_ / n, -(y_ / n), d_);
  }

  friend bool operator==(const QuadExt& a, const QuadExt& b) {
    return a.x_ == b.x_ && a.y_ == b.y_ && (a.y_.is_zero() || a.d_ == b.d_);
  }
  friend bool operator!=(const QuadExt& a, const QuadExt& b) { return !(a == b); }

  std::string to_string() const {
    if (y_.is_zero()) return x_.to_string();
    std::string surd = abs(y_).to_string() + "*sqrt(" + std::to_string(d_) + ")";
    return x_.to_string() + (y_.sign() < 0 ? "-" : "+") + surd;
  }

  static QuadExt from_string(const std::string& s, long long d) {
    auto star = s.find("*sqrt(");
    if (star == std::string::npos) return QuadExt(Rational::from_string(s));
    // split "<x><sign><|y|>*sqrt(d)" at the sign separating the two parts
    std::size_t split = std::string::npos;
    for (std::size_t i = star; i-- > 1;) {
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != '/' && s[i - 1] != '+' && s[i - 1] != '-') {
        split = i;
        break;
      }
    }
    if (split == std::string::npos) throw IoError("bad quadratic-extension literal: " + s);
    Rational x = Rational::from_string(s.substr(0, split));
    Rational y = Rational::from_string(s.substr(split + 1, star - split - 1));
    if (s[split] == '-') y = -y;
    return QuadExt(std::move(x), std::move(y), d);
  }

 private:
  Rational x_, y_;
  long long d_ = 0;
};

/// Prime-field element; p = 0 marks an integer-embedded constant produced by
/// generic code before a concrete field is known.
class Fp {
 public:
  Fp() = default;
  Fp(int v) : raw_(v) {}
  Fp(long long v) : raw_(v) {}
  Fp(std::uint64_t residue, std::uint64_t p) : raw_(static_cast<long long>(residue % p)), p_(p) {}

  std::uint64_t p() const { return p_; }
  std::uint64_t residue() const {
    if (p_ == 0) throw FieldMismatch("residue of an unbound prime-field constant");
    return static_cast<std::uint64_t>(raw_);
  }
  bool is_zero() const { return raw_ == 0; }
  bool is_one() const { return raw_ == 1; }

  static std::uint64_t join(std::uint64_t p1, std::uint64_t p2) {
    if (p1 == 0) return p2;
    if (p2 == 0) return p1;
    if (p1 != p2) throw FieldMismatch("prime fields with different p");
    return p1;
  }

  friend Fp operator-(const Fp& a) { return bind(-a.raw_, a.p_); }
  friend Fp operator+(const Fp& a, const Fp& b) {
    std::uint64_t p = join(a.p_, b.p_);
    return bind(a.raw_ + b.raw_, p);
  }
  friend Fp operator-(const Fp& a, const Fp& b) {
    std::uint64_t p = join(a.p_, b.p_);
    return bind(a.raw_ - b.raw_, p);
  }
  friend Fp operator*(const Fp& a, const Fp& b) {
    std::uint64_t p = join(a.p_, b.p_);
    if (p == 0) return Fp(a.raw_ * b.raw_);
    using u128 = unsigned __int128;
    u128 prod = static_cast<u128>(bind(a.raw_, p).raw_) * static_cast<u128>(bind(b.raw_, p).raw_);
    return Fp(static_cast<std::uint64_t>(prod % p), p);
  }
  friend Fp operator/(const Fp& a, const Fp& b) { return a * b.inverse(); }

  Fp& operator+=(const Fp& b) { return *this = *this + b; }
  Fp& operator-=(const Fp& b) { return *this = *this - b; }
  Fp& operator*=(const Fp& b) { return *this = *this * b; }
  Fp& operator/=(const Fp& b) { return *this = *this / b; }

  Fp inverse() const {
    if (raw_ == 0) throw DivisionByZero();
    if (p_ == 0) {
      if (raw_ == 1 || raw_ == -1) return *this;
      throw FieldMismatch("inverse of an unbound prime-field constant");
    }
    // extended Euclid
    long long t = 0, new_t = 1;
    long long r = static_cast<long long>(p_), new_r = raw_;
    while (new_r != 0) {
      long long q = r / new_r;
      long long tmp = t - q * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - q * new_r;
      r = new_r;
      new_r = tmp;
    }
    return bind(t, p_);
  }

  friend bool operator==(const Fp& a, const Fp& b) {
    if (a.p_ != 0 && b.p_ != 0 && a.p_ != b.p_) return false;
    std::uint64_t p = a.p_ ? a.p_ : b.p_;
    if (p == 0) return a.raw_ == b.raw_;
    return bind(a.raw_, p).raw_ == bind(b.raw_, p).raw_;
  }
  friend bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }

  std::string to_string() const {
    return std::to_string(raw_) + (p_ ? " mod " + std::to_string(p_) : "");
  }

 private:
  long long raw_ = 0;  // canonical in [0, p) when p != 0
  std::uint64_t p_ = 0;

  static Fp bind(long long raw, std::uint64_t p) {
    Fp r;
    r.p_ = p;
    if (p == 0) {
      r.raw_ = raw;
    } else {
      long long m = raw % static_cast<long long>(p);
      if (m < 0) m += static_cast<long long>(p);
      r.raw_ = m;
    }
    return r;
  }
};

/// Uniform runtime scalar for the report/CLI layer; the computational core is
/// templated on the concrete field type instead.
using Scalar = std::variant<Rational, QuadExt, Fp>;

enum class FieldOp { Add, Sub, Mul, Div, Neg, Inv, Eq };

struct FieldOpResult {
  Scalar value;    // valid unless op == Eq
  bool equal = false;
};

inline FieldOpResult field_ops(const Scalar& a, const Scalar& b, FieldOp op) {
  if (op != FieldOp::Neg && op != FieldOp::Inv && a.index() != b.index())
    throw FieldMismatch("scalar kinds differ");
  auto apply = [&](auto&& x) -> FieldOpResult {
    using T = std::decay_t<decltype(x)>;
    const T& yy = op == FieldOp::Neg || op == FieldOp::Inv ? x : std::get<T>(b);
    switch (op) {
      case FieldOp::Add: return {Scalar(x + yy), false};
      case FieldOp::Sub: return {Scalar(x - yy), false};
      case FieldOp::Mul: return {Scalar(x * yy), false};
      case FieldOp::Div: return {Scalar(x / yy), false};
      case FieldOp::Neg: return {Scalar(-x), false};
      case FieldOp::Inv: return {Scalar(x.inverse()), false};
      case FieldOp::Eq: return {Scalar(x), x == yy};
    }
    throw Error("unreachable");
  };
  return std::visit([&](auto&& x) { return apply(x); }, a);
}

inline std::string scalar_to_string(const Scalar& s) {
  return std::visit([](auto&& v) { return v.to_string(); }, s);
}

// --- small helpers shared by the templated core ---

template <class K>
inline bool scalar_is_zero(const K& v) { return v.is_zero(); }

/// Rational content of a QuadExt that is known to be rational-valued.
inline Rational expect_rational(const QuadExt& v, const char* what) {
  if (!v.is_rational()) throw NotSplit(std::string(what) + ": value is not rational");
  return v.rational_part();
}
inline Rational expect_rational(const Rational& v, const char*) { return v; }

template <class K>
struct field_name;
template <> struct field_name<Rational> { static constexpr const char* value = "Q"; };
template <> struct field_name<QuadExt> { static constexpr const char* value = "Q(sqrt d)"; };
template <> struct field_name<Fp> { static constexpr const char* value = "GF(p)"; };

}  // namespace e7forge
