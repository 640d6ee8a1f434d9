#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "e7forge/common.hpp"

namespace e7forge {

/// Arbitrary-precision integer, sign-magnitude, base 2^32 limbs (little endian).
/// Only the operations the engine needs; most values stay in the int64 fast
/// path of Int below, so simplicity wins over asymptotics here.
class BigInt {
 public:
  BigInt() = default;

  explicit BigInt(long long v) {
    if (v == 0) return;
    sign_ = v < 0 ? -1 : 1;
    // avoid UB on LLONG_MIN
    std::uint64_t m = v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
    push_u64(m);
  }

  static BigInt from_u64(std::uint64_t m, int sign) {
    BigInt r;
    if (m != 0) {
      r.sign_ = sign;
      r.push_u64(m);
    }
    return r;
  }

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }

  bool fits_int64() const {
    if (mag_.size() > 2) return false;
    std::uint64_t m = mag_u64();
    if (sign_ >= 0) return m <= static_cast<std::uint64_t>(INT64_MAX);
    return m <= static_cast<std::uint64_t>(INT64_MAX) + 1;
  }

  long long to_int64() const {
    std::uint64_t m = mag_u64();
    if (sign_ < 0) return static_cast<long long>(~m + 1);
    return static_cast<long long>(m);
  }

  friend BigInt operator-(const BigInt& a) {
    BigInt r = a;
    r.sign_ = -r.sign_;
    return r;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    BigInt r;
    if (a.sign_ == b.sign_) {
      r.mag_ = add_mag(a.mag_, b.mag_);
      r.sign_ = a.sign_;
    } else {
      int c = cmp_mag(a.mag_, b.mag_);
      if (c == 0) return r;
      if (c > 0) {
        r.mag_ = sub_mag(a.mag_, b.mag_);
        r.sign_ = a.sign_;
      } else {
        r.mag_ = sub_mag(b.mag_, a.mag_);
        r.sign_ = b.sign_;
      }
    }
    return r;
  }

  friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.sign_ == 0 || b.sign_ == 0) return r;
    r.mag_ = mul_mag(a.mag_, b.mag_);
    r.sign_ = a.sign_ * b.sign_;
    return r;
  }

  /// Truncated division (C semantics): quotient rounds toward zero,
  /// remainder has the sign of the dividend.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.sign_ == 0) throw DivisionByZero();
    if (a.sign_ == 0) {
      q = BigInt();
      r = BigInt();
      return;
    }
    std::vector<std::uint32_t> qm, rm;
    divmod_mag(a.mag_, b.mag_, qm, rm);
    q.mag_ = std::move(qm);
    r.mag_ = std::move(rm);
    q.trim();
    r.trim();
    q.sign_ = q.mag_.empty() ? 0 : a.sign_ * b.sign_;
    r.sign_ = r.mag_.empty() ? 0 : a.sign_;
  }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.sign_ == b.sign_ && a.mag_ == b.mag_;
  }

  /// -1, 0, 1 as a < b, a == b, a > b.
  static int cmp(const BigInt& a, const BigInt& b) {
    if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
    int c = cmp_mag(a.mag_, b.mag_);
    return a.sign_ >= 0 ? c : -c;
  }

  static BigInt gcd(BigInt a, BigInt b) {
    a.sign_ = a.mag_.empty() ? 0 : 1;
    b.sign_ = b.mag_.empty() ? 0 : 1;
    while (!b.is_zero()) {
      BigInt q, r;
      divmod(a, b, q, r);
      a = std::move(b);
      b = std::move(r);
    }
    return a;
  }

  std::string to_string() const {
    if (sign_ == 0) return "0";
    std::vector<std::uint32_t> m = mag_;
    std::string out;
    while (!(m.size() == 0)) {
      // divide magnitude by 10^9, collect remainder
      std::uint64_t rem = 0;
      for (std::size_t i = m.size(); i-- > 0;) {
        std::uint64_t cur = (rem << 32) | m[i];
        m[i] = static_cast<std::uint32_t>(cur / 1000000000ULL);
        rem = cur % 1000000000ULL;
      }
      while (!m.empty() && m.back() == 0) m.pop_back();
      std::string chunk = std::to_string(rem);
      if (m.empty()) {
        out = chunk + out;
      } else {
        out = std::string(9 - chunk.size(), '0') + chunk + out;
      }
    }
    return (sign_ < 0 ? "-" : "") + out;
  }

  static BigInt from_string(const std::string& s) {
    std::size_t pos = 0;
    int sign = 1;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    }
    if (pos >= s.size()) throw IoError("empty integer literal");
    BigInt r;
    for (; pos < s.size(); ++pos) {
      if (s[pos] < '0' || s[pos] > '9') throw IoError("bad digit in integer literal: " + s);
      r.mul_add_small(10, static_cast<std::uint32_t>(s[pos] - '0'));
    }
    r.trim();
    r.sign_ = r.mag_.empty() ? 0 : sign;
    return r;
  }

  std::size_t bit_length() const {
    if (mag_.empty()) return 0;
    std::uint32_t top = mag_.back();
    std::size_t bits = (mag_.size() - 1) * 32;
    while (top) {
      ++bits;
      top >>= 1;
    }
    return bits;
  }

 private:
  int sign_ = 0;
  std::vector<std::uint32_t> mag_;

  void push_u64(std::uint64_t m) {
    mag_.push_back(static_cast<std::uint32_t>(m));
    if (m >> 32) mag_.push_back(static_cast<std::uint32_t>(m >> 32));
  }

  std::uint64_t mag_u64() const {
    std::uint64_t m = 0;
    if (mag_.size() > 1) m = static_cast<std::uint64_t>(mag_[1]) << 32;
    if (!mag_.empty()) m |= mag_[0];
    return m;
  }

  void trim() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) sign_ = 0;
  }

  void mul_add_small(std::uint32_t mul, std::uint32_t add) {
    std::uint64_t carry = add;
    for (auto& limb : mag_) {
      std::uint64_t cur = static_cast<std::uint64_t>(limb) * mul + carry;
      limb = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    if (carry) mag_.push_back(static_cast<std::uint32_t>(carry));
  }

  static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;) {
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
  }

  static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    const auto& big = a.size() >= b.size() ? a : b;
    const auto& small = a.size() >= b.size() ? b : a;
    std::vector<std::uint32_t> r(big.size() + 1, 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < big.size(); ++i) {
      std::uint64_t cur = carry + big[i] + (i < small.size() ? small[i] : 0);
      r[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    r[big.size()] = static_cast<std::uint32_t>(carry);
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  // requires |a| >= |b|
  static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r(a.size(), 0);
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::int64_t cur = static_cast<std::int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
      if (cur < 0) {
        cur += (1LL << 32);
        borrow = 1;
      } else {
        borrow = 0;
      }
      r[i] = static_cast<std::uint32_t>(cur);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  static std::vector<std::uint32_t> mul_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::uint64_t carry = 0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        std::uint64_t cur = static_cast<std::uint64_t>(a[i]) * b[j] + r[i + j] + carry;
        r[i + j] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
      }
      r[i + b.size()] += static_cast<std::uint32_t>(carry);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  static bool get_bit(const std::vector<std::uint32_t>& m, std::size_t bit) {
    return (m[bit / 32] >> (bit % 32)) & 1u;
  }

  // shift-subtract long division on magnitudes; adequate for the sizes seen here
  static void divmod_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                         std::vector<std::uint32_t>& q, std::vector<std::uint32_t>& r) {
    q.assign(a.size(), 0);
    r.clear();
    if (cmp_mag(a, b) < 0) {
      r = a;
      return;
    }
    std::size_t bits = a.size() * 32;
    for (std::size_t i = bits; i-- > 0;) {
      // r = (r << 1) | bit_i(a)
      std::uint32_t carry = get_bit(a, i) ? 1u : 0u;
      for (auto& limb : r) {
        std::uint32_t next = limb >> 31;
        limb = (limb << 1) | carry;
        carry = next;
      }
      if (carry) r.push_back(carry);
      if (cmp_mag(r, b) >= 0) {
        r = sub_mag(r, b);
        q[i / 32] |= (1u << (i % 32));
      }
    }
    while (!q.empty() && q.back() == 0) q.pop_back();
  }
};

/// Integer with an int64 fast path; spills into BigInt only on overflow and
/// shrinks back whenever the value fits again, so representation is canonical.
class Int {
 public:
  Int() = default;
  Int(int v) : small_(v) {}
  Int(long long v) : small_(v) {}
  explicit Int(BigInt b) {
    if (b.fits_int64()) {
      small_ = b.to_int64();
    } else {
      big_ = std::make_unique<BigInt>(std::move(b));
    }
  }

  Int(const Int& o) : small_(o.small_) {
    if (o.big_) big_ = std::make_unique<BigInt>(*o.big_);
  }
  Int(Int&&) noexcept = default;
  Int& operator=(const Int& o) {
    small_ = o.small_;
    big_ = o.big_ ? std::make_unique<BigInt>(*o.big_) : nullptr;
    return *this;
  }
  Int& operator=(Int&&) noexcept = default;

  bool is_small() const { return !big_; }
  bool is_zero() const { return !big_ && small_ == 0; }
  bool is_one() const { return !big_ && small_ == 1; }
  int sign() const {
    if (big_) return big_->sign();
    return small_ < 0 ? -1 : small_ > 0 ? 1 : 0;
  }
  long long small_value() const { return small_; }

  BigInt to_big() const { return big_ ? *big_ : BigInt(small_); }

  friend Int operator-(const Int& a) {
    if (!a.big_ && a.small_ != INT64_MIN) return Int(-a.small_);
    return Int(-a.to_big());
  }

  friend Int operator+(const Int& a, const Int& b) {
    if (!a.big_ && !b.big_) {
      long long r;
      if (!__builtin_add_overflow(a.small_, b.small_, &r)) return Int(r);
    }
    return Int(a.to_big() + b.to_big());
  }

  friend Int operator-(const Int& a, const Int& b) {
    if (!a.big_ && !b.big_) {
      long long r;
      if (!__builtin_sub_overflow(a.small_, b.small_, &r)) return Int(r);
    }
    return Int(a.to_big() - b.to_big());
  }

  friend Int operator*(const Int& a, const Int& b) {
    if (!a.big_ && !b.big_) {
      long long r;
      if (!__builtin_mul_overflow(a.small_, b.small_, &r)) return Int(r);
    }
    return Int(a.to_big() * b.to_big());
  }

  /// Truncated quotient; throws DivisionByZero.
  friend Int operator/(const Int& a, const Int& b) {
    if (!a.big_ && !b.big_) {
      if (b.small_ == 0) throw DivisionByZero();
      if (!(a.small_ == INT64_MIN && b.small_ == -1)) return Int(a.small_ / b.small_);
    }
    BigInt q, r;
    BigInt::divmod(a.to_big(), b.to_big(), q, r);
    return Int(std::move(q));
  }

  friend Int operator%(const Int& a, const Int& b) {
    if (!a.big_ && !b.big_) {
      if (b.small_ == 0) throw DivisionByZero();
      if (!(a.small_ == INT64_MIN && b.small_ == -1)) return Int(a.small_ % b.small_);
    }
    BigInt q, r;
    BigInt::divmod(a.to_big(), b.to_big(), q, r);
    return Int(std::move(r));
  }

  friend bool operator==(const Int& a, const Int& b) {
    if (!a.big_ && !b.big_) return a.small_ == b.small_;
    if (static_cast<bool>(a.big_) != static_cast<bool>(b.big_)) return false;  // canonical reps
    return *a.big_ == *b.big_;
  }
  friend bool operator!=(const Int& a, const Int& b) { return !(a == b); }
  friend bool operator<(const Int& a, const Int& b) {
    if (!a.big_ && !b.big_) return a.small_ < b.small_;
    return BigInt::cmp(a.to_big(), b.to_big()) < 0;
  }

  static Int gcd(const Int& a, const Int& b) {
    if (!a.big_ && !b.big_) {
      // iterative Euclid on magnitudes held in uint64 (handles INT64_MIN)
      std::uint64_t x = a.small_ < 0 ? ~static_cast<std::uint64_t>(a.small_) + 1
                                     : static_cast<std::uint64_t>(a.small_);
      std::uint64_t y = b.small_ < 0 ? ~static_cast<std::uint64_t>(b.small_) + 1
                                     : static_cast<std::uint64_t>(b.small_);
      while (y) {
        std::uint64_t t = x % y;
        x = y;
        y = t;
      }
      return Int(BigInt::from_u64(x, 1));
    }
    return Int(BigInt::gcd(a.to_big(), b.to_big()));
  }

  Int abs() const { return sign() < 0 ? -*this : *this; }

  std::string to_string() const { return big_ ? big_->to_string() : std::to_string(small_); }

  static Int from_string(const std::string& s) { return Int(BigInt::from_string(s)); }

  /// Reduction mod p for prime-field images; result in [0, p).
  std::uint64_t mod_u64(std::uint64_t p) const {
    if (!big_) {
      long long r = small_ % static_cast<long long>(p);
      if (r < 0) r += static_cast<long long>(p);
      return static_cast<std::uint64_t>(r);
    }
    BigInt q, r;
    BigInt::divmod(*big_, BigInt(static_cast<long long>(p)), q, r);
    long long rr = r.fits_int64() ? r.to_int64() : 0;  // |r| < p always fits
    if (rr < 0) rr += static_cast<long long>(p);
    return static_cast<std::uint64_t>(rr);
  }

 private:
  long long small_ = 0;
  std::unique_ptr<BigInt> big_;  // engaged only when the value exceeds int64
};

}  // namespace e7forge
