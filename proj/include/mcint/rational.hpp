#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "mcint/errors.hpp"

namespace mcint {

using BigInt = mpz_class;

/// Exact arbitrary-precision fraction, always kept in lowest terms with a
/// positive denominator.
class Rational {
 public:
  Rational() = default;

  template <std::integral I>
  Rational(I n) : value_(static_cast<long>(n)) {}  // NOLINT: implicit by intent

  template <std::integral I, std::integral J>
  Rational(I num, J den) : Rational(BigInt(static_cast<long>(num)), BigInt(static_cast<long>(den))) {}

  explicit Rational(const BigInt& n) : value_(n) {}
  Rational(const BigInt& num, const BigInt& den);

  /// Parses "p/q", "-p/q" or "n". Whitespace is not accepted.
  static Rational parse(std::string_view text);

  /// base^exp for any integer exponent; base must be nonzero when exp < 0.
  static Rational power(const Rational& base, long exp);

  /// Canonical text: "n" for integers, "p/q" otherwise.
  std::string str() const;

  BigInt num() const { return value_.get_num(); }
  BigInt den() const { return value_.get_den(); }
  const mpq_class& raw() const { return value_; }

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  /// Largest integer not above the value.
  BigInt floor() const;

  /// Lossy, for display and benchmarks only.
  double to_double() const { return value_.get_d(); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const {
    Rational r;
    r.value_ = -value_;
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  explicit Rational(mpq_class v) : value_(std::move(v)) {}
  mpq_class value_;
};

Rational abs(const Rational& a);
inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// q^{-k} for a positive integer base.
Rational inverse_power(long base, long k);

}  // namespace mcint
