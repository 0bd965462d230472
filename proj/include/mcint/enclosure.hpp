#pragma once

#include <string>

#include "mcint/rational.hpp"

namespace mcint {

/// Closed rational interval [lo, hi] certified to contain some exact value.
/// Endpoints are exact, so no outward rounding is ever applied.
class Enclosure {
 public:
  Enclosure() = default;
  explicit Enclosure(Rational point) : lo_(point), hi_(std::move(point)) {}
  Enclosure(Rational lo, Rational hi);

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Rational width() const { return hi_ - lo_; }
  bool is_point() const { return lo_ == hi_; }

  bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Enclosure& e) const { return lo_ <= e.lo_ && e.hi_ <= hi_; }

  /// Intersection; throws DomainError when empty.
  Enclosure intersect(const Enclosure& o) const;

  friend Enclosure operator+(const Enclosure& a, const Enclosure& b) {
    return {a.lo_ + b.lo_, a.hi_ + b.hi_};
  }
  friend Enclosure operator-(const Enclosure& a, const Enclosure& b) {
    return {a.lo_ - b.hi_, a.hi_ - b.lo_};
  }
  friend Enclosure operator*(const Rational& c, const Enclosure& e) {
    return c.sign() >= 0 ? Enclosure(c * e.lo_, c * e.hi_) : Enclosure(c * e.hi_, c * e.lo_);
  }
  friend bool operator==(const Enclosure&, const Enclosure&) = default;

  std::string str() const { return "[" + lo_.str() + ", " + hi_.str() + "]"; }

 private:
  Rational lo_;
  Rational hi_;
};

/// Image of |.| over the enclosure.
Enclosure abs(const Enclosure& e);

}  // namespace mcint
