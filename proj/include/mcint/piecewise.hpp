#pragma once

#include <utility>
#include <vector>

#include "mcint/rational.hpp"

namespace mcint {

/// Dense polynomial c[0] + c[1] t + c[2] t^2 + ...
struct Poly {
  std::vector<Rational> c;

  Rational operator()(const Rational& t) const;
  Poly derivative() const;
  /// p(t) * k.
  Poly scaled(const Rational& k) const;
  /// q(t) = p(t / w); used when a piece is stretched by w.
  Poly stretched(const Rational& w) const;

  friend bool operator==(const Poly&, const Poly&) = default;
};

/// Piecewise polynomial on breakpoints b_0 < ... < b_n. Piece i lives on
/// [b_i, b_{i+1}] and is written in the local variable t = x - b_i.
/// The function is 0 outside [b_0, b_n].
class PiecewiseC1Fn {
 public:
  PiecewiseC1Fn(std::vector<Rational> breakpoints, std::vector<Poly> pieces);

  const std::vector<Rational>& breakpoints() const { return breaks_; }
  const std::vector<Poly>& pieces() const { return pieces_; }

  Rational operator()(const Rational& x) const;
  Rational derivative(const Rational& x) const;

  /// Exact C^1 test on the coefficients: values and first derivatives agree
  /// at every interior breakpoint, and vanish at both ends of the span.
  bool is_c1() const;

  /// y = scale * p((x - center) / width), width > 0.
  PiecewiseC1Fn affine(const Rational& scale, const Rational& center, const Rational& width) const;

  /// Exact [min, max] over [lo, hi]. Each piece met must be monotone there
  /// (true for the smoothstep pieces); throws DomainError otherwise.
  std::pair<Rational, Rational> range(const Rational& lo, const Rational& hi) const;

 private:
  std::size_t piece_index(const Rational& x) const;

  std::vector<Rational> breaks_;
  std::vector<Poly> pieces_;
};

/// Smoothstep s(t) = 3t^2 - 2t^3 on [0,1].
Poly smoothstep();

/// The fixed C^1 bump: 1 on [-1/2, 1/2], 0 outside (-1, 1), smoothstep
/// transitions in between.
PiecewiseC1Fn bump_c1();

/// C^1 plateau on [a,b]: 0 up to a+(1+tau)L/5, 1 on
/// [a+(2-tau)L/5, b-(2-tau)L/5], 0 from b-(1+tau)L/5 on (L = b-a).
/// Requires 0 < tau < 1/2 and a < b.
PiecewiseC1Fn ramp_c1(const Rational& a, const Rational& b, const Rational& tau);

/// Half-open pieces [lo, hi) with constant values, 0 elsewhere.
class StepFn {
 public:
  struct Piece {
    Rational lo;
    Rational hi;
    Rational value;
  };

  StepFn() = default;
  /// Pieces must be nonempty and pairwise disjoint; they are kept sorted.
  explicit StepFn(std::vector<Piece> pieces);

  const std::vector<Piece>& pieces() const { return pieces_; }
  Rational operator()(const Rational& x) const;
  /// Integral over all of R.
  Rational integral() const;
  /// Integral over [lo, hi].
  Rational integral(const Rational& lo, const Rational& hi) const;

  /// Pointwise sum; breakpoints are merged.
  friend StepFn operator+(const StepFn& a, const StepFn& b);

 private:
  std::vector<Piece> pieces_;
};

/// Continuous piecewise linear function through (x_i, y_i), constant
/// outside the knot span.
class LinearSpline {
 public:
  /// The zero function.
  LinearSpline() : xs_{Rational(0)}, ys_{Rational(0)} {}
  LinearSpline(std::vector<Rational> xs, std::vector<Rational> ys);

  /// Indefinite integral of f that vanishes at `start`.
  static LinearSpline integral_of(const StepFn& f, const Rational& start);

  const std::vector<Rational>& knots() const { return xs_; }
  const std::vector<Rational>& values() const { return ys_; }
  Rational operator()(const Rational& x) const;
  /// Slopes on [x_i, x_{i+1}).
  StepFn derivative() const;

 private:
  std::vector<Rational> xs_;
  std::vector<Rational> ys_;
};

}  // namespace mcint
