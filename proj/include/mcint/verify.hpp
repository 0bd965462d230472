#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcint/constructions.hpp"

namespace mcint {

struct Witness {
  Rational x;
  std::optional<Rational> y;
};

/// Per-centre outcome of a sweep (feeds CSV dumps).
struct PointResult {
  Rational x;
  Rational eps;
  bool pass = true;
  Rational worst;
  std::optional<Rational> y;
};

struct CheckReport {
  bool pass = true;
  Rational worst;
  std::optional<Witness> witness;
  std::size_t samples = 0;
  Json params = Json::object();
  /// Check-specific fields appended after the common ones.
  Json extra = Json::object();
  std::vector<PointResult> points;

  std::string verdict() const { return pass ? "pass" : "fail"; }
  /// {"verdict", "worst", "witness": {"x", "y"}, "samples", "params", ...extra}.
  Json to_json() const;
};

/// Centre, radius and the points of one controlled-derivative check.
struct GridSpec {
  Rational center;
  Rational radius;
  std::vector<Rational> points;
};

/// Base-q aligned points around x: multiples of q^{-j} and cell midpoints
/// for `levels` consecutive levels starting at the least j with
/// q^{-j} < delta, plus the triple's feature points in every level-j gap
/// met. Everything is clipped to (x - delta, x + delta) minus x.
GridSpec aligned_grid(const ConstructedTriple& t, const Rational& x, const Rational& delta, int levels);

/// Checks |F(y)-F(x)-f(x)(y-x)| <= eps |phi(x+alpha(y-x)) - phi(x)| at every
/// grid point. Enclosure values of F are deepened up to `max_depth`; an
/// undecided point raises BudgetError.
CheckReport mc_point_check(const ConstructedTriple& t, const Rational& alpha, const Rational& eps,
                           const GridSpec& grid, int max_depth = 4096);

/// Named delta recipe: "m3-proof-delta", "m4-proof-delta" or "fixed:<r>".
struct DeltaRule {
  std::string name;
  Rational fixed;

  static DeltaRule parse(const std::string& text);
};

struct DeltaChoice {
  Rational delta;
  Json detail = Json::object();
};

/// delta for the centre x; DomainError when the rule does not apply.
DeltaChoice choose_delta(const DeltaRule& rule, const ConstructedTriple& t, const Rational& alpha,
                         const Rational& eps, const Rational& x);

struct SweepOptions {
  int grid_levels = 3;
  int max_depth = 4096;
  bool parallel = true;
};

/// mc_point_check at every (eps, x) pair with delta from the rule. Worst
/// ratio is the maximum, ties broken by the smallest (x, y). Undecided
/// points are collected and reported in one BudgetError.
CheckReport mc_sweep(const ConstructedTriple& t, const Rational& alpha, const std::vector<Rational>& eps_ladder,
                     const std::vector<Rational>& points, const DeltaRule& rule, const SweepOptions& opt = {});

/// Single-threaded reference of mc_sweep.
inline CheckReport mc_sweep_serial(const ConstructedTriple& t, const Rational& alpha,
                                   const std::vector<Rational>& eps_ladder, const std::vector<Rational>& points,
                                   const DeltaRule& rule, SweepOptions opt = {}) {
  opt.parallel = false;
  return mc_sweep(t, alpha, eps_ladder, points, rule, opt);
}

/// max_h (F(x+h)-F(x)) / (phi(x+alpha h)-phi(x)) >= -tol at every point.
/// Extra field "monotone": F nondecreasing along the sorted points.
CheckReport sm_check(const RealFn& F, const RealFn& phi, const Rational& alpha, const std::vector<Rational>& points,
                     const std::vector<Rational>& h_grid, const Rational& tol = 0);

/// Residuals max(|F(x+h)-F(x)-f(x)h|, |F(x-h)-F(x)+f(x)h|)/h; pass iff they
/// do not increase as h decreases.
CheckReport derivative_check(const RealFn& F, const RealFn& f, const Rational& x, const std::vector<Rational>& h_grid);

/// Adjacent-pair slopes: U above min f, V below max f, U - V nondecreasing.
/// worst is the smallest slack; fail iff it is negative.
CheckReport perron_validity_check(const RealFn& U, const RealFn& V, const RealFn& f,
                                  const std::vector<Rational>& grid);

/// Sum of |F(b) - F(a)| over the gaps, or of the oscillation over each
/// closed gap when plateau_aware is set.
Rational osc_sum(const ConstructedTriple& t, const std::vector<GapInterval>& gaps, bool plateau_aware);

enum class DivergenceSource { M3Weights, M4Oscillations };

/// Least K whose partial sum through level K reaches M. The sum runs over
/// gaps lying inside [region.lo, region.hi].
int divergence_probe(DivergenceSource source, const Interval& region, const Rational& M, int max_level = 1 << 16);

/// Least n with 2^{-n} < eta.
int weight_cutoff(const Rational& eta);

/// Q_J <= eta min(psi(b + eta L) - psi(b), psi(a) - psi(a - eta L)) for every
/// ternary gap J = (a,b) of level from..to. worst is the largest
/// Q_J / (eta min(...)); extra "failing_levels" lists the levels that fail.
CheckReport weight_inequality_check(const Rational& eta, int from, int to);

/// F as an exact function; BudgetError where it is only enclosed.
RealFn exact_F(const TriplePtr& t);

}  // namespace mcint
