#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcint/cantor.hpp"
#include "mcint/enclosure.hpp"
#include "mcint/piecewise.hpp"
#include "mcint/rational.hpp"

namespace mcint {

using RealFn = std::function<Rational(const Rational&)>;
using Json = nlohmann::ordered_json;

struct Interval {
  Rational lo;
  Rational hi;
};

// ---------------------------------------------------------------- weights

/// 2^{-k-2l} with 4^{l-1} <= k < 4^l (k >= 1).
Rational q_weights(int k);
/// The block index l of level k.
int q_block(int k);

// ---------------------------------------------------------------- interval blocks

struct Lc2Result {
  long m = 0;
  std::vector<Rational> a;  // a_0 .. a_m
  Rational b;
  StepFn f;
  /// [a_i, b] for i < m.
  std::vector<Interval> witnesses;
};

/// Step function of mass eps concentrated near b whose integrals over the
/// nested witnesses [a_i, b] add up to m*eps > 1/eps.
/// Requires 0 < eps, 0 < tau < sigma < 1, lo < a < b < hi.
Lc2Result lc2_build(const Interval& J, const Rational& eps, const Rational& tau,
                    const Rational& sigma, const Interval& ab);

/// i-th term (i >= 1) of the Calkin-Wilf sequence 1, 1/2, 2, 1/3, 3/2, ...
Rational calkin_wilf(long i);

struct M1Level {
  int k = 0;
  Rational center;
  Interval window;  // I_k
  Lc2Result lc2;
  /// Sum over the witnesses of the integral of f_k.
  Rational witness_sum;
};

struct M1Result {
  Interval domain;
  std::vector<M1Level> levels;
  StepFn f;
  LinearSpline F;
};

/// Truncated aggregate of K interval blocks with eps_k = 2^{-k}, tau_k = 1 - 2^{-k},
/// sigma_k = (1 + tau_k)/2, centred on an enumeration of rationals of I.
/// BudgetError when some block would need more than `max_steps` steps.
M1Result m1_build(int K, const Interval& I, std::size_t max_steps = default_interval_budget());

// ---------------------------------------------------------------- triples

/// A bundle (F, f, phi). F may be an enclosure on a declared exceptional
/// set; f and phi are exact everywhere.
class ConstructedTriple {
 public:
  virtual ~ConstructedTriple() = default;

  virtual std::string construction() const = 0;
  virtual Json params() const = 0;
  int depth() const { return depth_; }

  /// F(x) using `depth` levels where a truncation is needed.
  virtual Enclosure F(const Rational& x, int depth) const = 0;
  Enclosure F(const Rational& x) const { return F(x, depth_); }
  virtual Rational f(const Rational& x) const = 0;
  virtual Rational phi(const Rational& x) const = 0;

  /// Cantor system the construction lives on, if any.
  virtual const CantorSystem* cantor() const { return nullptr; }
  /// Points inside the gap where F changes shape (bump and ramp corners).
  virtual std::vector<Rational> feature_points(const GapInterval&) const { return {}; }
  /// Exact oscillation of F over the closed gap, when available.
  virtual std::optional<Rational> oscillation(const GapInterval&) const { return std::nullopt; }
  /// Human-readable tail bound of the truncation.
  virtual std::string tail_bound() const { return "none"; }

  /// {"construction", "params", "depth"}.
  Json to_json() const;

 protected:
  explicit ConstructedTriple(int depth) : depth_(depth) {}

 private:
  int depth_;
};

using TriplePtr = std::shared_ptr<const ConstructedTriple>;

/// Rebuilds a triple from its JSON description.
TriplePtr triple_from_json(const Json& j);

struct BumpEntry {
  GapInterval gap;
  Rational Q;
  Rational u;
  Rational sigma_J;

  /// Support [u - sigma_J L, u + sigma_J L].
  Interval support() const;
};

/// Bump sum on the ternary Cantor set: on each gap J = (a,b) of level k
/// sits Q_J * xi((x - u_J)/(sigma_J (b-a))) with sigma = 1/alpha,
/// u_J = a + sigma (b-a), sigma_J = 3^{-k} sigma. phi = x + psi(x).
///
/// F and f are evaluated exactly at every rational: the gap containing x is
/// found from the full expansion, at any level. `depth` bounds the registry.
class M3Triple final : public ConstructedTriple {
 public:
  M3Triple(const Rational& alpha, int depth);

  std::string construction() const override { return "m3"; }
  Json params() const override;
  Enclosure F(const Rational& x, int depth) const override;
  using ConstructedTriple::F;
  Rational f(const Rational& x) const override;
  Rational phi(const Rational& x) const override;
  const CantorSystem* cantor() const override { return &sys_; }
  std::vector<Rational> feature_points(const GapInterval& gap) const override;
  std::optional<Rational> oscillation(const GapInterval& gap) const override;
  std::string tail_bound() const override;

  const Rational& alpha() const { return alpha_; }
  const Rational& sigma() const { return sigma_; }
  BumpEntry bump(const GapInterval& gap) const;
  /// Bumps on every gap of level <= depth, sorted by position.
  const std::vector<BumpEntry>& registry() const { return registry_; }

 private:
  Rational alpha_;
  Rational sigma_;
  CantorSystem sys_;
  PiecewiseC1Fn xi_;
  std::vector<BumpEntry> registry_;
};

/// Staircase on the base-5 Cantor set:
/// F = sum_k sigma_k 3^{-k} sum_{I in C_{k-1}} g_{I,tau_k} with
/// sigma_k = 1/(k+1), tau_k = (k+1)/(2(k+2)). phi = x + psi(x).
///
/// F is exact off the set and at points with terminating expansion; other
/// points of the set get [partial sum to depth, + 3^{-depth}/(2(depth+2))].
class M4Triple final : public ConstructedTriple {
 public:
  explicit M4Triple(int depth);

  std::string construction() const override { return "m4"; }
  Json params() const override;
  Enclosure F(const Rational& x, int depth) const override;
  using ConstructedTriple::F;
  Rational f(const Rational& x) const override;
  Rational phi(const Rational& x) const override;
  const CantorSystem* cantor() const override { return &sys_; }
  std::vector<Rational> feature_points(const GapInterval& gap) const override;
  std::optional<Rational> oscillation(const GapInterval& gap) const override;
  std::string tail_bound() const override;

  static Rational sigma(int k);
  static Rational tau(int k);
  /// 3^{-K}/(2(K+2)).
  static Rational tail(int K);
  /// The level-k ramp of the C_{k-1} interval containing the gap.
  PiecewiseC1Fn gap_ramp(const GapInterval& gap) const;

 private:
  CantorSystem sys_;
};

/// Truncated block aggregate as a triple: F the linear spline, f the step
/// function, phi the identity.
class M1Triple final : public ConstructedTriple {
 public:
  M1Triple(int K, const Interval& I);

  std::string construction() const override { return "m1"; }
  Json params() const override;
  Enclosure F(const Rational& x, int depth) const override;
  using ConstructedTriple::F;
  Rational f(const Rational& x) const override;
  Rational phi(const Rational& x) const override { return x; }

  const M1Result& data() const { return data_; }

 private:
  M1Result data_;
};

/// Ad-hoc exact triple from plain callables (controls, tests).
class FunctionTriple final : public ConstructedTriple {
 public:
  FunctionTriple(std::string name, RealFn F, RealFn f, RealFn phi)
      : ConstructedTriple(0), name_(std::move(name)), F_(std::move(F)), f_(std::move(f)), phi_(std::move(phi)) {}

  std::string construction() const override { return name_; }
  Json params() const override { return Json::object(); }
  Enclosure F(const Rational& x, int) const override { return Enclosure(F_(x)); }
  using ConstructedTriple::F;
  Rational f(const Rational& x) const override { return f_(x); }
  Rational phi(const Rational& x) const override { return phi_(x); }

 private:
  std::string name_;
  RealFn F_, f_, phi_;
};

// ---------------------------------------------------------------- controls

/// phi(x) = x + sum_{k<=K} 2^k |(a,x) cap G_k|. G_k is a finite union of
/// open intervals with |G_k| <= 4^{-k}; DomainError otherwise.
RealFn null_control(const Rational& a, const std::vector<std::vector<Interval>>& family, int K);

struct ControlPair {
  RealFn U;
  RealFn V;
};

/// phi(x) = x + sum_{k<=K} k (U_k(x) - V_k(x)) over the first K pairs.
RealFn perron_to_control(const std::vector<ControlPair>& pairs, int K);

}  // namespace mcint
