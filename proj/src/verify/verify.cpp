#include "mcint/verify.hpp"

#include <algorithm>
#include <exception>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mcint {

namespace {

BigInt ceil_of(const Rational& r) { return -((-r).floor()); }

bool witness_less(const Rational& ax, const std::optional<Rational>& ay, const Rational& bx,
                  const std::optional<Rational>& by) {
  if (ax != bx) return ax < bx;
  if (ay.has_value() != by.has_value()) return !ay.has_value();
  return ay.has_value() && *ay < *by;
}

// Keeps the largest value; on ties the lexicographically smallest witness.
struct MaxTracker {
  bool any = false;
  Rational value;
  Witness at;

  void offer(const Rational& v, const Rational& x, const std::optional<Rational>& y) {
    if (!any || v > value || (v == value && witness_less(x, y, at.x, at.y))) {
      any = true;
      value = v;
      at = {x, y};
    }
  }
};

struct MinTracker {
  bool any = false;
  Rational value;
  Witness at;

  void offer(const Rational& v, const Rational& x, const std::optional<Rational>& y) {
    if (!any || v < value || (v == value && witness_less(x, y, at.x, at.y))) {
      any = true;
      value = v;
      at = {x, y};
    }
  }
};

}  // namespace

Json CheckReport::to_json() const {
  Json j;
  j["verdict"] = verdict();
  j["worst"] = worst.str();
  if (witness) {
    Json w;
    w["x"] = witness->x.str();
    if (witness->y) w["y"] = witness->y->str();
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  j["samples"] = samples;
  j["params"] = params;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

// ---------------------------------------------------------------- grids

GridSpec aligned_grid(const ConstructedTriple& t, const Rational& x, const Rational& delta, int levels) {
  if (delta.sign() <= 0) throw DomainError("grid radius must be positive");
  if (levels < 1) throw DomainError("grid needs at least one level");
  const CantorSystem* sys = t.cantor();
  const long q = sys ? static_cast<long>(sys->q()) : 2;
  const Rational lo = x - delta;
  const Rational hi = x + delta;
  auto inside = [&](const Rational& p) { return lo < p && p < hi && p != x; };

  long j0 = 0;
  while (!(inverse_power(q, j0) < delta)) ++j0;

  std::vector<Rational> pts;
  for (long j = j0; j < j0 + levels; ++j) {
    const Rational h = inverse_power(q, j);
    const BigInt n_lo = ceil_of(lo / h) - 1;
    const BigInt n_hi = (hi / h).floor();
    for (BigInt n = n_lo; n <= n_hi; ++n) {
      const Rational left = Rational(n) * h;
      const Rational mid = left + h / Rational(2);
      for (const auto& p : {left, mid}) {
        if (inside(p)) pts.push_back(p);
      }
      if (!sys || mid.sign() < 0 || mid > Rational(1)) continue;
      const Membership mem = sys->classify(mid);
      if (mem.in_set || mem.gap.level != j || mem.gap.left != left) continue;
      for (const auto& p : t.feature_points(mem.gap)) {
        if (inside(p)) pts.push_back(p);
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return {x, delta, std::move(pts)};
}

// ---------------------------------------------------------------- mc

namespace {

struct PairOutcome {
  bool ok = true;
  Rational ratio;
};

PairOutcome check_pair(const ConstructedTriple& t, const Rational& alpha, const Rational& eps, const Rational& x,
                       const Rational& fx, const Rational& phix, const Rational& y, int max_depth) {
  const Rational den = abs(t.phi(x + alpha * (y - x)) - phix);
  if (den.is_zero()) {
    throw DomainError("control increment vanishes at x=" + x.str() + ", y=" + y.str());
  }
  const Rational bound = eps * den;
  const Rational lin = fx * (y - x);
  for (int d = std::max(1, t.depth());; d *= 2) {
    const Enclosure num = abs(t.F(y, d) - t.F(x, d) - Enclosure(lin));
    if (num.hi() <= bound) return {true, num.hi() / den};
    if (num.lo() > bound) return {false, num.lo() / den};
    if (d >= max_depth) {
      throw BudgetError("indeterminate, deepen: enclosure too wide at x=" + x.str() + ", y=" + y.str());
    }
  }
}

}  // namespace

CheckReport mc_point_check(const ConstructedTriple& t, const Rational& alpha, const Rational& eps,
                           const GridSpec& grid, int max_depth) {
  if (alpha.sign() <= 0) throw DomainError("alpha must be positive");
  if (eps.sign() <= 0) throw DomainError("eps must be positive");
  const Rational& x = grid.center;
  const Rational fx = t.f(x);
  const Rational phix = t.phi(x);
  CheckReport r;
  r.params["alpha"] = alpha.str();
  r.params["eps"] = eps.str();
  r.params["x"] = x.str();
  r.params["delta"] = grid.radius.str();
  MaxTracker worst;
  for (const auto& y : grid.points) {
    if (y == x || !(abs(y - x) < grid.radius)) {
      throw DomainError("grid point " + y.str() + " is not inside the punctured window");
    }
    const PairOutcome o = check_pair(t, alpha, eps, x, fx, phix, y, max_depth);
    r.pass = r.pass && o.ok;
    worst.offer(o.ratio, x, y);
    ++r.samples;
  }
  r.worst = worst.any ? worst.value : Rational(0);
  if (worst.any) r.witness = worst.at;
  r.points.push_back({x, eps, r.pass, r.worst, worst.any ? worst.at.y : std::nullopt});
  return r;
}

// ---------------------------------------------------------------- delta rules

DeltaRule DeltaRule::parse(const std::string& text) {
  if (text == "m3-proof-delta" || text == "m4-proof-delta") return {text, Rational(0)};
  if (text.rfind("fixed:", 0) == 0) {
    const Rational r = Rational::parse(text.substr(6));
    if (r.sign() <= 0) throw DomainError("fixed delta must be positive");
    return {"fixed", r};
  }
  throw ParseError("unknown delta rule \"" + text + "\"");
}

namespace {

// Weight bound on the leftmost gap of level k: Q_k <= eta min(right, left
// growth of psi). Every gap of a level has the same ratio, so one gap decides.
bool weight_bound_holds(const CantorSystem& sys, const Rational& eta, int k) {
  const Rational L = sys.length(k);
  const Rational a = L;
  const Rational b = Rational(2) * L;
  const Rational right = sys.psi_extended(b + eta * L) - sys.psi(b);
  const Rational left = sys.psi(a) - sys.psi_extended(a - eta * L);
  return q_weights(k) <= eta * min(right, left);
}

DeltaChoice m3_delta(const M3Triple& t, const Rational& beta, const Rational& eps, const Rational& x) {
  if (!(beta > t.alpha())) throw DomainError("m3-proof-delta needs beta > alpha = " + t.alpha().str());
  if (x.sign() < 0 || x > Rational(1) || !t.cantor()->contains(x)) {
    throw DomainError("m3-proof-delta applies to points of the Cantor set, got " + x.str());
  }
  const Rational& sigma = t.sigma();
  const Rational eta = min(eps, beta * sigma - Rational(1)) / Rational(2);
  const Rational room = sigma - (Rational(1) + eta) / beta;
  // Q_k / 2^{-k} is 4^{-l} on block l, and the right-hand side scales as
  // 2^{-k} for every gap, so the first level of each block decides it.
  int k_star = 0;
  for (int l = 1; l <= 10; ++l) {
    const int k = l == 1 ? 1 : 1 << (2 * (l - 1));
    if (weight_bound_holds(*t.cantor(), eta, k)) {
      k_star = k;
      break;
    }
  }
  if (k_star == 0) throw BudgetError("m3-proof-delta: weight bound not reached by level 4^9");
  const Rational kappa = min(inverse_power(3, k_star - 1), room / Rational(2));
  DeltaChoice c;
  c.delta = kappa * sigma / Rational(2);
  c.detail["eta"] = eta.str();
  c.detail["k_star"] = k_star;
  c.detail["kappa"] = kappa.str();
  return c;
}

DeltaChoice m4_delta(const Rational& alpha, const Rational& eps, const CantorSystem& sys, const Rational& x) {
  if (!(alpha > Rational(2))) throw DomainError("m4-proof-delta needs alpha > 2");
  if (x.sign() < 0 || x > Rational(1) || !sys.contains(x)) {
    throw DomainError("m4-proof-delta applies to points of the Cantor set, got " + x.str());
  }
  long l = 1;
  while (!(alpha > Rational(2) * (Rational(1) + Rational::power(Rational(5), 1 - l)))) ++l;
  const Rational c = Rational(1) + inverse_power(5, l);
  // alpha tau_m > c  <=>  m (alpha - 2c) > 4c - alpha.
  BigInt m_tau = 1;
  const Rational need = (Rational(4) * c - alpha) / (alpha - Rational(2) * c);
  if (need.sign() >= 0) m_tau = need.floor() + 1;
  // sigma_m 3^{l+2} < eps  <=>  m + 1 > 3^{l+2} / eps.
  const BigInt m_sigma = (Rational::power(Rational(3), l + 2) / eps).floor();
  BigInt m = m_tau > m_sigma ? m_tau : m_sigma;
  if (m < 1) m = 1;
  if (!m.fits_slong_p() || m.get_si() > (1L << 24)) throw BudgetError("m4-proof-delta: m too large");
  Rational delta = inverse_power(5, m.get_si() + 1);
  if (x < Rational(1)) delta = min(delta, Rational(1) - x);
  if (x.sign() > 0) delta = min(delta, x);
  DeltaChoice ch;
  ch.delta = delta;
  ch.detail["l"] = l;
  ch.detail["m"] = m.get_si();
  return ch;
}

}  // namespace

DeltaChoice choose_delta(const DeltaRule& rule, const ConstructedTriple& t, const Rational& alpha,
                         const Rational& eps, const Rational& x) {
  if (rule.name == "fixed") return {rule.fixed, Json::object()};
  if (rule.name == "m3-proof-delta") {
    const auto* m3 = dynamic_cast<const M3Triple*>(&t);
    if (!m3) throw DomainError("m3-proof-delta needs an m3 construction");
    return m3_delta(*m3, alpha, eps, x);
  }
  if (rule.name == "m4-proof-delta") {
    if (!dynamic_cast<const M4Triple*>(&t)) throw DomainError("m4-proof-delta needs an m4 construction");
    return m4_delta(alpha, eps, *t.cantor(), x);
  }
  throw ParseError("unknown delta rule \"" + rule.name + "\"");
}

CheckReport mc_sweep(const ConstructedTriple& t, const Rational& alpha, const std::vector<Rational>& eps_ladder,
                     const std::vector<Rational>& points, const DeltaRule& rule, const SweepOptions& opt) {
  if (eps_ladder.empty()) throw DomainError("eps ladder is empty");
  struct Item {
    std::size_t eps_index;
    std::size_t point_index;
    CheckReport report;
    int error = 0;  // 0 none, 1 budget, 2 other
    std::string message;
    std::exception_ptr other;
  };
  std::vector<Item> items;
  for (std::size_t e = 0; e < eps_ladder.size(); ++e) {
    for (std::size_t p = 0; p < points.size(); ++p) items.push_back({e, p, {}, 0, {}, nullptr});
  }

  auto run = [&](Item& it) {
    const Rational& eps = eps_ladder[it.eps_index];
    const Rational& x = points[it.point_index];
    try {
      const DeltaChoice d = choose_delta(rule, t, alpha, eps, x);
      const GridSpec g = aligned_grid(t, x, d.delta, opt.grid_levels);
      it.report = mc_point_check(t, alpha, eps, g, opt.max_depth);
    } catch (const BudgetError& e) {
      it.error = 1;
      it.message = x.str();
    } catch (...) {
      it.error = 2;
      it.other = std::current_exception();
    }
  };

  const long n = static_cast<long>(items.size());
  if (opt.parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long i = 0; i < n; ++i) run(items[static_cast<std::size_t>(i)]);
  } else {
    for (long i = 0; i < n; ++i) run(items[static_cast<std::size_t>(i)]);
  }

  // Deterministic reduction in item order.
  std::vector<std::string> undecided;
  for (const auto& it : items) {
    if (it.error == 2) std::rethrow_exception(it.other);
    if (it.error == 1) undecided.push_back(it.message);
  }
  if (!undecided.empty()) {
    std::string msg = "indeterminate, deepen: undecided points";
    for (const auto& u : undecided) msg += " " + u;
    throw BudgetError(msg);
  }

  CheckReport r;
  r.params["alpha"] = alpha.str();
  Json ladder = Json::array();
  for (const auto& e : eps_ladder) ladder.push_back(e.str());
  r.params["eps"] = ladder;
  r.params["delta_rule"] = rule.name == "fixed" ? "fixed:" + rule.fixed.str() : rule.name;
  r.params["points"] = points.size();
  r.params["grid_levels"] = opt.grid_levels;
  MaxTracker worst;
  Json per_eps = Json::array();
  std::size_t failures = 0;
  for (std::size_t e = 0; e < eps_ladder.size(); ++e) {
    MaxTracker w;
    bool pass = true;
    for (const auto& it : items) {
      if (it.eps_index != e) continue;
      const CheckReport& pr = it.report;
      r.samples += pr.samples;
      if (!pr.pass) ++failures;
      pass = pass && pr.pass;
      if (pr.witness) {
        w.offer(pr.worst, pr.witness->x, pr.witness->y);
        worst.offer(pr.worst, pr.witness->x, pr.witness->y);
      }
      r.points.insert(r.points.end(), pr.points.begin(), pr.points.end());
    }
    Json pe;
    pe["eps"] = eps_ladder[e].str();
    pe["verdict"] = pass ? "pass" : "fail";
    pe["worst"] = (w.any ? w.value : Rational(0)).str();
    per_eps.push_back(pe);
    r.pass = r.pass && pass;
  }
  r.worst = worst.any ? worst.value : Rational(0);
  if (worst.any) r.witness = worst.at;
  r.extra["per_eps"] = per_eps;
  r.extra["failing_centres"] = failures;
  return r;
}

// ---------------------------------------------------------------- other checks

CheckReport sm_check(const RealFn& F, const RealFn& phi, const Rational& alpha, const std::vector<Rational>& points,
                     const std::vector<Rational>& h_grid, const Rational& tol) {
  if (h_grid.empty()) throw DomainError("h grid is empty");
  for (const auto& h : h_grid) {
    if (h.sign() <= 0) throw DomainError("h values must be positive");
  }
  std::vector<Rational> xs = points;
  std::sort(xs.begin(), xs.end());
  CheckReport r;
  r.params["alpha"] = alpha.str();
  r.params["tol"] = tol.str();
  r.params["points"] = xs.size();
  r.params["h"] = h_grid.size();
  MinTracker worst;
  for (const auto& x : xs) {
    const Rational fx = F(x);
    const Rational px = phi(x);
    MaxTracker best;
    for (const auto& h : h_grid) {
      const Rational den = phi(x + alpha * h) - px;
      if (den.is_zero()) throw DomainError("control increment vanishes at x=" + x.str());
      best.offer((F(x + h) - fx) / den, x, x + h);
      ++r.samples;
    }
    worst.offer(best.value, best.at.x, best.at.y);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < xs.size(); ++i) monotone = monotone && F(xs[i - 1]) <= F(xs[i]);
  if (worst.any) {
    r.worst = worst.value;
    r.witness = worst.at;
    r.pass = !(worst.value < -tol);
  }
  r.extra["monotone"] = monotone;
  return r;
}

CheckReport derivative_check(const RealFn& F, const RealFn& f, const Rational& x, const std::vector<Rational>& h_grid) {
  std::vector<Rational> hs = h_grid;
  for (const auto& h : hs) {
    if (h.sign() <= 0) throw DomainError("h values must be positive");
  }
  std::sort(hs.begin(), hs.end(), [](const Rational& a, const Rational& b) { return b < a; });
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  CheckReport r;
  r.params["x"] = x.str();
  r.params["h"] = hs.size();
  const Rational fx = F(x);
  const Rational dx = f(x);
  MaxTracker worst;
  Json residuals = Json::array();
  std::optional<Rational> prev;
  for (const auto& h : hs) {
    const Rational right = abs(F(x + h) - fx - dx * h) / h;
    const Rational left = abs(F(x - h) - fx + dx * h) / h;
    const bool use_right = right >= left;
    const Rational res = use_right ? right : left;
    worst.offer(res, x, use_right ? x + h : x - h);
    if (prev && res > *prev) r.pass = false;
    prev = res;
    Json e;
    e["h"] = h.str();
    e["residual"] = res.str();
    residuals.push_back(e);
    r.samples += 2;
  }
  if (worst.any) {
    r.worst = worst.value;
    r.witness = worst.at;
  }
  r.extra["residuals"] = residuals;
  return r;
}

CheckReport perron_validity_check(const RealFn& U, const RealFn& V, const RealFn& f,
                                  const std::vector<Rational>& grid) {
  if (grid.size() < 2) throw DomainError("perron check needs at least two grid points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) throw DomainError("perron grid must be strictly increasing");
  }
  CheckReport r;
  r.params["points"] = grid.size();
  MinTracker worst, su, sv, sd;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const Rational& a = grid[i - 1];
    const Rational& b = grid[i];
    const Rational dx = b - a;
    const Rational fa = f(a), fb = f(b);
    const Rational ua = U(a), ub = U(b), va = V(a), vb = V(b);
    const Rational u_slack = (ub - ua) / dx - min(fa, fb);
    const Rational v_slack = max(fa, fb) - (vb - va) / dx;
    const Rational d_slack = (ub - vb) - (ua - va);
    su.offer(u_slack, a, b);
    sv.offer(v_slack, a, b);
    sd.offer(d_slack, a, b);
    for (const auto* s : {&u_slack, &v_slack, &d_slack}) worst.offer(*s, a, b);
    r.samples += 3;
  }
  r.worst = worst.value;
  r.witness = worst.at;
  r.pass = worst.value.sign() >= 0;
  Json slack, failed = Json::array();
  for (const auto& [name, tr] : {std::pair<const char*, MinTracker*>{"U", &su}, {"V", &sv}, {"U-V", &sd}}) {
    slack[name] = tr->value.str();
    if (tr->value.sign() < 0) failed.push_back(name);
  }
  r.extra["min_slack"] = slack;
  r.extra["failed"] = failed;
  return r;
}

Rational osc_sum(const ConstructedTriple& t, const std::vector<GapInterval>& gaps, bool plateau_aware) {
  Rational s = 0;
  for (const auto& g : gaps) {
    if (plateau_aware) {
      const auto o = t.oscillation(g);
      if (!o) throw DomainError("construction has no exact oscillation on gaps");
      s += *o;
      continue;
    }
    const Enclosure a = t.F(g.left);
    const Enclosure b = t.F(g.right);
    if (!a.is_point() || !b.is_point()) {
      throw BudgetError("F is only enclosed at an endpoint of gap (" + g.left.str() + ", " + g.right.str() + ")");
    }
    s += abs(b.lo() - a.lo());
  }
  return s;
}

int divergence_probe(DivergenceSource source, const Interval& region, const Rational& M, int max_level) {
  if (M.sign() <= 0) throw DomainError("divergence target must be positive");
  if (!(region.lo < region.hi)) throw DomainError("divergence region is empty");
  const CantorSystem sys(source == DivergenceSource::M3Weights ? 3 : 5);
  Rational s = 0;
  for (int k = 1; k <= max_level; ++k) {
    const Rational count(sys.count_gaps_within(k, region.lo, region.hi));
    const Rational w = source == DivergenceSource::M3Weights ? q_weights(k)
                                                             : M4Triple::sigma(k) * inverse_power(3, k);
    s += count * w;
    if (s >= M) return k;
  }
  throw BudgetError("partial sums stay below " + M.str() + " through level " + std::to_string(max_level));
}

int weight_cutoff(const Rational& eta) {
  if (eta.sign() <= 0) throw DomainError("eta must be positive");
  int n = 0;
  while (!(inverse_power(2, n) < eta)) ++n;
  return n;
}

CheckReport weight_inequality_check(const Rational& eta, int from, int to) {
  if (eta.sign() <= 0) throw DomainError("eta must be positive");
  const CantorSystem sys(3);
  CheckReport r;
  r.params["eta"] = eta.str();
  r.params["from"] = from;
  r.params["to"] = to;
  MaxTracker worst;
  Json failing = Json::array();
  for (int k = std::max(from, 1); k <= to; ++k) {
    const Rational Q = q_weights(k);
    bool level_ok = true;
    for (const auto& g : sys.gaps(k)) {
      const Rational L = g.length();
      const Rational right = sys.psi_extended(g.right + eta * L) - sys.psi(g.right);
      const Rational left = sys.psi(g.left) - sys.psi_extended(g.left - eta * L);
      const Rational rhs = eta * min(right, left);
      const Rational ratio = Q / rhs;
      worst.offer(ratio, g.left, g.right);
      if (Q > rhs) level_ok = false;
      ++r.samples;
    }
    if (!level_ok) failing.push_back(k);
  }
  r.pass = failing.empty();
  if (worst.any) {
    r.worst = worst.value;
    r.witness = worst.at;
  }
  r.extra["failing_levels"] = failing;
  return r;
}

RealFn exact_F(const TriplePtr& t) {
  return [t](const Rational& x) {
    const Enclosure e = t->F(x);
    if (!e.is_point()) throw BudgetError("F is only enclosed at " + x.str() + ": " + e.str());
    return e.lo();
  };
}

}  // namespace mcint
