#include "mcint/constructions.hpp"

#include <algorithm>

namespace mcint {

namespace {

Rational pow2(long e) { return Rational::power(Rational(2), e); }

}  // namespace

// ---------------------------------------------------------------- weights

int q_block(int k) {
  if (k < 1) throw DomainError("weight level must be at least 1");
  int l = 1;
  long hi = 4;
  while (k >= hi) {
    hi *= 4;
    ++l;
  }
  return l;
}

Rational q_weights(int k) { return inverse_power(2, k + 2L * q_block(k)); }

// ---------------------------------------------------------------- interval blocks

Lc2Result lc2_build(const Interval& J, const Rational& eps, const Rational& tau, const Rational& sigma,
                    const Interval& ab) {
  if (eps.sign() <= 0) throw DomainError("lc2 needs eps > 0");
  if (tau.sign() <= 0 || !(tau < sigma) || !(sigma < Rational(1))) {
    throw DomainError("lc2 needs 0 < tau < sigma < 1");
  }
  if (!(J.lo < ab.lo && ab.lo < ab.hi && ab.hi < J.hi)) throw DomainError("lc2 needs [a,b] inside J");

  Lc2Result out;
  const Rational inv_sq = Rational(1) / (eps * eps);
  out.m = BigInt(inv_sq.floor() + 1).get_si();
  out.b = ab.hi;
  out.a.push_back(ab.lo);
  for (long i = 1; i <= out.m; ++i) {
    const Rational& prev = out.a.back();
    out.a.push_back(prev + sigma * (out.b - prev));
  }
  const Rational& am = out.a.back();
  out.f = StepFn({{am, out.b, eps / (out.b - am)}});
  for (long i = 0; i < out.m; ++i) out.witnesses.push_back({out.a[static_cast<std::size_t>(i)], out.b});
  return out;
}

Rational calkin_wilf(long i) {
  if (i < 1) throw DomainError("Calkin-Wilf index starts at 1");
  Rational q = 1;
  for (long n = 1; n < i; ++n) q = Rational(1) / (Rational(BigInt(2 * q.floor())) - q + Rational(1));
  return q;
}

M1Result m1_build(int K, const Interval& I, std::size_t max_steps) {
  if (K < 1) throw DomainError("m1 needs K >= 1");
  if (!(I.lo < I.hi)) throw DomainError("m1 needs a nonempty interval");
  if (BigInt(1) << (2 * K) >= BigInt(static_cast<unsigned long>(max_steps))) {
    throw BudgetError("m1 block " + std::to_string(K) + " needs 4^K + 1 steps, over the budget of " +
                      std::to_string(max_steps));
  }
  M1Result out;
  out.domain = I;
  const Rational width = I.hi - I.lo;
  for (int k = 1; k <= K; ++k) {
    M1Level lvl;
    lvl.k = k;
    const Rational t = calkin_wilf(k);
    lvl.center = I.lo + width * t / (Rational(1) + t);
    const Rational eps = inverse_power(2, k);
    lvl.window = {max(I.lo, lvl.center - eps), min(I.hi, lvl.center + eps)};
    const Rational quarter = (lvl.window.hi - lvl.window.lo) / Rational(4);
    const Rational tau = Rational(1) - eps;
    const Rational sigma = (Rational(1) + tau) / Rational(2);
    lvl.lc2 = lc2_build(lvl.window, eps, tau, sigma, {lvl.window.lo + quarter, lvl.window.hi - quarter});
    lvl.witness_sum = 0;
    for (const auto& w : lvl.lc2.witnesses) lvl.witness_sum += lvl.lc2.f.integral(w.lo, w.hi);
    out.f = out.f + lvl.lc2.f;
    out.levels.push_back(std::move(lvl));
  }
  out.F = LinearSpline::integral_of(out.f, I.lo);
  return out;
}

// ---------------------------------------------------------------- triples

Json ConstructedTriple::to_json() const {
  Json j;
  j["construction"] = construction();
  j["params"] = params();
  j["depth"] = depth_;
  return j;
}

namespace {

Rational json_rational(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ParseError(std::string("missing rational field \"") + key + "\"");
  }
  return Rational::parse(j[key].get<std::string>());
}

}  // namespace

TriplePtr triple_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("construction") || !j.contains("depth")) {
    throw ParseError("triple JSON needs \"construction\" and \"depth\"");
  }
  if (!j["depth"].is_number_integer()) throw ParseError("\"depth\" must be an integer");
  const std::string name = j["construction"].get<std::string>();
  const int depth = j["depth"].get<int>();
  const Json params = j.value("params", Json::object());
  if (name == "m3") return std::make_shared<M3Triple>(json_rational(params, "alpha"), depth);
  if (name == "m4") return std::make_shared<M4Triple>(depth);
  if (name == "m1") {
    return std::make_shared<M1Triple>(depth, Interval{json_rational(params, "lo"), json_rational(params, "hi")});
  }
  throw ParseError("unknown construction \"" + name + "\"");
}

Interval BumpEntry::support() const {
  const Rational w = sigma_J * gap.length();
  return {u - w, u + w};
}

M3Triple::M3Triple(const Rational& alpha, int depth)
    : ConstructedTriple(depth), alpha_(alpha), sys_(3), xi_(bump_c1()) {
  if (alpha < Rational(2)) throw DomainError("m3 needs alpha >= 2, got " + alpha.str());
  if (depth < 1) throw DomainError("m3 needs depth >= 1");
  sigma_ = Rational(1) / alpha;
  for (int k = 1; k <= depth; ++k) {
    for (const auto& g : sys_.gaps(k)) registry_.push_back(bump(g));
  }
  std::sort(registry_.begin(), registry_.end(),
            [](const BumpEntry& a, const BumpEntry& b) { return a.gap.left < b.gap.left; });
}

Json M3Triple::params() const {
  Json j;
  j["alpha"] = alpha_.str();
  return j;
}

BumpEntry M3Triple::bump(const GapInterval& gap) const {
  const Rational L = gap.length();
  return {gap, q_weights(gap.level), gap.left + sigma_ * L, inverse_power(3, gap.level) * sigma_};
}

Enclosure M3Triple::F(const Rational& x, int) const {
  if (x.sign() <= 0 || x >= Rational(1)) return Enclosure(Rational(0));
  const Membership mem = sys_.classify(x);
  if (mem.in_set) return Enclosure(Rational(0));
  const BumpEntry b = bump(mem.gap);
  return Enclosure(b.Q * xi_((x - b.u) / (b.sigma_J * b.gap.length())));
}

Rational M3Triple::f(const Rational& x) const {
  if (x.sign() <= 0 || x >= Rational(1)) return 0;
  const Membership mem = sys_.classify(x);
  if (mem.in_set) return 0;
  const BumpEntry b = bump(mem.gap);
  const Rational s = b.sigma_J * b.gap.length();
  return b.Q * xi_.derivative((x - b.u) / s) / s;
}

Rational M3Triple::phi(const Rational& x) const { return x + sys_.psi_extended(x); }

std::vector<Rational> M3Triple::feature_points(const GapInterval& gap) const {
  const BumpEntry b = bump(gap);
  const Rational w = b.sigma_J * gap.length();
  const Rational h = w / Rational(2);
  return {b.u - w, b.u - h, b.u, b.u + h, b.u + w};
}

std::optional<Rational> M3Triple::oscillation(const GapInterval& gap) const { return q_weights(gap.level); }

std::string M3Triple::tail_bound() const {
  return "F exact at every rational; bumps beyond level " + std::to_string(depth()) +
         " have height <= " + q_weights(depth() + 1).str();
}

Rational M4Triple::sigma(int k) { return Rational(1, k + 1); }
Rational M4Triple::tau(int k) { return Rational(k + 1, 2 * (k + 2)); }
Rational M4Triple::tail(int K) { return inverse_power(3, K) / Rational(2 * (K + 2)); }

M4Triple::M4Triple(int depth) : ConstructedTriple(depth), sys_(5) {
  if (depth < 1) throw DomainError("m4 needs depth >= 1");
}

Json M4Triple::params() const { return Json::object(); }

namespace {

// Digit walk shared by F and f: the first odd base-5 digit marks the gap;
// even digits 2 add a full plateau of their level.
// sum over k in ks of 3^{-k}/(k+1), over one common denominator.
Rational sigma_series(const std::vector<int>& ks) {
  if (ks.empty()) return 0;
  const int K = ks.back();
  BigInt lcm = 1;
  for (int k : ks) mpz_lcm_ui(lcm.get_mpz_t(), lcm.get_mpz_t(), static_cast<unsigned long>(k + 1));
  BigInt num = 0, pow3;
  for (int k : ks) {
    mpz_ui_pow_ui(pow3.get_mpz_t(), 3, static_cast<unsigned long>(K - k));
    num += BigInt(lcm / (k + 1)) * pow3;
  }
  mpz_ui_pow_ui(pow3.get_mpz_t(), 3, static_cast<unsigned long>(K));
  return Rational(num, BigInt(lcm * pow3));
}

struct M4Walk {
  Rational partial = 0;
  int gap_level = 0;      // 0 when x lies in the set
  Rational position;      // (x - a)/L inside the level-(gap_level - 1) node
  bool exact = true;      // false for periodic points of the set
};

M4Walk m4_walk(const Rational& x, int depth) {
  M4Walk w;
  {
    // Streamed prefix: settles most points without period detection.
    DigitCursor cur(x, 5);
    std::vector<std::uint8_t> lead;
    std::vector<int> twos;
    for (int k = 1; k <= 64; ++k) {
      const unsigned d = cur.next();
      if (d % 2 == 1) {
        w.gap_level = k;
        const Rational left = Rational(digits_to_integer(lead, 5)) * inverse_power(5, k - 1);
        w.position = (x - left) * Rational::power(Rational(5), k - 1);
        w.partial = sigma_series(twos);
        return w;
      }
      if (d == 2) twos.push_back(k);
      lead.push_back(static_cast<std::uint8_t>(d));
      if (cur.remainder_is_zero()) {
        w.partial = sigma_series(twos);
        return w;
      }
    }
  }
  const DigitExpansion e = baseq_expand(x, 5);
  std::vector<std::uint8_t> digits = e.preperiod;
  digits.insert(digits.end(), e.period.begin(), e.period.end());
  const auto odd = std::find_if(digits.begin(), digits.end(), [](std::uint8_t d) { return d % 2 == 1; });
  std::size_t levels = digits.size();
  if (odd != digits.end()) {
    levels = static_cast<std::size_t>(odd - digits.begin());
  } else if (!e.terminating()) {
    levels = static_cast<std::size_t>(depth);
    w.exact = false;
  }
  const std::size_t n0 = e.preperiod.size();
  const std::size_t p = e.period.size();
  std::vector<int> twos;
  for (std::size_t i = 0; i < levels; ++i) {
    const std::uint8_t d = i < n0 ? e.preperiod[i] : e.period[(i - n0) % p];
    if (d == 2) twos.push_back(static_cast<int>(i) + 1);
  }
  w.partial = sigma_series(twos);
  if (odd != digits.end()) {
    w.gap_level = static_cast<int>(levels) + 1;
    std::vector<std::uint8_t> lead(digits.begin(), odd);
    const long n = static_cast<long>(levels);
    const Rational a = Rational(digits_to_integer(lead, 5)) * inverse_power(5, n);
    w.position = (x - a) * Rational::power(Rational(5), n);
  }
  return w;
}

}  // namespace

Enclosure M4Triple::F(const Rational& x, int depth) const {
  if (x.sign() <= 0 || x >= Rational(1)) return Enclosure(Rational(0));
  if (depth < 1) throw DomainError("depth must be at least 1");
  const M4Walk w = m4_walk(x, depth);
  if (w.gap_level > 0) {
    const int j = w.gap_level;
    const Rational g = ramp_c1(Rational(0), Rational(1), tau(j))(w.position);
    return Enclosure(w.partial + sigma(j) * inverse_power(3, j) * g);
  }
  if (w.exact) return Enclosure(w.partial);
  return {w.partial, w.partial + tail(depth)};
}

Rational M4Triple::f(const Rational& x) const {
  if (x.sign() <= 0 || x >= Rational(1)) return 0;
  const M4Walk w = m4_walk(x, 1);
  if (w.gap_level == 0) return 0;
  const int j = w.gap_level;
  // Left end of a gap is a point of the set.
  if (w.position == Rational(1, 5) || w.position == Rational(3, 5)) return 0;
  const Rational dg = ramp_c1(Rational(0), Rational(1), tau(j)).derivative(w.position);
  return sigma(j) * inverse_power(3, j) * dg * Rational::power(Rational(5), j - 1);
}

Rational M4Triple::phi(const Rational& x) const { return x + sys_.psi_extended(x); }

PiecewiseC1Fn M4Triple::gap_ramp(const GapInterval& gap) const {
  const int j = gap.level;
  const Rational scaled = gap.left * Rational::power(Rational(5), j);
  const long digit = BigInt(scaled.floor() % 5).get_si();
  if (!scaled.is_integer() || digit % 2 == 0) throw DomainError("not a base-5 gap: " + gap.left.str());
  const Rational a = gap.left - Rational(digit) * inverse_power(5, j);
  return ramp_c1(a, a + inverse_power(5, j - 1), tau(j));
}

std::vector<Rational> M4Triple::feature_points(const GapInterval& gap) const {
  std::vector<Rational> out;
  const PiecewiseC1Fn ramp = gap_ramp(gap);
  for (const auto& b : ramp.breakpoints()) {
    if (gap.left <= b && b <= gap.right) out.push_back(b);
  }
  return out;
}

std::optional<Rational> M4Triple::oscillation(const GapInterval& gap) const {
  const auto [lo, hi] = gap_ramp(gap).range(gap.left, gap.right);
  return sigma(gap.level) * inverse_power(3, gap.level) * (hi - lo);
}

std::string M4Triple::tail_bound() const {
  return "F exact off the set and at terminating points; periodic points of the set carry tail " +
         tail(depth()).str();
}

M1Triple::M1Triple(int K, const Interval& I) : ConstructedTriple(K), data_(m1_build(K, I)) {}

Json M1Triple::params() const {
  Json j;
  j["lo"] = data_.domain.lo.str();
  j["hi"] = data_.domain.hi.str();
  return j;
}

Enclosure M1Triple::F(const Rational& x, int) const { return Enclosure(data_.F(x)); }
Rational M1Triple::f(const Rational& x) const { return data_.f(x); }

// ---------------------------------------------------------------- controls

RealFn null_control(const Rational& a, const std::vector<std::vector<Interval>>& family, int K) {
  if (K < 1) throw DomainError("null_control needs K >= 1");
  std::vector<std::vector<Interval>> merged;
  for (int k = 1; k <= K && k <= static_cast<int>(family.size()); ++k) {
    auto g = family[static_cast<std::size_t>(k - 1)];
    std::sort(g.begin(), g.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    std::vector<Interval> u;
    for (const auto& iv : g) {
      if (!(iv.lo < iv.hi)) continue;
      if (!u.empty() && iv.lo <= u.back().hi) {
        u.back().hi = max(u.back().hi, iv.hi);
      } else {
        u.push_back(iv);
      }
    }
    Rational measure = 0;
    for (const auto& iv : u) measure += iv.hi - iv.lo;
    if (measure > inverse_power(4, k)) {
      throw DomainError("|G_" + std::to_string(k) + "| = " + measure.str() + " exceeds 4^-" + std::to_string(k));
    }
    merged.push_back(std::move(u));
  }
  return [a, merged](const Rational& x) {
    Rational v = x;
    for (std::size_t i = 0; i < merged.size(); ++i) {
      Rational m = 0;
      for (const auto& iv : merged[i]) {
        const Rational lo = max(a, iv.lo);
        const Rational hi = min(x, iv.hi);
        if (lo < hi) m += hi - lo;
      }
      v += pow2(static_cast<long>(i) + 1) * m;
    }
    return v;
  };
}

RealFn perron_to_control(const std::vector<ControlPair>& pairs, int K) {
  if (K < 0 || static_cast<std::size_t>(K) > pairs.size()) {
    throw DomainError("perron_to_control needs K between 0 and the number of pairs");
  }
  std::vector<ControlPair> used(pairs.begin(), pairs.begin() + K);
  return [used](const Rational& x) {
    Rational v = x;
    for (std::size_t k = 0; k < used.size(); ++k) {
      v += Rational(static_cast<long>(k) + 1) * (used[k].U(x) - used[k].V(x));
    }
    return v;
  };
}

}  // namespace mcint
