// One line per acceptance criterion. Each criterion builds a JSON record of
// its sub-checks; criterion 9 reruns 1-8 and compares the records byte for
// byte. Exit status is 0 only if every criterion passes.
#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>

#include "mcint/verify.hpp"

using namespace mcint;

namespace {

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void check(const std::string& name, bool ok, Json detail = nullptr) {
    Json c;
    c["check"] = name;
    c["pass"] = ok;
    if (!detail.is_null()) c["detail"] = std::move(detail);
    if (!ok) failed_.push_back(c.contains("detail") ? name + ": " + c["detail"].dump() : name);
    checks_.push_back(std::move(c));
  }

  bool pass() const { return failed_.empty(); }
  int id() const { return id_; }
  const std::string& title() const { return title_; }
  const std::vector<std::string>& failed() const { return failed_; }

  Json json() const {
    Json j;
    j["criterion"] = id_;
    j["pass"] = pass();
    j["checks"] = checks_;
    return j;
  }

 private:
  int id_;
  std::string title_;
  Json checks_ = Json::array();
  std::vector<std::string> failed_;
};

BigInt pow_ui(unsigned base, int e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, static_cast<unsigned long>(e));
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

Criterion cantor_enumeration() {
  Criterion c(1, "Cantor enumeration");
  for (const auto& [q, K] : {std::pair{3u, 12}, std::pair{5u, 8}}) {
    const CantorSystem sys(q);
    const unsigned m = sys.m();
    bool counts = true, lengths = true;
    for (int k = 0; k <= K; ++k) {
      const auto nodes = sys.nodes(k);
      counts = counts && BigInt(static_cast<unsigned long>(nodes->size())) == pow_ui(m + 1, k);
      for (const auto& n : *nodes) lengths = lengths && n.right - n.left == inverse_power(q, k);
      if (k == 0) continue;
      const auto gaps = sys.gaps(k);
      counts = counts && BigInt(static_cast<unsigned long>(gaps.size())) == BigInt(m) * pow_ui(m + 1, k - 1);
      for (const auto& g : gaps) lengths = lengths && g.length() == inverse_power(q, k);
    }
    c.check("q=" + std::to_string(q) + " counts through level " + std::to_string(K), counts);
    c.check("q=" + std::to_string(q) + " lengths through level " + std::to_string(K), lengths);

    // Each C_{k+p} interval sits in exactly one C_k interval, (m+1)^p per
    // parent; each C_k interval holds m(m+1)^{p-1} gaps of level k+p.
    bool nesting = true, containment = true;
    for (int k = 0; k <= 6; ++k) {
      const auto parents = sys.nodes(k);
      for (int p = 1; p <= 6; ++p) {
        const auto kids = sys.nodes(k + p);
        const auto gaps = sys.gaps(k + p);
        const BigInt per_parent = pow_ui(m + 1, p);
        const BigInt gaps_per_parent = BigInt(m) * pow_ui(m + 1, p - 1);
        std::size_t i = 0, g = 0;
        for (const auto& par : *parents) {
          std::size_t n = 0;
          while (i < kids->size() && (*kids)[i].right <= par.right) {
            nesting = nesting && par.left <= (*kids)[i].left;
            ++n;
            ++i;
          }
          nesting = nesting && BigInt(static_cast<unsigned long>(n)) == per_parent;
          std::size_t ng = 0;
          while (g < gaps.size() && gaps[g].right <= par.right) {
            if (par.left <= gaps[g].left) ++ng;
            ++g;
          }
          containment = containment && BigInt(static_cast<unsigned long>(ng)) == gaps_per_parent &&
                        sys.count_gaps_within(k + p, par.left, par.right) == gaps_per_parent;
        }
        nesting = nesting && i == kids->size();
      }
    }
    c.check("q=" + std::to_string(q) + " nesting for k,p <= 6", nesting);
    c.check("q=" + std::to_string(q) + " gap containment counts for k,p <= 6", containment);
  }
  return c;
}

// ---------------------------------------------------------------- 2

Criterion psi_correctness() {
  Criterion c(2, "psi correctness");
  const CantorSystem c3(3), c5(5);
  c.check("psi(1/3) = 1/2", c3.psi(Rational(1, 3)) == Rational(1, 2));
  c.check("psi(1/4) = 1/3 (q=3)", c3.psi(Rational(1, 4)) == Rational(1, 3));
  c.check("psi(1/5) = 1/3 (q=5)", c5.psi(Rational(1, 5)) == Rational(1, 3));

  std::mt19937_64 rng(2024);
  auto random_point = [&] {
    const long den = static_cast<long>(rng() % 10'000) + 1;
    return Rational(static_cast<long>(rng() % static_cast<unsigned long>(den + 1)), den);
  };
  for (const CantorSystem* sys : {&c3, &c5}) {
    const std::string tag = "q=" + std::to_string(sys->q());
    std::vector<Rational> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back(random_point());
    std::sort(grid.begin(), grid.end());
    bool mono = true;
    for (std::size_t i = 1; i < grid.size(); ++i) mono = mono && sys->psi(grid[i - 1]) <= sys->psi(grid[i]);
    c.check(tag + " psi nondecreasing on 1000 sorted points", mono);

    bool enclosed = true;
    const Rational mp1(static_cast<long>(sys->m() + 1));
    for (int i = 0; i < 100; ++i) {
      const Rational x = random_point();
      const Rational exact = sys->psi(x);
      for (int d = 1; d <= 20; ++d) {
        const Enclosure e = sys->psi_enclose(x, d);
        enclosed = enclosed && e.contains(exact) && e.width() <= Rational(2) * Rational::power(mp1, -d);
      }
    }
    c.check(tag + " psi_enclose contains psi with width <= 2(m+1)^-d, d <= 20", enclosed);

    bool image = true;
    for (int k = 0; k <= 8; ++k) {
      for (const auto& n : *sys->nodes(k)) image = image && sys->psi(n.right) - sys->psi(n.left) == Rational::power(mp1, -k);
    }
    c.check(tag + " node images have length (m+1)^-k, k <= 8", image);
  }
  return c;
}

// ---------------------------------------------------------------- 3

Criterion lemma_c() {
  Criterion c(3, "weight scheme");
  bool blocks = true, decreasing = true;
  for (int k = 1; k <= 64; ++k) {
    int l = 0;
    for (long top = 1; top <= k; top *= 4) ++l;
    blocks = blocks && q_weights(k) == Rational::power(Rational(2), -(k + 2 * l));
    if (k > 1) decreasing = decreasing && q_weights(k) < q_weights(k - 1);
  }
  c.check("weights are 2^(-k-2l) for k <= 64", blocks);
  c.check("level maxima strictly decrease through k = 64", decreasing);

  for (const Rational eta : {Rational(1, 2), Rational(1, 4), Rational(1, 8)}) {
    const int n = weight_cutoff(eta);
    const CheckReport r = weight_inequality_check(eta, n, 14);
    Json d;
    d["from"] = n;
    d["failing_levels"] = r.extra["failing_levels"];
    d["worst"] = r.worst.str();
    c.check("inequality for eta=" + eta.str() + " on every gap of levels " + std::to_string(n) + "..14", r.pass, d);
  }
  c.check("divergence probe M=3/8 gives 3",
          divergence_probe(DivergenceSource::M3Weights, {Rational(0), Rational(1)}, Rational(3, 8)) == 3);
  c.check("divergence probe M=1 gives 47",
          divergence_probe(DivergenceSource::M3Weights, {Rational(0), Rational(1)}, Rational(1)) == 47);
  return c;
}

// ---------------------------------------------------------------- 4

Criterion m3_suite() {
  Criterion c(4, "bump construction suite");
  const auto t0 = std::chrono::steady_clock::now();
  const M3Triple t(Rational(3), 8);
  const auto& sys = *t.cantor();
  c.check("F(4/9) = 1/8", t.F(Rational(4, 9)) == Enclosure(Rational(1, 8)));

  const auto ends = node_endpoints(sys, 8);
  std::vector<Rational> sample;
  for (std::size_t i = 0; i < 200; ++i) sample.push_back(ends[i * ends.size() / 200]);
  bool zero_F = true, zero_f = true;
  for (const auto& x : sample) {
    zero_F = zero_F && t.F(x) == Enclosure(Rational(0));
    zero_f = zero_f && t.f(x) == 0;
  }
  c.check("F = 0 at 200 node endpoints", zero_F);
  c.check("f = 0 at 200 node endpoints", zero_f);
  bool peaks = true;
  for (const auto& b : t.registry()) peaks = peaks && t.f(b.u) == 0 && t.F(b.u) == Enclosure(b.Q);
  c.check("f = 0 and F = Q at all " + std::to_string(t.registry().size()) + " bump peaks", peaks);

  const auto centres = node_endpoints(sys, 4);
  for (const Rational beta : {Rational(7, 2), Rational(4)}) {
    const auto r = mc_sweep(t, beta, {Rational(1, 2), Rational(1, 4)}, centres, DeltaRule::parse("m3-proof-delta"));
    Json d;
    d["centres"] = centres.size();
    d["samples"] = r.samples;
    d["failing_centres"] = r.extra["failing_centres"];
    c.check("sweep beta=" + beta.str() + ", eps in {1/2, 1/4}, m3-proof-delta", r.pass, d);
  }
  c.check("runtime under 60 s", seconds_since(t0) < 60.0);
  return c;
}

// ---------------------------------------------------------------- 5

bool constant_piece_on(const PiecewiseC1Fn& g, const Rational& lo, const Rational& hi) {
  const auto& br = g.breakpoints();
  if (hi <= br.front() || lo >= br.back()) return true;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    if (br[i] <= lo && hi <= br[i + 1]) {
      const auto& cs = g.pieces()[i].c;
      return std::all_of(cs.begin() + (cs.empty() ? 0 : 1), cs.end(), [](const Rational& v) { return v == 0; });
    }
  }
  return false;
}

Criterion m4_suite() {
  Criterion c(5, "ramp construction suite");
  const M4Triple t(6);
  const auto& sys = *t.cantor();
  auto Fx = [&](const Rational& x) { return t.F(x).lo(); };

  bool f4 = true, f5_symbolic = true, f5_samples = true;
  for (int k = 1; k <= 6; ++k) {
    const Rational inc = M4Triple::sigma(k) * inverse_power(3, k);
    for (const auto& g : sys.gaps(k)) {
      f4 = f4 && abs(Fx(g.right) - Fx(g.left)) == inc;
      const Rational tl = M4Triple::tau(k) * g.length();
      const auto ramp = t.gap_ramp(g);
      f5_symbolic = f5_symbolic && constant_piece_on(ramp, g.left, g.left + tl) &&
                    constant_piece_on(ramp, g.right - tl, g.right);
      for (int i = 0; i <= 4; ++i) {
        f5_samples = f5_samples && t.F(g.left + tl * Rational(i, 4)) == t.F(g.left) &&
                     t.F(g.right - tl * Rational(i, 4)) == t.F(g.right);
      }
    }
  }
  c.check("gap increments equal sigma_k 3^-k for levels <= 6", f4);

  const auto ends = node_endpoints(sys, 6);
  bool f2 = true;
  for (int k = 1; k <= 5; ++k) {
    const Rational bound = M4Triple::sigma(k) * inverse_power(3, k - 1);
    for (const auto& node : *sys.nodes(k - 1)) {
      const auto lo = std::lower_bound(ends.begin(), ends.end(), node.left);
      const auto hi = std::upper_bound(ends.begin(), ends.end(), node.right);
      Rational mn = Fx(*lo), mx = mn;
      for (auto it = lo; it != hi; ++it) {
        const Rational v = Fx(*it);
        mn = min(mn, v);
        mx = max(mx, v);
      }
      f2 = f2 && mx - mn <= bound;
    }
  }
  c.check("endpoint pairs in one C_(k-1) interval differ by <= sigma_k 3^(1-k), k <= 5", f2);
  c.check("plateaus constant by piece inspection", f5_symbolic);
  c.check("plateaus constant at 5 samples each", f5_samples);
  c.check("F(2/5) = 1/6", t.F(Rational(2, 5)) == Enclosure(Rational(1, 6)));
  c.check("F(1/5) = 0", t.F(Rational(1, 5)) == Enclosure(Rational(0)));
  c.check("F(1/2) at depth 3 is [23/108, 23/108 + 1/270]",
          t.F(Rational(1, 2), 3) == Enclosure(Rational(23, 108), Rational(23, 108) + Rational(1, 270)));

  const auto all = node_endpoints(sys, 5);
  std::vector<Rational> centres;
  for (std::size_t i = 0; i < 50; ++i) centres.push_back(all[i * all.size() / 50]);
  for (const Rational alpha : {Rational(5, 2), Rational(3)}) {
    const auto r = mc_sweep(t, alpha, {Rational(1, 8)}, centres, DeltaRule::parse("m4-proof-delta"));
    Json d;
    d["samples"] = r.samples;
    d["failing_centres"] = r.extra["failing_centres"];
    c.check("sweep alpha=" + alpha.str() + ", eps=1/8, m4-proof-delta at 50 points", r.pass, d);
  }
  std::vector<GapInterval> gaps;
  for (int k = 1; k <= 3; ++k) {
    const auto g = sys.gaps(k);
    gaps.insert(gaps.end(), g.begin(), g.end());
  }
  c.check("oscillation sum over levels 1-3 is 13/18", osc_sum(t, gaps, true) == Rational(13, 18));
  c.check("divergence probe M=1 gives 6",
          divergence_probe(DivergenceSource::M4Oscillations, {Rational(0), Rational(1)}, Rational(1)) == 6);
  return c;
}

// ---------------------------------------------------------------- 6

Criterion negative_controls() {
  Criterion c(6, "negative controls");
  const CantorSystem c3(3);
  const FunctionTriple t(
      "psi", [&](const Rational& x) { return c3.psi_extended(x); }, [](const Rational&) { return Rational(0); },
      [](const Rational& x) { return x; });
  const Rational x(1, 3);
  GridSpec g{x, inverse_power(3, 4), {x - inverse_power(3, 5)}};
  for (int k = 6; k <= 8; ++k) {
    g.points.push_back(x - inverse_power(3, k));
    g.points.push_back(x + inverse_power(3, k));
  }
  std::sort(g.points.begin(), g.points.end());
  const auto r = mc_point_check(t, Rational(1), Rational(1), g);
  Json d = r.to_json();
  c.check("psi against the identity control fails at 1/3 with ratio >= 243/32",
          !r.pass && r.worst >= Rational(243, 32), d);

  std::vector<Rational> hs;
  for (int k = 1; k <= 8; ++k) hs.push_back(inverse_power(3, k));
  const auto dr = derivative_check([&](const Rational& y) { return c3.psi_extended(y); },
                                   [](const Rational&) { return Rational(0); }, x, hs);
  bool powers = !dr.pass;
  for (int k = 1; k <= 8; ++k) {
    powers = powers && dr.extra["residuals"][static_cast<std::size_t>(k - 1)]["residual"] ==
                           Rational::power(Rational(3, 2), k).str();
  }
  c.check("derivative residuals are (3/2)^k and increase", powers, dr.extra["residuals"]);
  return c;
}

// ---------------------------------------------------------------- 7

Criterion lc2_m1() {
  Criterion c(7, "interval blocks and truncated aggregate");
  const auto r = lc2_build({Rational(-1), Rational(2)}, Rational(1, 2), Rational(1, 2), Rational(3, 4),
                           {Rational(0), Rational(1)});
  c.check("m = 5", r.m == 5);
  c.check("mass 1/2", r.f.integral() == Rational(1, 2));
  Rational wsum = 0;
  for (const auto& w : r.witnesses) wsum += r.f.integral(w.lo, w.hi);
  c.check("witness sum 5/2", wsum == Rational(5, 2), wsum.str());
  // The witnesses [a_i, b] are nested; their heads [a_i, a_i + tau(b - a_i)]
  // must be pairwise disjoint.
  const Rational tau(1, 2);
  auto head = [&](const Interval& w) { return Interval{w.lo, w.lo + tau * (w.hi - w.lo)}; };
  bool disjoint = true;
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    for (std::size_t j = i + 1; j < r.witnesses.size(); ++j) {
      const Interval a = head(r.witnesses[i]);
      const Interval b = head(r.witnesses[j]);
      disjoint = disjoint && (a.hi < b.lo || b.hi < a.lo);
    }
  }
  c.check("witness heads [a_i, a_i + (b - a_i)/2] pairwise disjoint", disjoint);

  const auto m1 = m1_build(3, {Rational(-1), Rational(2)});
  c.check("K=3 total mass 7/8", m1.f.integral() == Rational(7, 8));
  bool sums = true;
  for (const auto& lvl : m1.levels) sums = sums && lvl.witness_sum > Rational::power(Rational(2), lvl.k);
  c.check("witness sums exceed 2^k", sums);
  return c;
}

// ---------------------------------------------------------------- 8

Criterion bmt() {
  Criterion c(8, "major/minor transforms");
  std::vector<ControlPair> pairs;
  for (int k = 1; k <= 2; ++k) {
    pairs.push_back({[k](const Rational& x) { return x * (Rational(1) + Rational(1, k)); },
                     [k](const Rational& x) { return x * (Rational(1) - Rational(1, k)); }});
  }
  const RealFn phi = perron_to_control(pairs, 2);
  bool five = true;
  for (int i = -12; i <= 12; ++i) five = five && phi(Rational(i, 4)) == Rational(5 * i, 4);
  c.check("control from the worked pairs is 5x", five && phi(Rational(1, 2)) == Rational(5, 2));

  const auto t = std::make_shared<M3Triple>(Rational(3), 8);
  const RealFn F = exact_F(t);
  const Rational eps(1, 2);
  const RealFn U = [&](const Rational& x) { return F(x) + eps * t->phi(x); };
  const RealFn V = [&](const Rational& x) { return F(x) - eps * t->phi(x); };
  const RealFn f = [t](const Rational& x) { return t->f(x); };
  for (int k = 1; k <= 5; ++k) {
    const auto r = perron_validity_check(U, V, f, node_endpoints(*t->cantor(), k));
    c.check("F +- phi/2 valid on the level-" + std::to_string(k) + " node-endpoint grid", r.pass,
            r.extra["min_slack"]);
  }
  return c;
}

using Suite = std::vector<std::function<Criterion()>>;

}  // namespace

int main(int argc, char** argv) {
  std::string json_out;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--json") == 0) json_out = argv[i + 1];
  }
  const Suite suite{cantor_enumeration, psi_correctness, lemma_c, m3_suite, m4_suite, negative_controls, lc2_m1, bmt};

  bool all = true;
  std::vector<std::string> first;
  Json records = Json::array();
  for (const auto& run : suite) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c = [&] {
      try {
        return run();
      } catch (const std::exception& e) {
        Criterion broken(0, "error");
        broken.check(std::string("exception: ") + e.what(), false);
        return broken;
      }
    }();
    const double dt = seconds_since(t0);
    std::cout << (c.pass() ? "PASS" : "FAIL") << "  criterion " << c.id() << ": " << c.title() << " ("
              << std::fixed << std::setprecision(2) << dt << " s)";
    if (!c.pass()) {
      std::cout << "  failed:";
      for (const auto& f : c.failed()) std::cout << " [" << f << "]";
    }
    std::cout << '\n';
    all = all && c.pass();
    first.push_back(c.json().dump());
    records.push_back(c.json());
  }

  // 9: rerun everything and compare the records.
  std::vector<int> differing;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    std::string again;
    try {
      again = suite[i]().json().dump();
    } catch (const std::exception& e) {
      again = e.what();
    }
    if (again != first[i]) differing.push_back(static_cast<int>(i) + 1);
  }
  const bool same = differing.empty();
  std::cout << (same ? "PASS" : "FAIL") << "  criterion 9: determinism (criteria 1-8 rerun, byte-identical JSON)";
  if (!same) {
    std::cout << "  differing:";
    for (int d : differing) std::cout << ' ' << d;
  }
  std::cout << '\n';
  all = all && same;

  if (!json_out.empty()) std::ofstream(json_out) << records.dump(2) << '\n';
  return all ? 0 : 1;
}
