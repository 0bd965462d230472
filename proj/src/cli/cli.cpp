#include "mcint/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcint/verify.hpp"

namespace mcint::cli {

namespace {

Rational rat(const std::string& text, const char* flag) {
  try {
    return Rational::parse(text);
  } catch (const ParseError& e) {
    throw ParseError(std::string("--") + flag + ": " + e.what());
  }
}

std::vector<Rational> rats(const std::vector<std::string>& texts, const char* flag) {
  std::vector<Rational> v;
  v.reserve(texts.size());
  for (const auto& t : texts) v.push_back(rat(t, flag));
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

// "k<=N" -> N
int level_bound(const std::string& s, const std::string& spec) {
  if (s.rfind("k<=", 0) != 0) throw ParseError("expected k<=N in point spec '" + spec + "'");
  const std::string n = s.substr(3);
  if (n.empty() || !std::all_of(n.begin(), n.end(), [](char c) { return c >= '0' && c <= '9'; }) || n.size() > 4) {
    throw ParseError("bad level bound in point spec '" + spec + "'");
  }
  return std::stoi(n);
}

std::vector<Rational> read_csv_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || split(line, ',').empty() || split(line, ',').front() != "x") {
    throw ParseError(path + ": expected a header starting with x");
  }
  std::vector<Rational> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    pts.push_back(Rational::parse(split(line, ',').front()));
  }
  return pts;
}

TriplePtr load_triple(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return triple_from_json(j);
}

Json enclosure_json(const Enclosure& e) {
  Json j;
  if (e.is_point()) {
    j["value"] = e.lo().str();
  } else {
    j["lo"] = e.lo().str();
    j["hi"] = e.hi().str();
  }
  return j;
}

void emit(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

int report(std::ostream& out, const CheckReport& r) {
  emit(out, r.to_json());
  return r.pass ? kOk : kFail;
}

void write_csv(const std::string& path, const ConstructedTriple& t, const std::vector<Rational>& points,
               const CheckReport& r) {
  std::ofstream csv(path);
  if (!csv) throw DomainError("cannot write " + path);
  csv << "x,F,f,phi,ratio\n";
  for (const auto& x : points) {
    std::optional<Rational> ratio;
    for (const auto& p : r.points) {
      if (p.x == x && (!ratio || p.worst > *ratio)) ratio = p.worst;
    }
    const Enclosure F = t.F(x);
    csv << x.str() << ',' << (F.is_point() ? F.lo().str() : F.lo().str() + ".." + F.hi().str()) << ','
        << t.f(x).str() << ',' << t.phi(x).str() << ',' << (ratio ? ratio->str() : "") << '\n';
  }
}

struct MCFlags {
  std::string fn, alpha, beta, points, rule, csv;
  std::vector<std::string> eps;
  int grid_levels = 3;
  int max_depth = 4096;
  bool serial = false;
};

void add_mc_flags(CLI::App* sub, MCFlags& f) {
  sub->add_option("--fn", f.fn, "triple JSON from `build`")->required();
  auto* a = sub->add_option("--alpha", f.alpha, "shift factor");
  auto* b = sub->add_option("--beta", f.beta, "shift factor (alias of --alpha)");
  a->excludes(b);
  sub->add_option("--eps", f.eps, "tolerance ladder")->required()->delimiter(',');
  sub->add_option("--points", f.points, "centres: nodes:q:k<=N, gaps:q:k<=N, list:..., csv:path")->required();
  sub->add_option("--delta-rule", f.rule, "m3-proof-delta, m4-proof-delta or fixed:<r>")->required();
  sub->add_option("--grid-levels", f.grid_levels, "aligned grid levels per centre")->check(CLI::Range(1, 64));
  sub->add_option("--max-depth", f.max_depth, "enclosure refinement cap")->check(CLI::Range(1, 1 << 20));
  sub->add_flag("--serial", f.serial, "run the single-threaded reference");
  sub->add_option("--csv", f.csv, "also dump x,F,f,phi,ratio per centre");
}

CheckReport run_mc(const MCFlags& f, std::vector<Rational>& points, TriplePtr& t) {
  if (f.alpha.empty() == f.beta.empty()) throw ParseError("give exactly one of --alpha, --beta");
  const Rational alpha = f.alpha.empty() ? rat(f.beta, "beta") : rat(f.alpha, "alpha");
  const auto eps = rats(f.eps, "eps");
  const DeltaRule rule = DeltaRule::parse(f.rule);
  points = parse_points(f.points);
  t = load_triple(f.fn);
  SweepOptions opt;
  opt.grid_levels = f.grid_levels;
  opt.max_depth = f.max_depth;
  opt.parallel = !f.serial;
  auto r = mc_sweep(*t, alpha, eps, points, rule, opt);
  if (!f.csv.empty()) write_csv(f.csv, *t, points, r);
  return r;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Exact constructions and checks for alpha-monotonically controlled integrals", "mcint"};
  app.require_subcommand(1);

  // psi
  auto* psi = app.add_subcommand("psi", "Cantor function value");
  unsigned q = 3;
  std::string x_text;
  std::optional<int> depth;
  psi->add_option("--q", q, "odd base")->check(CLI::Range(3u, 61u));
  psi->add_option("--x", x_text, "point in [0,1]")->required();
  psi->add_option("--depth", depth, "enclose with this many digits instead");

  // build
  auto* build = app.add_subcommand("build", "Build a construction and save it as JSON");
  build->require_subcommand(1);
  std::string out_path, alpha_text, lo_text = "0", hi_text = "1";
  int build_depth = 0;
  auto* b3 = build->add_subcommand("m3", "bump construction on the ternary set");
  b3->add_option("--alpha", alpha_text, "alpha >= 2")->required();
  b3->add_option("--depth", build_depth, "bump levels")->required();
  auto* b4 = build->add_subcommand("m4", "ramp construction on the base-5 set");
  b4->add_option("--depth", build_depth, "enclosure depth")->required();
  auto* b1 = build->add_subcommand("m1", "truncated aggregate of interval blocks");
  b1->add_option("--K", build_depth, "number of blocks")->required();
  b1->add_option("--lo", lo_text, "working interval");
  b1->add_option("--hi", hi_text, "working interval");
  for (auto* s : {b1, b3, b4}) s->add_option("--out", out_path, "output file (default stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate F, f or phi at a point");
  std::string fn, component = "F";
  eval->add_option("--fn", fn, "triple JSON")->required();
  eval->add_option("--x", x_text, "point")->required();
  eval->add_option("--component", component, "F, f or phi")->check(CLI::IsMember({"F", "f", "phi"}));
  eval->add_option("--depth", depth, "truncation depth for F");

  // verify
  auto* verify = app.add_subcommand("verify", "Run one check and print its report");
  verify->require_subcommand(1);
  MCFlags mc;
  add_mc_flags(verify->add_subcommand("mc", "controlled-derivative inequality over delta windows"), mc);
  auto* vsm = verify->add_subcommand("sm", "shifted monotonicity premise");
  std::string points_text, tol_text = "0", eps_text, eta_text;
  std::vector<std::string> h_texts;
  vsm->add_option("--fn", fn, "triple JSON")->required();
  vsm->add_option("--alpha", alpha_text, "shift factor")->required();
  vsm->add_option("--points", points_text, "points")->required();
  vsm->add_option("--steps", h_texts, "step sizes")->required()->delimiter(',');
  vsm->add_option("--tol", tol_text, "tolerance");
  auto* vd = verify->add_subcommand("derivative", "difference quotients of F against f");
  vd->add_option("--fn", fn, "triple JSON")->required();
  vd->add_option("--x", x_text, "point")->required();
  vd->add_option("--steps", h_texts, "step sizes")->required()->delimiter(',');
  auto* vp = verify->add_subcommand("perron", "F +- eps phi as major and minor functions");
  vp->add_option("--fn", fn, "triple JSON")->required();
  vp->add_option("--eps", eps_text, "eps")->required();
  vp->add_option("--points", points_text, "grid")->required();
  auto* vw = verify->add_subcommand("weights", "bump weights against ternary increments");
  std::optional<int> from;
  int to = 14;
  vw->add_option("--eta", eta_text, "eta in (0,1)")->required();
  vw->add_option("--from", from, "first level (default: least n with 2^-n < eta)");
  vw->add_option("--to", to, "last level");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "mc check with the per-centre table");
  MCFlags sw;
  add_mc_flags(sweep, sw);

  // osc-sum
  auto* osc = app.add_subcommand("osc-sum", "sum of oscillations of F over gaps");
  int min_level = 1, max_level = 3;
  bool plateau = false;
  osc->add_option("--fn", fn, "triple JSON")->required();
  osc->add_option("--min-level", min_level, "first gap level")->check(CLI::Range(1, 64));
  osc->add_option("--max-level", max_level, "last gap level")->check(CLI::Range(1, 64));
  osc->add_flag("--plateau-aware", plateau, "oscillation over the closed gap");

  // probe
  auto* probe = app.add_subcommand("probe", "least level where a divergent series reaches M");
  std::string source, m_text;
  int cap = 1 << 16;
  probe->add_option("--source", source, "m3-weights or m4-oscillations")
      ->required()
      ->check(CLI::IsMember({"m3-weights", "m4-oscillations"}));
  probe->add_option("--M", m_text, "target")->required();
  probe->add_option("--lo", lo_text, "region");
  probe->add_option("--hi", hi_text, "region");
  probe->add_option("--max-level", cap, "level cap");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    throw ParseError(e.what());
  }

  if (psi->parsed()) {
    const Rational x = rat(x_text, "x");
    const CantorSystem sys(q);
    if (depth) {
      emit(out, enclosure_json(sys.psi_enclose(x, *depth)));
    } else {
      emit(out, Json{{"value", sys.psi(x).str()}});
    }
    return kOk;
  }

  if (build->parsed()) {
    TriplePtr t;
    if (b3->parsed()) t = std::make_shared<M3Triple>(rat(alpha_text, "alpha"), build_depth);
    if (b4->parsed()) t = std::make_shared<M4Triple>(build_depth);
    if (b1->parsed()) t = std::make_shared<M1Triple>(build_depth, Interval{rat(lo_text, "lo"), rat(hi_text, "hi")});
    if (out_path.empty()) {
      emit(out, t->to_json());
    } else {
      std::ofstream f(out_path);
      if (!f) throw DomainError("cannot write " + out_path);
      emit(f, t->to_json());
    }
    return kOk;
  }

  if (eval->parsed()) {
    const Rational x = rat(x_text, "x");
    const TriplePtr t = load_triple(fn);
    if (component == "F") {
      emit(out, enclosure_json(depth ? t->F(x, *depth) : t->F(x)));
    } else {
      emit(out, Json{{"value", (component == "f" ? t->f(x) : t->phi(x)).str()}});
    }
    return kOk;
  }

  if (verify->parsed()) {
    if (verify->get_subcommand("mc")->parsed()) {
      std::vector<Rational> points;
      TriplePtr t;
      return report(out, run_mc(mc, points, t));
    }
    if (vsm->parsed()) {
      const Rational alpha = rat(alpha_text, "alpha");
      const auto hs = rats(h_texts, "steps");
      const Rational tol = rat(tol_text, "tol");
      const auto points = parse_points(points_text);
      const TriplePtr t = load_triple(fn);
      return report(out, sm_check(exact_F(t), [t](const Rational& x) { return t->phi(x); }, alpha, points, hs, tol));
    }
    if (vd->parsed()) {
      const Rational x = rat(x_text, "x");
      const auto hs = rats(h_texts, "steps");
      const TriplePtr t = load_triple(fn);
      return report(out, derivative_check(exact_F(t), [t](const Rational& y) { return t->f(y); }, x, hs));
    }
    if (vp->parsed()) {
      const Rational eps = rat(eps_text, "eps");
      const auto points = parse_points(points_text);
      const TriplePtr t = load_triple(fn);
      const RealFn F = exact_F(t);
      auto r = perron_validity_check([&](const Rational& x) { return F(x) + eps * t->phi(x); },
                                     [&](const Rational& x) { return F(x) - eps * t->phi(x); },
                                     [t](const Rational& x) { return t->f(x); }, points);
      r.params["eps"] = eps.str();
      r.params["construction"] = t->to_json();
      return report(out, r);
    }
    if (vw->parsed()) {
      const Rational eta = rat(eta_text, "eta");
      return report(out, weight_inequality_check(eta, from ? *from : weight_cutoff(eta), to));
    }
  }

  if (sweep->parsed()) {
    std::vector<Rational> points;
    TriplePtr t;
    const CheckReport r = run_mc(sw, points, t);
    Json j = r.to_json();
    Json rows = Json::array();
    for (const auto& p : r.points) {
      Json row;
      row["x"] = p.x.str();
      row["eps"] = p.eps.str();
      row["verdict"] = p.pass ? "pass" : "fail";
      row["worst"] = p.worst.str();
      row["y"] = p.y ? Json(p.y->str()) : Json(nullptr);
      rows.push_back(row);
    }
    j["centres"] = rows;
    emit(out, j);
    return r.pass ? kOk : kFail;
  }

  if (osc->parsed()) {
    if (min_level > max_level) throw DomainError("--min-level exceeds --max-level");
    const TriplePtr t = load_triple(fn);
    if (!t->cantor()) throw DomainError(t->construction() + " has no Cantor system");
    std::vector<GapInterval> gaps;
    for (int k = min_level; k <= max_level; ++k) {
      const auto g = t->cantor()->gaps(k);
      gaps.insert(gaps.end(), g.begin(), g.end());
    }
    Json j;
    j["value"] = osc_sum(*t, gaps, plateau).str();
    j["gaps"] = gaps.size();
    emit(out, j);
    return kOk;
  }

  if (probe->parsed()) {
    const Rational M = rat(m_text, "M");
    const Interval region{rat(lo_text, "lo"), rat(hi_text, "hi")};
    const auto src = source == "m3-weights" ? DivergenceSource::M3Weights : DivergenceSource::M4Oscillations;
    emit(out, Json{{"K", divergence_probe(src, region, M, cap)}});
    return kOk;
  }
  throw ParseError("no command given");
}

void error_payload(std::ostream& err, const char* kind, const std::string& message) {
  Json j;
  j["kind"] = kind;
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

std::vector<Rational> parse_points(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ParseError("point spec needs a kind: '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "list") {
    std::vector<Rational> pts;
    for (const auto& p : split(rest, ',')) pts.push_back(Rational::parse(p));
    if (pts.empty()) throw ParseError("empty point list");
    return pts;
  }
  if (kind == "csv") return read_csv_points(rest);
  if (kind == "nodes" || kind == "gaps") {
    const auto parts = split(rest, ':');
    if (parts.size() != 2) throw ParseError("expected " + kind + ":q:k<=N, got '" + spec + "'");
    const Rational qr = Rational::parse(parts[0]);
    if (!qr.is_integer() || qr < Rational(3) || qr > Rational(61)) throw ParseError("bad base in '" + spec + "'");
    const CantorSystem sys(static_cast<unsigned>(BigInt(qr.num()).get_ui()));
    const int n = level_bound(parts[1], spec);
    return kind == "nodes" ? node_endpoints(sys, n) : gap_endpoints(sys, n);
  }
  throw ParseError("unknown point kind '" + kind + "'");
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out);
  } catch (const BudgetError& e) {
    error_payload(err, e.kind(), e.what());
    return kBudget;
  } catch (const Error& e) {
    error_payload(err, e.kind(), e.what());
    return kUsage;
  } catch (const std::exception& e) {
    error_payload(err, "internal", e.what());
    return kUsage;
  }
}

}  // namespace mcint::cli
