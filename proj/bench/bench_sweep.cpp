// Serial reference against the OpenMP sweep on the proof-delta workloads.
#include <benchmark/benchmark.h>

#include "mcint/verify.hpp"

using namespace mcint;

namespace {

void m3_sweep(benchmark::State& state) {
  const M3Triple t(Rational(3), 8);
  const auto pts = node_endpoints(*t.cantor(), 4);
  const auto rule = DeltaRule::parse("m3-proof-delta");
  SweepOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto r = mc_sweep(t, Rational(7, 2), {Rational(1, 2), Rational(1, 4)}, pts, rule, opt);
    benchmark::DoNotOptimize(r.pass);
  }
  state.counters["centres"] = static_cast<double>(pts.size() * 2);
}

void m4_sweep(benchmark::State& state) {
  const M4Triple t(6);
  auto pts = node_endpoints(*t.cantor(), 5);
  pts.resize(16);
  const auto rule = DeltaRule::parse("m4-proof-delta");
  SweepOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto r = mc_sweep(t, Rational(3), {Rational(1, 8)}, pts, rule, opt);
    benchmark::DoNotOptimize(r.pass);
  }
  state.counters["centres"] = static_cast<double>(pts.size());
}

}  // namespace

BENCHMARK(m3_sweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(m4_sweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
