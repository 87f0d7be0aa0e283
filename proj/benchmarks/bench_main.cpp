#include "horolab/equidistribution.hpp"

#include <benchmark/benchmark.h>

using namespace horolab;

namespace {

struct Setup {
  SchottkyGroup group = build_schottky(symmetric_config(2, 2, 0.72));
  double exponent = critical_exponent_estimate(group, 2, 9).value + 0.01;
  PattersonDensity density = patterson_density(group, exponent, 8);
  CoreApproximation core = build_core(group, CoreOptions{3});
  TestFunction psi = make_bump(group, ring_boxes(2, 8, 0.4, 0.4), 2);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void BM_CriticalExponent(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(critical_exponent_estimate(s.group, 2, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CriticalExponent)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_PattersonDensity(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(patterson_density(s.group, s.exponent, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(word_count(2, state.range(0)) - word_count(2, state.range(0) - 1)));
}
BENCHMARK(BM_PattersonDensity)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_PsLeaf(benchmark::State& state) {
  const auto& s = setup();
  const auto x = LorentzMatrix::identity(2);
  for (auto _ : state) benchmark::DoNotOptimize(ps_leaf(s.density, x, static_cast<double>(state.range(0))));
}
BENCHMARK(BM_PsLeaf)->Arg(4)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ReduceFrame(benchmark::State& state) {
  const auto& s = setup();
  const auto g = make_flow(2, 0.3) * make_u(HoroParam::Constant(1, 7.0));
  for (auto _ : state) benchmark::DoNotOptimize(s.group.reduce_frame(g));
}
BENCHMARK(BM_ReduceFrame);

void BM_TestFunction(benchmark::State& state) {
  const auto& s = setup();
  const auto g = make_u(HoroParam::Constant(1, 2.5));
  for (auto _ : state) benchmark::DoNotOptimize(s.psi(g));
}
BENCHMARK(BM_TestFunction);

void BM_WindowAverage(benchmark::State& state) {
  const auto& s = setup();
  const auto x = LorentzMatrix::identity(2);
  const auto kind = state.range(0) ? WindowKind::haar : WindowKind::ps;
  for (auto _ : state) benchmark::DoNotOptimize(window_average(kind, x, 16.0, s.psi, s.density));
}
BENCHMARK(BM_WindowAverage)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BmsSampler(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        global_sampler(GlobalKind::bms, s.group, s.core, s.density, static_cast<std::size_t>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BmsSampler)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
