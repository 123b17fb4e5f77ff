#include <benchmark/benchmark.h>

#include "scatterkit/bound_states.hpp"
#include "scatterkit/levinson.hpp"
#include "scatterkit/model.hpp"
#include "scatterkit/scattering.hpp"

namespace {

using namespace scatterkit;

Model bench_model(int n) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(0) = -1.0;
  if (n > 1) v(1) = 0.4;
  if (n > 2) v(2) = -0.7;
  return make_model(n, 1.1, v);
}

void BM_SFiber(benchmark::State& state) {
  const Model model = bench_model(int(state.range(0)));
  const double lambda =
      0.5 * (model.spec.thresholds(1) + model.spec.thresholds(2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(s_fiber(model, lambda));
  }
}
BENCHMARK(BM_SFiber)->Arg(2)->Arg(4)->Arg(8);

void BM_DetS(benchmark::State& state) {
  const Model model = bench_model(int(state.range(0)));
  const double lambda =
      0.5 * (model.spec.band_min + model.spec.band_max) + 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(det_s(model, lambda));
  }
}
BENCHMARK(BM_DetS)->Arg(2)->Arg(4)->Arg(8);

void BM_IntervalVariation(benchmark::State& state) {
  const Model model = bench_model(2);
  const Eigen::VectorXd& taus = model.spec.thresholds;
  for (auto _ : state) {
    benchmark::DoNotOptimize(interval_variation(model, taus(0), taus(1)));
  }
}
BENCHMARK(BM_IntervalVariation)->Unit(benchmark::kMillisecond);

void BM_InertiaCount(benchmark::State& state) {
  const Model model = bench_model(2);
  const double sigma = model.spec.band_min - 1e-3;
  const int L = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(truncated_count_below(model, L, sigma));
  }
}
BENCHMARK(BM_InertiaCount)->Arg(1000)->Arg(4000)->Unit(benchmark::kMicrosecond);

void BM_TruncationOracle(benchmark::State& state) {
  const Model model = bench_model(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(truncation_oracle(model, int(state.range(0))));
  }
}
BENCHMARK(BM_TruncationOracle)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_LevinsonReport(benchmark::State& state) {
  const Model model = bench_model(int(state.range(0)));
  LevinsonOptions opts;
  opts.oracle_L = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(levinson_report(model, opts));
  }
}
BENCHMARK(BM_LevinsonReport)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
