#include <benchmark/benchmark.h>

#include "swarmupdate/exp/sweep.hpp"

using namespace swarmupdate;

namespace {

exp::SweepGrid grid() {
  exp::SweepGrid g;
  g.sizes = {20, 100};
  g.failure_rates = {0.0, 0.5};
  g.packets = {64};
  g.base.repetitions = 2;
  return g;
}

void BM_sweep_serial(benchmark::State& state) {
  const auto g = grid();
  for (auto _ : state) benchmark::DoNotOptimize(exp::run_sweep_serial(g));
}

void BM_sweep_parallel(benchmark::State& state) {
  const auto g = grid();
  for (auto _ : state) benchmark::DoNotOptimize(exp::run_sweep(g));
}

BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_parallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
