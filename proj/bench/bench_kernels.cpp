#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "swarmupdate/model/kernels.hpp"

namespace kernels = swarmupdate::model::kernels;

namespace {

struct Buffers {
  std::vector<float> base, updated, delta;
  explicit Buffers(std::size_t n) : base(n), updated(n), delta(n) {
    std::mt19937 rng(1);
    std::normal_distribution<float> w(0.0f, 0.1f), noise(0.0f, 1e-3f);
    for (std::size_t i = 0; i < n; ++i) {
      base[i] = w(rng);
      updated[i] = base[i] + noise(rng);
    }
  }
};

template <bool Parallel>
void BM_compute_delta(benchmark::State& state) {
  Buffers b(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const bool ok = Parallel ? kernels::compute_delta(b.base, b.updated, b.delta)
                             : kernels::compute_delta_serial(b.base, b.updated, b.delta);
    benchmark::DoNotOptimize(ok);
  }
  state.SetBytesProcessed(state.iterations() * state.range(0) * 12);
}

template <bool Parallel>
void BM_add_inplace(benchmark::State& state) {
  Buffers b(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if (Parallel) {
      kernels::add_inplace(b.base, b.updated);
    } else {
      kernels::add_inplace_serial(b.base, b.updated);
    }
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * state.range(0) * 8);
}

template <bool Parallel>
void BM_bit_identical(benchmark::State& state) {
  Buffers b(static_cast<std::size_t>(state.range(0)));
  auto copy = b.base;
  for (auto _ : state) {
    const bool same = Parallel ? kernels::bit_identical(b.base, copy) : kernels::bit_identical_serial(b.base, copy);
    benchmark::DoNotOptimize(same);
  }
  state.SetBytesProcessed(state.iterations() * state.range(0) * 8);
}

// 750k floats is roughly the whole synthetic model.
#define SIZES ->Arg(1 << 12)->Arg(1 << 16)->Arg(750000)

BENCHMARK(BM_compute_delta<false>) SIZES;
BENCHMARK(BM_compute_delta<true>) SIZES;
BENCHMARK(BM_add_inplace<false>) SIZES;
BENCHMARK(BM_add_inplace<true>) SIZES;
BENCHMARK(BM_bit_identical<false>) SIZES;
BENCHMARK(BM_bit_identical<true>) SIZES;

}  // namespace

BENCHMARK_MAIN();
