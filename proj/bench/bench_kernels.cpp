// Serial reference kernels vs their OpenMP counterparts.
// Threads follow OMP_NUM_THREADS.

#include <vector>

#include <benchmark/benchmark.h>

#include "polymer_lab/env_field.hpp"
#include "polymer_lab/lattice_kernels.hpp"
#include "polymer_lab/moment_oracle.hpp"
#include "polymer_lab/polymer_engine.hpp"

namespace {

using namespace plab;

std::vector<double> filled(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 / static_cast<double>(1 + i % 97);
  return v;
}

template <bool Parallel>
void BM_Advance(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto prev = filled(Slice{d, n - 1}.size());
  std::vector<double> next(Slice{d, n}.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::advance(d, n, prev, next);
    } else {
      kernels::advance_serial(d, n, prev, next);
    }
    benchmark::DoNotOptimize(next.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(next.size()));
}

template <bool Parallel>
void BM_PolymerAdvance(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const EnvironmentField env(1, d, n);
  const auto prev = filled(Slice{d, n - 1}.size());
  std::vector<double> next(Slice{d, n}.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::polymer_advance(d, n, prev, next, env, 0.1);
    } else {
      kernels::polymer_advance_serial(d, n, prev, next, env, 0.1);
    }
    benchmark::DoNotOptimize(next.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(next.size()));
}

template <bool Parallel>
void BM_DiffAdvance(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto taps = difference_step_law(d);
  const auto prev = filled(kernels::diff_layer_size(d, n - 1));
  std::vector<double> next(kernels::diff_layer_size(d, n));
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::diff_advance(d, n, taps, prev, next);
    } else {
      kernels::diff_advance_serial(d, n, taps, prev, next);
    }
    benchmark::DoNotOptimize(next.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(next.size()));
}

template <Exec E>
void BM_JointPairWalk(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(ek2_pairwalk(N, 0.1, d, E));
}

template <Exec E>
void BM_EvolveDensity(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  const EnvironmentField env(3, d, N);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_density(env, 0.05, N, d, E).values().data());
}

void step_args(benchmark::internal::Benchmark* b) {
  b->Args({1, 1 << 14})->Args({1, 1 << 15})->Args({2, 256})->Args({2, 1024});
}

}  // namespace

BENCHMARK(BM_Advance<false>)->Apply(step_args);
BENCHMARK(BM_Advance<true>)->Apply(step_args)->UseRealTime();
BENCHMARK(BM_PolymerAdvance<false>)->Apply(step_args);
BENCHMARK(BM_PolymerAdvance<true>)->Apply(step_args)->UseRealTime();
BENCHMARK(BM_DiffAdvance<false>)->Args({1, 1 << 15})->Args({2, 256})->Args({2, 512});
BENCHMARK(BM_DiffAdvance<true>)->Args({1, 1 << 15})->Args({2, 256})->Args({2, 512})->UseRealTime();
BENCHMARK(BM_JointPairWalk<Exec::Serial>)->Args({1, 128})->Args({2, 24})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JointPairWalk<Exec::Parallel>)->Args({1, 128})->Args({2, 24})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvolveDensity<Exec::Serial>)->Args({1, 4096})->Args({2, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvolveDensity<Exec::Parallel>)->Args({1, 4096})->Args({2, 256})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
