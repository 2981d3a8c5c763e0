#include <benchmark/benchmark.h>

#include "sdicert/catalog.hpp"
#include "sdicert/kernels.hpp"
#include "sdicert/optimize.hpp"

using namespace sdicert;

namespace {

Strategy noisy(const benchmark::State& state) {
  return catalog::ghz_strategy(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                               catalog::Visibility(0.7));
}

void BM_ScoreParallel(benchmark::State& state) {
  const Strategy s = noisy(state);
  for (auto _ : state) benchmark::DoNotOptimize(score(s).score);
}

void BM_ScoreReference(benchmark::State& state) {
  const Strategy s = noisy(state);
  for (auto _ : state) benchmark::DoNotOptimize(reference::score(s));
}

void BM_PartyGrams(benchmark::State& state) {
  const Strategy s = noisy(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::party_grams(s, 0));
}

void BM_PovmStep(benchmark::State& state) {
  const Strategy s = noisy(state);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_povm_step(s, 50).objective);
}

void cases(benchmark::internal::Benchmark* b) {
  b->Args({2, 2})->Args({2, 3})->Args({3, 2})->Args({3, 3})->Args({4, 2})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_ScoreParallel)->Apply(cases);
BENCHMARK(BM_ScoreReference)->Apply(cases);
BENCHMARK(BM_PartyGrams)->Apply(cases);
BENCHMARK(BM_PovmStep)->Apply(cases);

BENCHMARK_MAIN();
