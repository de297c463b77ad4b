#include <benchmark/benchmark.h>

#include "popcomp/engine.hpp"

using namespace popcomp;

namespace {

Population warmed_population(const ProtocolParams& params, std::uint64_t x0,
                             std::uint64_t y0, SplitRng& rng) {
  Population pop = make_initial(params, x0, y0, RestPolicy::AllNeutral, rng);
  // run one parallel-time unit so the hot loop sees a mixed configuration
  for (std::uint64_t t = 0; t < params.n; ++t) step(pop, rng);
  return pop;
}

void BM_ComparisonStep(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const ProtocolParams P = ProtocolParams::make(n, Variant::Comparison);
  SplitRng rng(12345);
  Population pop = warmed_population(P, n / 100, n / 200, rng);
  for (auto _ : state) {
    for (int k = 0; k < 1024; ++k) step(pop, rng);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_ComparisonStep)->Arg(1 << 14)->Arg(1 << 20)->Unit(benchmark::kMicrosecond);

void BM_CounterStep(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const ProtocolParams P = ProtocolParams::make(n, Variant::CounterComparison);
  SplitRng rng(12345);
  Population pop = warmed_population(P, n / 100, n / 200, rng);
  for (auto _ : state) {
    for (int k = 0; k < 1024; ++k) step(pop, rng);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_CounterStep)->Arg(1 << 17)->Unit(benchmark::kMicrosecond);

void BM_CoinStep(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const ProtocolParams P =
      ProtocolParams::make(n, Variant::CoinDetection, std::nullopt, std::nullopt, 0.25);
  SplitRng rng(12345);
  Population pop = warmed_population(P, n / 100, 0, rng);
  for (auto _ : state) {
    for (int k = 0; k < 1024; ++k) step(pop, rng);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_CoinStep)->Arg(1 << 17)->Unit(benchmark::kMicrosecond);

void BM_RngU64(benchmark::State& state) {
  SplitRng rng(1);
  std::uint64_t acc = 0;
  for (auto _ : state) acc += rng.next_u64();
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RngU64);

void BM_OrderedPair(benchmark::State& state) {
  SplitRng rng(1);
  std::uint64_t acc = 0;
  for (auto _ : state) {
    const auto [i, j] = rng.ordered_pair(1 << 20);
    acc += i + j;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_OrderedPair);

}  // namespace

BENCHMARK_MAIN();
