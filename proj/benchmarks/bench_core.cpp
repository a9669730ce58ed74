#include <vector>

#include <benchmark/benchmark.h>

#include "interbank/riccati.hpp"
#include "interbank/rng.hpp"
#include "interbank/simulate.hpp"

using namespace interbank;

static void BM_SolveStrategy(benchmark::State& state) {
  const MarketParams p;
  RiccatiOptions opts;
  opts.steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_strategy(p, StrategyMode::DerivationConsistent, opts));
}
BENCHMARK(BM_SolveStrategy)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_MatrixOracle(benchmark::State& state) {
  const MarketParams p;
  const auto sys = build_extended_system(p);
  const auto phi = solve_minor_phi(p);
  for (auto _ : state) benchmark::DoNotOptimize(solve_major_lqr_oracle(sys, phi));
}
BENCHMARK(BM_MatrixOracle);

static void BM_PathNoise(benchmark::State& state) {
  RngPolicy rng;
  std::vector<double> buf(static_cast<std::size_t>(state.range(0)));
  std::uint64_t path = 0;
  for (auto _ : state) {
    fill_path_noise(rng, path++, buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PathNoise)->Arg(1100)->Arg(10100);

// Items are simulated paths.
static void BM_SimulateFinite(benchmark::State& state) {
  const MarketParams p;
  const auto rs = solve_strategy(p, StrategyMode::DerivationConsistent);
  const int N = static_cast<int>(state.range(0));
  const int paths = 1000;
  RngPolicy rng;
  SimOptions opts;
  opts.retain_trajectories = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_finite(p, rs, N, SimGrid::make(p.T, 100), paths, rng, StrategyMode::DerivationConsistent, opts));
  }
  state.SetItemsProcessed(state.iterations() * paths);
}
BENCHMARK(BM_SimulateFinite)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
