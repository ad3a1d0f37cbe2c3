#include <regime_riccati/care.hpp>
#include <regime_riccati/reference_data.hpp>
#include <regime_riccati/sim.hpp>
#include <regime_riccati/stability.hpp>
#include <regime_riccati/synthesis.hpp>

#include <benchmark/benchmark.h>

using namespace regime_riccati;

namespace {

void BM_OpenRepCares(benchmark::State& state) {
  const GameModel m = normalized(builtin_example(1));
  for (auto _ : state) benchmark::DoNotOptimize(solve_open_rep_cares(m));
}
BENCHMARK(BM_OpenRepCares)->Unit(benchmark::kMillisecond);

void BM_ClosedNashCares(benchmark::State& state) {
  const GameModel m = normalized(builtin_example(1));
  for (auto _ : state) benchmark::DoNotOptimize(solve_closed_nash_cares(m));
}
BENCHMARK(BM_ClosedNashCares)->Unit(benchmark::kMillisecond);

void BM_ZeroSumCare(benchmark::State& state) {
  const GameModel m = normalized(builtin_example(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(solve_zero_sum_care(m));
}
BENCHMARK(BM_ZeroSumCare)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SpectralCheck(benchmark::State& state) {
  const GameModel m = builtin_example(1);
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_spectral_check(m.dynamics.A, m.dynamics.C, m.generator));
}
BENCHMARK(BM_SpectralCheck);

void BM_SampleRegimePath(benchmark::State& state) {
  const Generator gen{builtin_generator()};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(gen, 0, 10.0, ++seed));
}
BENCHMARK(BM_SampleRegimePath);

void BM_SimulatePaths(benchmark::State& state) {
  const GameModel m = normalized(builtin_example(2));
  const auto sol = solve_zero_sum_care(m);
  const StrategyPair strategy = zero_sum_strategy(m, sol);
  SimConfig cfg;
  cfg.paths = static_cast<int>(state.range(0));
  cfg.T = 10.0;
  cfg.dt = 1e-3;
  cfg.threads = 1;
  const Vector x0 = (Vector(2) << 1.0, 0.0).finished();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_closed_loop(m, strategy, x0, 0, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.paths);
}
BENCHMARK(BM_SimulatePaths)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
