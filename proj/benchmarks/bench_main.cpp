#include <benchmark/benchmark.h>

#include <vector>

#include "switchjump/analysis.hpp"
#include "switchjump/hybrid_sim.hpp"
#include "switchjump/presets.hpp"
#include "switchjump/rng.hpp"

using namespace switchjump;

namespace {

void BM_PhiloxUniform(benchmark::State& state) {
  RandomStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_PhiloxUniform);

void BM_SimulateTwoState(benchmark::State& state) {
  const auto model = two_state_linear_model();
  SimConfig cfg;
  cfg.horizon = 5.0;
  cfg.n_paths = static_cast<std::size_t>(state.range(0));
  const std::vector<double> x0{1.0};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_hybrid(model, x0, 1, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateTwoState)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SimulateLorenz(benchmark::State& state) {
  const auto model = lorenz_model(LorenzParams::classic());
  SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.dt = 1e-3;
  cfg.n_paths = 100;
  const std::vector<double> x0{1.0, 1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_hybrid(model, x0, 1, cfg));
}
BENCHMARK(BM_SimulateLorenz)->Unit(benchmark::kMillisecond);

void BM_EnergyPermutation(benchmark::State& state) {
  const auto model = two_state_linear_model();
  SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.n_paths = static_cast<std::size_t>(state.range(0));
  const std::vector<double> x0{1.0};
  const auto a = empirical_law_at(simulate_hybrid(model, x0, 1, cfg), 1.0);
  cfg.seed = 2;
  const auto b = empirical_law_at(simulate_hybrid(model, x0, 1, cfg), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(energy_permutation_test(a, b, 99, 7));
}
BENCHMARK(BM_EnergyPermutation)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SeriesTransition(benchmark::State& state) {
  Eigen::MatrixXd q(3, 3);
  q << -1.5, 1.0, 0.5, 1.0, -1.0, 0.0, 1.0, 0.0, -1.0;
  const CTMCOracle oracle(q);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(series_transition(oracle, 1, 2, 0.0, 1.0, n));
}
BENCHMARK(BM_SeriesTransition)->Arg(5)->Arg(10)->Arg(20);

}  // namespace
BENCHMARK_MAIN();
