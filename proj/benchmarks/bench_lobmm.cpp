// Throughput benchmarks for the hot paths: the dynamic-programming solve, the
// Monte Carlo backtest and the tick-data estimators.

#include <benchmark/benchmark.h>

#include <vector>

#include "lobmm/calibration.hpp"
#include "lobmm/simulator.hpp"
#include "lobmm/solver.hpp"
#include "support/reference_model.hpp"
#include "support/synthetic_ticks.hpp"

using namespace lobmm;

namespace {

const MarketModel& sym_model() {
  static const MarketModel model = symmetrize(testsupport::make_reference_model());
  return model;
}

void BM_SolveMeanDefault(benchmark::State& state) {
  const SolverGrid grid;  // 201 inventory nodes, 6 spread states, 100 slices
  const SolverParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mean_criterion(sym_model(), grid, params));
  }
}
BENCHMARK(BM_SolveMeanDefault)->Unit(benchmark::kMillisecond);

void BM_SolveMeanCoarse(benchmark::State& state) {
  const SolverGrid grid{1000.0, 20.0};
  SolverParams params;
  params.n_out = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mean_criterion(sym_model(), grid, params));
  }
}
BENCHMARK(BM_SolveMeanCoarse)->Unit(benchmark::kMillisecond);

void BM_SolveExponential(benchmark::State& state) {
  const SolverGrid grid{1000.0, 20.0};
  SolverParams params;
  params.n_out = 50;
  params.gamma = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_exponential(sym_model(), grid, params));
  }
}
BENCHMARK(BM_SolveExponential)->Unit(benchmark::kMillisecond);

void BM_BacktestConstant(benchmark::State& state) {
  SimConfig config;
  config.n_paths = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_paths(sym_model(), Strategy{ConstantStrategy{100.0}}, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BacktestConstant)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_BacktestPolicy(benchmark::State& state) {
  static const SolveResult solved = solve_mean_criterion(sym_model(), SolverGrid{}, SolverParams{});
  SimConfig config;
  config.n_paths = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_paths(sym_model(), Strategy{PolicyStrategy{&solved.policy}}, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BacktestPolicy)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EstimateTransitions(benchmark::State& state) {
  static const SpreadJumpSeries series = testsupport::series_from_states(
      testsupport::simulate_chain(testsupport::normalized_rho(), 100000, 17), testsupport::kM);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_transition_matrix(series, testsupport::kM));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(series.n_jumps()));
}
BENCHMARK(BM_EstimateTransitions)->Unit(benchmark::kMillisecond);

void BM_ExecutionProxies(benchmark::State& state) {
  static const std::vector<TickRecord> ticks = [] {
    testsupport::TickGenConfig cfg;
    cfg.model = testsupport::make_reference_model();
    cfg.t_end = 50000.0;
    cfg.seed = 19;
    return testsupport::generate_ticks(cfg);
  }();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_execution_proxies(ticks, sym_model().grid, 100.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ticks.size()));
}
BENCHMARK(BM_ExecutionProxies)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
