#pragma once

#include <string>
#include <vector>

#include "lobmm/model.hpp"
#include "lobmm/simulator.hpp"
#include "lobmm/solver.hpp"

namespace lobmm {

// Mean over standard deviation; the denominator must be positive.
double information_ratio(const Stat& wealth);

// Information ratio after subtracting a benchmark's mean from the numerator.
double net_information_ratio(const Stat& wealth, const Stat& benchmark);

// One risk-aversion point of the efficient frontier: moments of the optimal
// strategy and of its no-market-order variant, plus the two ratios.
struct FrontierRow {
  double gamma = 0;
  double sigma_star = 0;
  double mean_star = 0;
  double sigma_womo = 0;
  double mean_womo = 0;
  double ir = 0;
  double nir = 0;
};

struct FrontierConfig {
  SolverParams solver;  // gamma is overwritten per row
  SimConfig sim;
  double lot = 100.0;  // constant-strategy size used for the NIR benchmark
  int n_threads = 1;
};

// For each penalty weight (processed in descending order): solve the optimal
// policy and the no-market-order policy, verify the solver-level dominance of
// the richer action set, and backtest both against a shared constant-strategy
// benchmark on common random numbers.
std::vector<FrontierRow> efficient_frontier(const MarketModel& model, std::vector<double> gammas,
                                            const SolverGrid& grid, const FrontierConfig& config);

// CSV with header gamma,sigma_star,mean_star,sigma_womo,mean_womo,ir,nir.
std::string frontier_csv(const std::vector<FrontierRow>& rows);

// One row per (inventory node, spread state) of the policy slice covering
// time t: y,i,zone,qb,qa,lb,la,e with zone M (quote) or T (market order).
std::string policy_heatmap_csv(const PolicyTable& policy, double t);

// Equal-width histogram: bin_lo,bin_hi,count rows covering [min, max].
std::string wealth_histogram(const std::vector<double>& values, int bins);

}  // namespace lobmm
