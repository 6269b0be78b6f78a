#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lobmm/model.hpp"
#include "lobmm/solver.hpp"

namespace lobmm {

// Monte Carlo backtest configuration.  One Euler step covers dt seconds; all
// event probabilities are Bernoulli(intensity * dt), so dt times the largest
// total intensity must stay at or below one.
struct SimConfig {
  double T = 300.0;
  double dt = 0.3;
  long n_paths = 100000;
  std::uint64_t seed = 42;
  double x0 = 0.0;
  double y0 = 0.0;
  double p0 = 45.0;
  int i0 = 1;

  int n_steps() const;
  void validate(const MarketModel& model) const;
};

// A strategy maps the observed (t, y, spread state) to one action per step.
//  - PolicyStrategy follows a solved policy table (covers both the optimal
//    strategy and its no-market-order variant).
//  - ConstantStrategy always quotes both touches with a fixed size.
//  - RandomStrategy quotes a fixed size at a uniformly chosen admissible level
//    on each side, refreshed every step.
struct PolicyStrategy {
  const PolicyTable* table = nullptr;
};
struct ConstantStrategy {
  double lot = 100.0;
};
struct RandomStrategy {
  double lot = 100.0;
};
using Strategy = std::variant<PolicyStrategy, ConstantStrategy, RandomStrategy>;

// Everything needed to re-price one cash movement after the fact.
struct PathEvent {
  enum class Kind : std::uint8_t { bid_fill, ask_fill, take, liquidate };
  Kind kind;
  double t;
  int state;       // spread state used for pricing
  int quote;       // QuoteBid/QuoteAsk enum value for fills, unused for takes
  double size;     // shares; signed for takes (buy > 0)
  double price;    // mid price used for pricing
};

struct PathResult {
  double x_T = 0;        // cash after terminal liquidation
  long n_bid = 0;        // passive bid executions
  long n_ask = 0;        // passive ask executions
  long n_market = 0;     // market orders, terminal liquidation included
  double max_abs_y = 0;  // running sup of |inventory|
  double p_T = 0;        // final mid price
  long n_clamped = 0;    // policy lookups outside the inventory grid
};

struct Stat {
  double mean = 0;
  double sd = 0;  // population standard deviation
};

struct BacktestStats {
  long n_paths = 0;
  Stat x_T, n_bid, n_ask, n_market, max_abs_y, p_T;
  long clamped_total = 0;
};

// Simulates one path.  Each path derives its random streams from
// (config.seed, path_index) only, so any execution order gives identical
// results.  When `events` is non-null every cash movement is appended to it.
PathResult run_path(const MarketModel& model, const Strategy& strategy, const SimConfig& config,
                    long path_index, std::vector<PathEvent>* events = nullptr);

// Runs all paths, optionally across threads; the result vector is ordered by
// path index and byte-identical for any thread count.
std::vector<PathResult> run_paths(const MarketModel& model, const Strategy& strategy,
                                  const SimConfig& config, int n_threads = 1);

BacktestStats summarize(const std::vector<PathResult>& paths);

BacktestStats run_backtest(const MarketModel& model, const Strategy& strategy,
                           const SimConfig& config, int n_threads = 1);

// Re-prices a recorded event sequence through the model arithmetic; returns
// the final cash.  Matches run_path's x_T exactly by construction.
double replay_events(const std::vector<PathEvent>& events, const MarketModel& model, double x0);

// The four benchmarked strategies run under common random numbers.
struct SuiteResult {
  BacktestStats star, womo, constant, random;
};

SuiteResult benchmark_suite(const MarketModel& model, const PolicyTable& star,
                            const PolicyTable& womo, const SimConfig& config, double lot,
                            int n_threads = 1);

// One row per statistic, one column per strategy.
std::string stats_table_csv(const SuiteResult& suite);

// Per-path dump: path,x_T,n_bid,n_ask,n_market,max_abs_y.
std::string paths_csv(const std::vector<PathResult>& paths);

}  // namespace lobmm
