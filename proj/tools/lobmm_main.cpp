// Command line front end: calibrate a market model from tick data, solve for
// quoting policies, run Monte Carlo backtests, sweep the efficient frontier,
// and export plot-ready tables.  Exit codes: 0 success, 1 runtime or data
// failure, 2 usage or validation error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lobmm/analytics.hpp"
#include "lobmm/calibration.hpp"
#include "lobmm/io_util.hpp"
#include "lobmm/model.hpp"
#include "lobmm/model_io.hpp"
#include "lobmm/policy_io.hpp"
#include "lobmm/simulator.hpp"
#include "lobmm/solver.hpp"

namespace {

using namespace lobmm;

std::string stats_rows_csv(const BacktestStats& s) {
  std::string out = "statistic,value\n";
  const auto row = [&out](const char* name, double v) {
    out += name;
    out += ',';
    out += fmt_double(v);
    out += '\n';
  };
  row("mean_x_T", s.x_T.mean);
  row("std_x_T", s.x_T.sd);
  row("mean_n_bid", s.n_bid.mean);
  row("std_n_bid", s.n_bid.sd);
  row("mean_n_ask", s.n_ask.mean);
  row("std_n_ask", s.n_ask.sd);
  row("mean_n_market", s.n_market.mean);
  row("std_n_market", s.n_market.sd);
  row("mean_sup_abs_y", s.max_abs_y.mean);
  row("std_sup_abs_y", s.max_abs_y.sd);
  row("ir", s.x_T.sd > 0 ? s.x_T.mean / s.x_T.sd
                         : std::numeric_limits<double>::quiet_NaN());
  return out;
}

struct CalibrateArgs {
  std::string input;
  std::string out;
  std::string report;
  double delta = 0.005;
  int m = 6;
  double v0 = 100.0;
  std::vector<double> buckets;
  bool symmetrize = false;
  double session_gap = 4.0 * 3600.0;
  double rebate = 0.0008;
  double fee = 0.0012;
  double fixed_fee = 1e-6;
  double sigma = 0.0015;
  double p0 = 45.0;
};

void cmd_calibrate(const CalibrateArgs& a) {
  const auto ticks = read_ticks_csv(a.input);
  if (ticks.empty()) throw std::invalid_argument("calibrate: input contains no tick records");

  CalibrationConfig config;
  config.grid = SpreadGrid{a.delta, a.m};
  config.v0 = a.v0;
  config.clock_boundaries = a.buckets;
  config.fees = FeeSchedule{a.rebate, a.fee, a.fixed_fee};
  config.price = PriceModel{PriceModel::Kind::martingale, 0.0, a.sigma, a.p0};
  config.symmetrize = a.symmetrize;
  config.session_gap = a.session_gap;

  const CalibrationResult result = calibrate(ticks, config);
  save_market_model(result.model, a.out);

  std::filesystem::path report_path = a.report;
  if (report_path.empty()) {
    report_path = a.out;
    report_path.replace_extension("");
    report_path += "_report.json";
  }
  save_calibration_report(result.report, report_path);
}

struct SolveArgs {
  std::string model;
  std::string out;
  std::string values;
  std::string objective = "mean";
  double gamma = 5.0;
  double eta = 1.0;
  double T = 300.0;
  int n_out = 100;
  double y_max = 1000.0;
  double dy = 10.0;
  double lbar = 100.0;
  double ebar = 100.0;
  double inventory_unit = 1000.0;
};

void cmd_solve(const SolveArgs& a) {
  const MarketModel model = load_market_model(a.model);
  const SolverGrid grid{a.y_max, a.dy};
  SolverParams params;
  params.gamma = a.gamma;
  params.eta = a.eta;
  params.T = a.T;
  params.n_out = a.n_out;
  params.lot_max = a.lbar;
  params.take_max = a.ebar;
  params.inventory_unit = a.inventory_unit;

  const Criterion criterion = criterion_from_string(a.objective);
  const SolveResult result = criterion == Criterion::mean
                                 ? solve_mean_criterion(model, grid, params)
                                 : solve_exponential(model, grid, params);
  save_policy(result.policy, a.out);
  if (!a.values.empty()) write_file_atomic(a.values, value_surface_to_csv(result.value));
}

struct BacktestArgs {
  std::string model;
  std::string policy;
  std::string policy_womo;
  std::string out;
  std::string dump_paths;
  std::string strategy = "suite";
  long paths = 100000;
  std::uint64_t seed = 42;
  int threads = 1;
  double T = 300.0;
  double dt = 0.3;
  double x0 = 0.0;
  double y0 = 0.0;
  double p0 = 0.0;  // 0 means "use the model's reference price"
  int i0 = 1;
  double lot = 100.0;
};

void cmd_backtest(const BacktestArgs& a) {
  const MarketModel model = load_market_model(a.model);

  SimConfig config;
  config.T = a.T;
  config.dt = a.dt;
  config.n_paths = a.paths;
  config.seed = a.seed;
  config.x0 = a.x0;
  config.y0 = a.y0;
  config.p0 = a.p0 > 0 ? a.p0 : model.price.p0;
  config.i0 = a.i0;

  std::optional<PolicyTable> star;
  std::optional<PolicyTable> womo;
  if (!a.policy.empty()) star = load_policy(a.policy);
  if (!a.policy_womo.empty()) womo = load_policy(a.policy_womo);

  if (a.strategy == "suite") {
    if (!star || !womo)
      throw std::invalid_argument("backtest: --strategy suite needs --policy and --policy-womo");
    const SuiteResult suite = benchmark_suite(model, *star, *womo, config, a.lot, a.threads);
    write_file_atomic(a.out, stats_table_csv(suite));
    if (!a.dump_paths.empty()) {
      const auto paths = run_paths(model, Strategy{PolicyStrategy{&*star}}, config, a.threads);
      write_file_atomic(a.dump_paths, paths_csv(paths));
    }
    return;
  }

  Strategy strategy{ConstantStrategy{a.lot}};
  if (a.strategy == "star") {
    if (!star) throw std::invalid_argument("backtest: --strategy star needs --policy");
    strategy = PolicyStrategy{&*star};
  } else if (a.strategy == "womo") {
    if (!womo) throw std::invalid_argument("backtest: --strategy womo needs --policy-womo");
    strategy = PolicyStrategy{&*womo};
  } else if (a.strategy == "constant") {
    strategy = ConstantStrategy{a.lot};
  } else if (a.strategy == "random") {
    strategy = RandomStrategy{a.lot};
  } else {
    throw std::invalid_argument("backtest: unknown strategy '" + a.strategy + "'");
  }

  const auto paths = run_paths(model, strategy, config, a.threads);
  write_file_atomic(a.out, stats_rows_csv(summarize(paths)));
  if (!a.dump_paths.empty()) write_file_atomic(a.dump_paths, paths_csv(paths));
}

struct FrontierArgs {
  std::string model;
  std::string out;
  std::vector<double> gammas = {50.0,  25.0,  12.5,  6.25,  3.125, 1.563, 0.781,
                                0.391, 0.195, 0.098, 0.049, 0.024, 0.012, 0.006};
  long paths = 10000;
  std::uint64_t seed = 42;
  int threads = 1;
  double T = 300.0;
  double dt = 0.3;
  int n_out = 100;
  double y_max = 1000.0;
  double dy = 10.0;
  double lbar = 100.0;
  double ebar = 100.0;
  double inventory_unit = 1000.0;
  double lot = 100.0;
  double p0 = 0.0;
  int i0 = 1;
};

void cmd_frontier(const FrontierArgs& a) {
  const MarketModel model = load_market_model(a.model);
  const SolverGrid grid{a.y_max, a.dy};

  FrontierConfig config;
  config.solver.eta = 0.0;
  config.solver.T = a.T;
  config.solver.n_out = a.n_out;
  config.solver.lot_max = a.lbar;
  config.solver.take_max = a.ebar;
  config.solver.inventory_unit = a.inventory_unit;
  config.sim.T = a.T;
  config.sim.dt = a.dt;
  config.sim.n_paths = a.paths;
  config.sim.seed = a.seed;
  config.sim.p0 = a.p0 > 0 ? a.p0 : model.price.p0;
  config.sim.i0 = a.i0;
  config.lot = a.lot;
  config.n_threads = a.threads;

  const auto rows = efficient_frontier(model, a.gammas, grid, config);
  write_file_atomic(a.out, frontier_csv(rows));
}

struct ExportArgs {
  std::string policy;
  double slice = 0.0;
  std::string out;
  std::string stats;
  std::string hist;
  int bins = 50;
};

void cmd_export(const ExportArgs& a) {
  const bool policy_mode = !a.policy.empty();
  const bool hist_mode = !a.stats.empty();
  if (policy_mode == hist_mode)
    throw std::invalid_argument("export: pass exactly one of --policy or --stats");

  if (policy_mode) {
    if (a.out.empty()) throw std::invalid_argument("export: --policy needs --out");
    const PolicyTable policy = load_policy(a.policy);
    write_file_atomic(a.out, policy_heatmap_csv(policy, a.slice));
    return;
  }

  if (a.hist.empty()) throw std::invalid_argument("export: --stats needs --hist");
  const std::string text = read_file(a.stats);
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0].rfind("path,x_T", 0) != 0)
    throw std::invalid_argument("export: --stats expects a per-path CSV starting with path,x_T");
  std::vector<double> values;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto fields = split(lines[n], ',');
    if (fields.size() < 2)
      throw std::invalid_argument("export: malformed per-path row " + std::to_string(n + 1));
    std::size_t used = 0;
    const double v = std::stod(fields[1], &used);
    if (used != fields[1].size())
      throw std::invalid_argument("export: malformed x_T value on row " + std::to_string(n + 1));
    values.push_back(v);
  }
  write_file_atomic(a.hist, wealth_histogram(values, a.bins));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Market making toolkit: spread-model calibration, quoting policy solver, "
               "Monte Carlo backtests"};
  app.require_subcommand(1);

  CalibrateArgs cal;
  CLI::App* cal_cmd = app.add_subcommand(
      "calibrate", "Estimate a market model from level-1 tick data");
  cal_cmd->add_option("--input", cal.input, "Tick CSV: ts,bid,ask,bid_sz,ask_sz,buy_vol,sell_vol")
      ->required();
  cal_cmd->add_option("--out", cal.out, "Output model JSON")->required();
  cal_cmd->add_option("--report", cal.report,
                      "Output calibration report JSON (default: <out>_report.json)");
  cal_cmd->add_option("--delta", cal.delta, "Tick size")->capture_default_str();
  cal_cmd->add_option("--m", cal.m, "Number of spread states")->capture_default_str();
  cal_cmd->add_option("--v0", cal.v0, "Reference volume for the execution proxies")
      ->capture_default_str();
  cal_cmd->add_option("--buckets", cal.buckets,
                      "Intraday clock bucket boundaries in seconds (default: one bucket)")
      ->delimiter(',');
  cal_cmd->add_flag("--symmetrize", cal.symmetrize,
                    "Average mirrored bid/ask intensities in the output model");
  cal_cmd->add_option("--session-gap", cal.session_gap,
                      "Gap in seconds that starts a new session")
      ->capture_default_str();
  cal_cmd->add_option("--rebate", cal.rebate, "Per-share rebate on passive fills")
      ->capture_default_str();
  cal_cmd->add_option("--fee", cal.fee, "Per-share fee on market orders")->capture_default_str();
  cal_cmd->add_option("--fixed-fee", cal.fixed_fee, "Fixed fee per market order")
      ->capture_default_str();
  cal_cmd->add_option("--sigma", cal.sigma, "Mid-price volatility per sqrt second")
      ->capture_default_str();
  cal_cmd->add_option("--p0", cal.p0, "Reference mid price")->capture_default_str();

  SolveArgs sol;
  CLI::App* sol_cmd =
      app.add_subcommand("solve", "Compute the optimal quoting policy for a model");
  sol_cmd->add_option("--model", sol.model, "Model JSON from calibrate")->required();
  sol_cmd->add_option("--out", sol.out, "Output policy JSON")->required();
  sol_cmd->add_option("--dump-values", sol.values, "Also write the value surface CSV here");
  sol_cmd->add_option("--objective", sol.objective, "mean or exponential")
      ->capture_default_str();
  sol_cmd->add_option("--gamma", sol.gamma, "Inventory penalty weight (mean objective)")
      ->capture_default_str();
  sol_cmd->add_option("--eta", sol.eta, "Risk aversion (exponential objective)")
      ->capture_default_str();
  sol_cmd->add_option("--T", sol.T, "Trading horizon in seconds")->capture_default_str();
  sol_cmd->add_option("--n-out", sol.n_out, "Stored policy intervals")->capture_default_str();
  sol_cmd->add_option("--y-max", sol.y_max, "Inventory grid bound in shares")
      ->capture_default_str();
  sol_cmd->add_option("--dy", sol.dy, "Inventory grid step in shares")->capture_default_str();
  sol_cmd->add_option("--lbar", sol.lbar, "Largest passive order size")->capture_default_str();
  sol_cmd->add_option("--ebar", sol.ebar, "Largest market order size (0 disables them)")
      ->capture_default_str();
  sol_cmd->add_option("--inventory-unit", sol.inventory_unit,
                      "Shares per unit in the quadratic inventory penalty")
      ->capture_default_str();

  BacktestArgs bt;
  CLI::App* bt_cmd = app.add_subcommand("backtest", "Monte Carlo backtest of one or all strategies");
  bt_cmd->add_option("--model", bt.model, "Model JSON")->required();
  bt_cmd->add_option("--policy", bt.policy, "Policy JSON for the optimal strategy");
  bt_cmd->add_option("--policy-womo", bt.policy_womo,
                     "Policy JSON solved without market orders");
  bt_cmd->add_option("--out", bt.out, "Output statistics CSV")->required();
  bt_cmd->add_option("--dump-paths", bt.dump_paths,
                     "Also write per-path results here (optimal strategy when --strategy suite)");
  bt_cmd->add_option("--strategy", bt.strategy, "suite, star, womo, constant or random")
      ->capture_default_str();
  bt_cmd->add_option("--paths", bt.paths, "Number of Monte Carlo paths")->capture_default_str();
  bt_cmd->add_option("--seed", bt.seed, "Random seed")->capture_default_str();
  bt_cmd->add_option("--threads", bt.threads, "Worker threads (any value gives identical output)")
      ->capture_default_str();
  bt_cmd->add_option("--T", bt.T, "Horizon in seconds")->capture_default_str();
  bt_cmd->add_option("--dt", bt.dt, "Euler step in seconds")->capture_default_str();
  bt_cmd->add_option("--x0", bt.x0, "Initial cash")->capture_default_str();
  bt_cmd->add_option("--y0", bt.y0, "Initial inventory in shares")->capture_default_str();
  bt_cmd->add_option("--p0", bt.p0, "Initial mid price (default: model value)");
  bt_cmd->add_option("--i0", bt.i0, "Initial spread state")->capture_default_str();
  bt_cmd->add_option("--lot", bt.lot, "Quote size of the constant and random strategies")
      ->capture_default_str();

  FrontierArgs fr;
  CLI::App* fr_cmd =
      app.add_subcommand("frontier", "Risk/return sweep over the inventory penalty");
  fr_cmd->add_option("--model", fr.model, "Model JSON")->required();
  fr_cmd->add_option("--out", fr.out, "Output frontier CSV")->required();
  fr_cmd->add_option("--gammas", fr.gammas, "Penalty weights, descending output order")
      ->delimiter(',');
  fr_cmd->add_option("--paths", fr.paths, "Monte Carlo paths per point")->capture_default_str();
  fr_cmd->add_option("--seed", fr.seed, "Random seed shared by all points")
      ->capture_default_str();
  fr_cmd->add_option("--threads", fr.threads, "Worker threads (any value gives identical output)")
      ->capture_default_str();
  fr_cmd->add_option("--T", fr.T, "Horizon in seconds")->capture_default_str();
  fr_cmd->add_option("--dt", fr.dt, "Euler step in seconds")->capture_default_str();
  fr_cmd->add_option("--n-out", fr.n_out, "Stored policy intervals")->capture_default_str();
  fr_cmd->add_option("--y-max", fr.y_max, "Inventory grid bound in shares")
      ->capture_default_str();
  fr_cmd->add_option("--dy", fr.dy, "Inventory grid step in shares")->capture_default_str();
  fr_cmd->add_option("--lbar", fr.lbar, "Largest passive order size")->capture_default_str();
  fr_cmd->add_option("--ebar", fr.ebar, "Largest market order size")->capture_default_str();
  fr_cmd->add_option("--inventory-unit", fr.inventory_unit,
                     "Shares per unit in the quadratic inventory penalty")
      ->capture_default_str();
  fr_cmd->add_option("--lot", fr.lot, "Constant-benchmark quote size")->capture_default_str();
  fr_cmd->add_option("--p0", fr.p0, "Initial mid price (default: model value)");
  fr_cmd->add_option("--i0", fr.i0, "Initial spread state")->capture_default_str();

  ExportArgs ex;
  CLI::App* ex_cmd = app.add_subcommand("export", "Plot-ready tables from solved artifacts");
  ex_cmd->add_option("--policy", ex.policy, "Policy JSON to slice into a heatmap");
  ex_cmd->add_option("--slice", ex.slice, "Time of the policy slice in seconds")
      ->capture_default_str();
  ex_cmd->add_option("--out", ex.out, "Output heatmap CSV");
  ex_cmd->add_option("--stats", ex.stats, "Per-path CSV to aggregate into a histogram");
  ex_cmd->add_option("--hist", ex.hist, "Output histogram CSV");
  ex_cmd->add_option("--bins", ex.bins, "Histogram bin count")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cal_cmd->parsed()) cmd_calibrate(cal);
    if (sol_cmd->parsed()) cmd_solve(sol);
    if (bt_cmd->parsed()) cmd_backtest(bt);
    if (fr_cmd->parsed()) cmd_frontier(fr);
    if (ex_cmd->parsed()) cmd_export(ex);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
