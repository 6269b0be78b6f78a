#include "lobmm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "lobmm/io_util.hpp"

namespace lobmm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("analytics: ") + what);
}

}  // namespace

double information_ratio(const Stat& wealth) {
  require(std::isfinite(wealth.sd) && wealth.sd > 0,
          "information ratio needs a positive standard deviation");
  return wealth.mean / wealth.sd;
}

double net_information_ratio(const Stat& wealth, const Stat& benchmark) {
  require(std::isfinite(wealth.sd) && wealth.sd > 0,
          "information ratio needs a positive standard deviation");
  return (wealth.mean - benchmark.mean) / wealth.sd;
}

std::vector<FrontierRow> efficient_frontier(const MarketModel& model, std::vector<double> gammas,
                                            const SolverGrid& grid, const FrontierConfig& config) {
  require(!gammas.empty(), "frontier needs at least one gamma");
  for (double g : gammas) require(std::isfinite(g) && g > 0, "frontier gammas must be positive");
  std::sort(gammas.begin(), gammas.end(), std::greater<double>());

  // The constant benchmark does not depend on gamma; one run is shared by
  // every row so all strategies face identical randomness.
  const BacktestStats bench =
      run_backtest(model, Strategy{ConstantStrategy{config.lot}}, config.sim, config.n_threads);

  std::vector<FrontierRow> rows;
  rows.reserve(gammas.size());
  for (double g : gammas) {
    SolverParams star_params = config.solver;
    star_params.gamma = g;
    SolverParams womo_params = star_params;
    womo_params.take_max = 0.0;

    const SolveResult star = solve_mean_criterion(model, grid, star_params);
    const SolveResult womo = solve_mean_criterion(model, grid, womo_params);

    // Removing market orders can only shrink the value; anything else means
    // the solve is inconsistent.
    for (std::size_t n = 0; n < star.value.data.size(); ++n) {
      if (!(womo.value.data[n] <= star.value.data[n] + 1e-9))
        throw std::runtime_error(
            "analytics: no-market-order value exceeds the unrestricted value");
    }

    const BacktestStats bs =
        run_backtest(model, Strategy{PolicyStrategy{&star.policy}}, config.sim, config.n_threads);
    const BacktestStats bw =
        run_backtest(model, Strategy{PolicyStrategy{&womo.policy}}, config.sim, config.n_threads);

    FrontierRow row;
    row.gamma = g;
    row.sigma_star = bs.x_T.sd;
    row.mean_star = bs.x_T.mean;
    row.sigma_womo = bw.x_T.sd;
    row.mean_womo = bw.x_T.mean;
    row.ir = information_ratio(bs.x_T);
    row.nir = net_information_ratio(bs.x_T, bench.x_T);
    rows.push_back(row);
  }
  return rows;
}

std::string frontier_csv(const std::vector<FrontierRow>& rows) {
  std::string out = "gamma,sigma_star,mean_star,sigma_womo,mean_womo,ir,nir\n";
  for (const FrontierRow& r : rows) {
    out += fmt_double(r.gamma);
    out += ',';
    out += fmt_double(r.sigma_star);
    out += ',';
    out += fmt_double(r.mean_star);
    out += ',';
    out += fmt_double(r.sigma_womo);
    out += ',';
    out += fmt_double(r.mean_womo);
    out += ',';
    out += fmt_double(r.ir);
    out += ',';
    out += fmt_double(r.nir);
    out += '\n';
  }
  return out;
}

std::string policy_heatmap_csv(const PolicyTable& policy, double t) {
  require(policy.m >= 1 && !policy.actions.empty(), "heatmap needs a populated policy");
  require(std::isfinite(t) && t >= 0 && t <= policy.T, "heatmap time must lie within the horizon");
  const int slice = policy.slice_of(t);
  std::string out = "y,i,zone,qb,qa,lb,la,e\n";
  for (int iy = 0; iy < policy.grid.n_y(); ++iy) {
    for (int i = 1; i <= policy.m; ++i) {
      const Action& a = policy.at(slice, iy, i);
      out += fmt_double(policy.grid.y(iy));
      out += ',';
      out += std::to_string(i);
      if (const MakeAction* mk = std::get_if<MakeAction>(&a)) {
        out += ",M,";
        out += to_string(mk->qb);
        out += ',';
        out += to_string(mk->qa);
        out += ',';
        out += fmt_double(mk->lb);
        out += ',';
        out += fmt_double(mk->la);
        out += ",0\n";
      } else {
        out += ",T,,,0,0,";
        out += fmt_double(std::get<TakeAction>(a).e);
        out += '\n';
      }
    }
  }
  return out;
}

std::string wealth_histogram(const std::vector<double>& values, int bins) {
  require(!values.empty(), "histogram needs at least one value");
  require(bins >= 1, "histogram needs at least one bin");
  for (double v : values) require(std::isfinite(v), "histogram values must be finite");

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  if (hi == lo) {
    // Degenerate range: everything lands in the first bin.
    counts[0] = static_cast<long>(values.size());
  } else {
    const double width = (hi - lo) / bins;
    for (double v : values) {
      int b = static_cast<int>((v - lo) / width);
      b = std::clamp(b, 0, bins - 1);
      ++counts[static_cast<std::size_t>(b)];
    }
  }

  std::string out = "bin_lo,bin_hi,count\n";
  for (int b = 0; b < bins; ++b) {
    const double width = hi == lo ? 0.0 : (hi - lo) / bins;
    const double b_lo = lo + b * width;
    const double b_hi = b + 1 == bins ? hi : lo + (b + 1) * width;
    out += fmt_double(b_lo);
    out += ',';
    out += fmt_double(b_hi);
    out += ',';
    out += std::to_string(counts[static_cast<std::size_t>(b)]);
    out += '\n';
  }
  return out;
}

}  // namespace lobmm
