#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lobmm/analytics.hpp"
#include "lobmm/calibration.hpp"
#include "lobmm/simulator.hpp"
#include "lobmm/solver.hpp"
#include "support/reference_model.hpp"

using namespace lobmm;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("information ratio") {
  CHECK(information_ratio({26.759, 12.634}) == doctest::Approx(2.118).epsilon(1e-3));
  CHECK(information_ratio({0.0, 3.0}) == 0.0);
  CHECK(information_ratio({24.314, 51.482}) == doctest::Approx(0.472).epsilon(1e-3));
  CHECK_THROWS_AS(information_ratio({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(information_ratio({1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("net information ratio") {
  const Stat wealth{29.952, 19.088};
  CHECK(net_information_ratio(wealth, wealth) == 0.0);
  CHECK(net_information_ratio(wealth, {24.32, 50.0}) == doctest::Approx(0.295).epsilon(1e-2));
  // A positive benchmark mean always pulls the net ratio below the plain one.
  CHECK(net_information_ratio(wealth, {24.32, 50.0}) < information_ratio(wealth));
  CHECK_THROWS_AS(net_information_ratio({1.0, 0.0}, wealth), std::invalid_argument);
}

TEST_CASE("efficient frontier rows, ordering, and ratio consistency") {
  const MarketModel model = symmetrize(testsupport::make_reference_model());
  const SolverGrid grid{200.0, 10.0};
  FrontierConfig config;
  config.solver.T = 30.0;
  config.solver.n_out = 10;
  config.sim.T = 30.0;
  config.sim.n_paths = 200;

  const auto rows = efficient_frontier(model, {0.5, 50.0, 5.0}, grid, config);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].gamma == 50.0);
  CHECK(rows[1].gamma == 5.0);
  CHECK(rows[2].gamma == 0.5);
  for (const FrontierRow& r : rows) {
    CHECK(r.sigma_star >= 0.0);
    CHECK(r.sigma_womo >= 0.0);
    CHECK(r.ir == doctest::Approx(r.mean_star / r.sigma_star).epsilon(1e-12));
  }
  // Lighter penalties allow wider inventory swings.
  CHECK(rows[0].sigma_star < rows[2].sigma_star);

  // The net ratio offsets by the shared constant-strategy benchmark, which is
  // reproducible from the same seed.
  const BacktestStats bench =
      run_backtest(model, Strategy{ConstantStrategy{config.lot}}, config.sim, 1);
  for (const FrontierRow& r : rows) {
    CHECK(r.nir == doctest::Approx(r.ir - bench.x_T.mean / r.sigma_star).epsilon(1e-12));
  }

  CHECK_THROWS_AS(efficient_frontier(model, {}, grid, config), std::invalid_argument);
  CHECK_THROWS_AS(efficient_frontier(model, {1.0, -2.0}, grid, config), std::invalid_argument);
}

TEST_CASE("frontier CSV layout") {
  std::vector<FrontierRow> rows(2);
  rows[0] = {50.0, 2.25, 8.0, 2.0, 7.5, 3.5, -7.4};
  rows[1] = {0.006, 10.26, 35.6, 9.9, 34.0, 3.47, 1.02};
  const std::string csv = frontier_csv(rows);
  const auto lines = lines_of(csv);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "gamma,sigma_star,mean_star,sigma_womo,mean_womo,ir,nir");
  CHECK(lines[1].rfind("50,", 0) == 0);
  CHECK(std::strtod(lines[2].c_str(), nullptr) == 0.006);
}

TEST_CASE("policy heatmap export") {
  const MarketModel model = symmetrize(testsupport::make_reference_model());
  const SolverGrid grid{200.0, 10.0};
  SolverParams params;
  params.T = 30.0;
  params.n_out = 10;
  const auto star = solve_mean_criterion(model, grid, params);

  const std::string csv = policy_heatmap_csv(star.policy, 0.0);
  const auto lines = lines_of(csv);
  REQUIRE(lines.size() == 1u + 41u * 6u);
  CHECK(lines[0] == "y,i,zone,qb,qa,lb,la,e");
  CHECK(lines[1].rfind("-200,1,T", 0) == 0);

  // Symmetric model: the zone map is even in inventory.
  std::map<std::pair<double, int>, char> zone;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    std::istringstream in(lines[n]);
    std::string y_s, i_s, z_s;
    std::getline(in, y_s, ',');
    std::getline(in, i_s, ',');
    std::getline(in, z_s, ',');
    zone[{std::strtod(y_s.c_str(), nullptr), std::atoi(i_s.c_str())}] = z_s[0];
  }
  bool has_make = false, has_take = false;
  for (int iy = 0; iy < grid.n_y(); ++iy) {
    for (int i = 1; i <= 6; ++i) {
      const char z = zone.at({grid.y(iy), i});
      CHECK(z == zone.at({-grid.y(iy), i}));
      has_make = has_make || z == 'M';
      has_take = has_take || z == 'T';
    }
  }
  CHECK(has_make);
  CHECK(has_take);

  // Without market orders every zone is a quote.
  SolverParams womo_params = params;
  womo_params.take_max = 0.0;
  const auto womo = solve_mean_criterion(model, grid, womo_params);
  const std::string womo_csv = policy_heatmap_csv(womo.policy, 15.0);
  for (const std::string& line : lines_of(womo_csv)) {
    CHECK(line.find(",T,") == std::string::npos);
  }

  CHECK_THROWS_AS(policy_heatmap_csv(star.policy, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(policy_heatmap_csv(star.policy, 31.0), std::invalid_argument);
  CHECK_THROWS_AS(policy_heatmap_csv(PolicyTable{}, 0.0), std::invalid_argument);
}

TEST_CASE("wealth histogram") {
  SUBCASE("identical values occupy a single bin") {
    const auto lines = lines_of(wealth_histogram({1.0, 1.0, 1.0}, 3));
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "bin_lo,bin_hi,count");
    CHECK(lines[1] == "1,1,3");
    CHECK(lines[2] == "1,1,0");
  }
  SUBCASE("even split") {
    const auto lines = lines_of(wealth_histogram({0.0, 1.0, 2.0, 3.0}, 2));
    REQUIRE(lines.size() == 3);
    CHECK(lines[1] == "0,1.5,2");
    CHECK(lines[2] == "1.5,3,2");
  }
  SUBCASE("the maximum lands in the last bin") {
    const auto lines = lines_of(wealth_histogram({0.0, 1.0}, 2));
    CHECK(lines[1] == "0,0.5,1");
    CHECK(lines[2] == "0.5,1,1");
  }
  SUBCASE("counts are conserved") {
    std::vector<double> values;
    for (int k = 0; k < 997; ++k) values.push_back(std::sin(0.1 * k) * 10.0);
    const auto lines = lines_of(wealth_histogram(values, 7));
    long total = 0;
    for (std::size_t n = 1; n < lines.size(); ++n) {
      const std::size_t comma = lines[n].rfind(',');
      total += std::atol(lines[n].c_str() + comma + 1);
    }
    CHECK(total == 997);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(wealth_histogram({}, 3), std::invalid_argument);
    CHECK_THROWS_AS(wealth_histogram({1.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(wealth_histogram({std::nan("")}, 3), std::invalid_argument);
  }
}
