// Integration tests for the command-line tool: exit codes, file formats and
// rerun determinism, exercised through real process invocations.  The binary
// path is injected at compile time as LOBMM_CLI_PATH.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lobmm/calibration.hpp"
#include "lobmm/model_io.hpp"
#include "lobmm/policy_io.hpp"
#include "lobmm/solver.hpp"
#include "support/reference_model.hpp"
#include "support/synthetic_ticks.hpp"

using namespace lobmm;
namespace fs = std::filesystem;

namespace {

const std::string kCli = LOBMM_CLI_PATH;

// Runs the tool with the given arguments, discarding its output; returns the
// process exit code.
int run_cli(const std::string& args) {
  const std::string cmd = "\"" + kCli + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  REQUIRE(out.good());
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

// Per-case scratch directory, removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("lobmm-cli-" + tag + "-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

// Shared fixtures built once: the symmetrized reference model on disk plus a
// pair of solved policies on a coarser grid (cheap to solve, valid to run).
struct Fixture {
  TempDir dir{"fixture"};
  fs::path model = dir / "model.json";
  fs::path star = dir / "star.json";
  fs::path womo = dir / "womo.json";

  Fixture() {
    const MarketModel sym = symmetrize(testsupport::make_reference_model());
    save_market_model(sym, model);
    const SolverGrid grid{1000.0, 20.0};
    SolverParams params;
    params.n_out = 50;
    save_policy(solve_mean_criterion(sym, grid, params).policy, star);
    params.take_max = 0.0;
    save_policy(solve_mean_criterion(sym, grid, params).policy, womo);
  }

  static const Fixture& get() {
    static Fixture f;
    return f;
  }
};

}  // namespace

TEST_CASE("usage errors exit with code 2, data errors with code 1") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("calibrate --help") == 0);
  CHECK(run_cli("") == 2);                   // a subcommand is required
  CHECK(run_cli("frobnicate") == 2);         // unknown subcommand
  CHECK(run_cli("solve") == 2);              // missing required options
  CHECK(run_cli("backtest --model does-not-exist.json --out x.csv") == 1);
  TempDir tmp("usage");
  const auto& fx = Fixture::get();
  // suite strategy without the two policies
  CHECK(run_cli("backtest --model " + fx.model.string() + " --out " +
                (tmp / "o.csv").string() + " --paths 10") == 2);
  // export needs exactly one mode
  CHECK(run_cli("export") == 2);
  CHECK(run_cli("export --policy " + fx.star.string() + " --stats x.csv --hist h.csv") == 2);
}

TEST_CASE("calibrate writes a loadable model and a report, deterministically") {
  TempDir tmp("calibrate");
  testsupport::TickGenConfig cfg;
  cfg.model = testsupport::make_reference_model();
  cfg.t_end = 20000.0;
  cfg.seed = 71;
  write_text(tmp / "ticks.csv", testsupport::ticks_to_csv(testsupport::generate_ticks(cfg)));

  const std::string base = "calibrate --input " + (tmp / "ticks.csv").string();
  CHECK(run_cli(base + " --out " + (tmp / "model.json").string()) == 0);

  const MarketModel model = load_market_model(tmp / "model.json");
  CHECK(model.grid.m == 6);
  CHECK(model.tick_clock.rates.size() == 1);
  CHECK(model.tick_clock.rates[0] == doctest::Approx(1.0).epsilon(0.1));

  // default report path derives from the model path
  const auto report = nlohmann::json::parse(read_bytes(tmp / "model_report.json"));
  CHECK(report.at("records").get<long>() > 10000);
  CHECK(report.at("sessions").get<long>() == 1);

  CHECK(run_cli(base + " --out " + (tmp / "model2.json").string() + " --report " +
                (tmp / "rep2.json").string()) == 0);
  CHECK(read_bytes(tmp / "model.json") == read_bytes(tmp / "model2.json"));

  // header-only input: no records to calibrate from
  write_text(tmp / "empty.csv", "ts,bid,ask,bid_sz,ask_sz,buy_vol,sell_vol\n");
  CHECK(run_cli("calibrate --input " + (tmp / "empty.csv").string() + " --out " +
                (tmp / "m3.json").string()) == 2);
}

TEST_CASE("solve writes a full policy table and value surface") {
  TempDir tmp("solve");
  const auto& fx = Fixture::get();

  const std::string base = "solve --model " + fx.model.string();
  CHECK(run_cli(base + " --out " + (tmp / "p.json").string() + " --dump-values " +
                (tmp / "v.csv").string()) == 0);

  const PolicyTable policy = load_policy(tmp / "p.json");
  CHECK(policy.n_out == 100);
  CHECK(policy.m == 6);
  CHECK(policy.grid.n_y() == 201);
  CHECK(policy.actions.size() == 100u * 201u * 6u);
  CHECK(policy.criterion == Criterion::mean);

  const std::string values = read_bytes(tmp / "v.csv");
  CHECK(values.rfind("t,y,i,value\n", 0) == 0);
  CHECK(count_lines(values) == 1 + 101L * 201L * 6L);

  // solving twice produces byte-identical files
  CHECK(run_cli(base + " --out " + (tmp / "p2.json").string()) == 0);
  CHECK(read_bytes(tmp / "p.json") == read_bytes(tmp / "p2.json"));

  // the exponential objective requires a zero penalty weight
  CHECK(run_cli(base + " --out " + (tmp / "pe.json").string() + " --objective exponential") == 2);
  CHECK(run_cli(base + " --out " + (tmp / "pe.json").string() +
                " --objective exponential --gamma 0") == 0);
  CHECK(load_policy(tmp / "pe.json").criterion == Criterion::exponential);
}

TEST_CASE("backtest writes per-strategy statistics and path dumps") {
  TempDir tmp("backtest");
  const auto& fx = Fixture::get();
  const std::string common = "backtest --model " + fx.model.string() + " --paths 300 --seed 5";

  SUBCASE("single strategy") {
    CHECK(run_cli(common + " --strategy constant --out " + (tmp / "s.csv").string() +
                  " --dump-paths " + (tmp / "pp.csv").string()) == 0);
    const std::string stats = read_bytes(tmp / "s.csv");
    CHECK(stats.rfind("statistic,value\n", 0) == 0);
    CHECK(stats.find("\nir,") != std::string::npos);
    const std::string paths = read_bytes(tmp / "pp.csv");
    CHECK(paths.rfind("path,x_T,n_bid,n_ask,n_market,max_abs_y\n", 0) == 0);
    CHECK(count_lines(paths) == 301);
  }

  SUBCASE("suite table") {
    CHECK(run_cli(common + " --strategy suite --policy " + fx.star.string() +
                  " --policy-womo " + fx.womo.string() + " --out " +
                  (tmp / "t.csv").string()) == 0);
    const std::string table = read_bytes(tmp / "t.csv");
    CHECK(table.rfind("statistic,optimal,womo,constant,random\n", 0) == 0);
    CHECK(count_lines(table) == 12);
  }

  SUBCASE("policy strategies need their policy files") {
    CHECK(run_cli(common + " --strategy star --out " + (tmp / "x.csv").string()) == 2);
    CHECK(run_cli(common + " --strategy womo --out " + (tmp / "x.csv").string()) == 2);
    CHECK(run_cli(common + " --strategy nonsense --out " + (tmp / "x.csv").string()) == 2);
  }

  SUBCASE("thread count does not change the bytes") {
    const std::string args = common + " --strategy random --out ";
    CHECK(run_cli(args + (tmp / "a.csv").string() + " --threads 1") == 0);
    CHECK(run_cli(args + (tmp / "b.csv").string() + " --threads 4") == 0);
    CHECK(read_bytes(tmp / "a.csv") == read_bytes(tmp / "b.csv"));
  }
}

TEST_CASE("export produces heatmaps and histograms") {
  TempDir tmp("export");
  const auto& fx = Fixture::get();

  CHECK(run_cli("export --policy " + fx.star.string() + " --slice 0 --out " +
                (tmp / "heat.csv").string()) == 0);
  const std::string heat = read_bytes(tmp / "heat.csv");
  CHECK(heat.rfind("y,i,zone,qb,qa,lb,la,e\n", 0) == 0);
  CHECK(count_lines(heat) == 1 + 101L * 6L);

  CHECK(run_cli("backtest --model " + fx.model.string() +
                " --strategy constant --paths 200 --seed 9 --out " +
                (tmp / "s.csv").string() + " --dump-paths " + (tmp / "pp.csv").string()) == 0);
  CHECK(run_cli("export --stats " + (tmp / "pp.csv").string() + " --hist " +
                (tmp / "h.csv").string() + " --bins 16") == 0);
  const std::string hist = read_bytes(tmp / "h.csv");
  CHECK(hist.rfind("bin_lo,bin_hi,count\n", 0) == 0);
  CHECK(count_lines(hist) == 17);
  long total = 0;
  std::istringstream rows(hist.substr(hist.find('\n') + 1));
  std::string line;
  while (std::getline(rows, line)) {
    if (line.empty()) continue;
    total += std::stol(line.substr(line.rfind(',') + 1));
  }
  CHECK(total == 200);

  // a stats file with the wrong header is rejected
  write_text(tmp / "bad.csv", "wealth\n1.0\n");
  CHECK(run_cli("export --stats " + (tmp / "bad.csv").string() + " --hist " +
                (tmp / "h2.csv").string()) == 2);
}

TEST_CASE("frontier sweeps the requested penalty weights in descending order") {
  TempDir tmp("frontier");
  const auto& fx = Fixture::get();

  CHECK(run_cli("frontier --model " + fx.model.string() + " --out " +
                (tmp / "f.csv").string() + " --gammas 0.5 --gammas 50 --gammas 5" +
                " --paths 200 --seed 3 --y-max 1000 --dy 20 --n-out 50") == 0);
  const std::string csv = read_bytes(tmp / "f.csv");
  CHECK(csv.rfind("gamma,sigma_star,mean_star,sigma_womo,mean_womo,ir,nir\n", 0) == 0);
  CHECK(count_lines(csv) == 4);

  std::istringstream rows(csv.substr(csv.find('\n') + 1));
  std::vector<double> gammas, sigmas;
  std::string line;
  while (std::getline(rows, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    gammas.push_back(std::stod(cell));
    std::getline(fields, cell, ',');
    sigmas.push_back(std::stod(cell));
  }
  REQUIRE(gammas.size() == 3);
  CHECK(gammas[0] == 50.0);
  CHECK(gammas[1] == 5.0);
  CHECK(gammas[2] == 0.5);
  CHECK(sigmas[0] < sigmas[2]);  // lighter penalty, riskier optimum

  // negative penalty weights are rejected
  CHECK(run_cli("frontier --model " + fx.model.string() + " --out " +
                (tmp / "g.csv").string() + " --gammas -1 --paths 50") == 2);
}
