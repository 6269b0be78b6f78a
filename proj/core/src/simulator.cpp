#include "lobmm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "lobmm/io_util.hpp"

namespace lobmm {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("simulator: ") + what);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent generator per (seed, path, stream); the derivation is a pure
// function of the three values, so scheduling cannot change any draw.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t path, std::uint64_t stream) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ splitmix64(path + 0x9e3779b9ULL));
  s = splitmix64(s ^ splitmix64(stream + 0x85ebca6bULL));
  return std::mt19937_64(s);
}

double next_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// Box-Muller using exactly two draws, so every step consumes the same amount
// of randomness no matter which branch runs.
double next_normal(std::mt19937_64& g) {
  const double u1 = 1.0 - next_uniform(g);
  const double u2 = next_uniform(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double max_fill_rate(const std::vector<std::vector<double>>& table) {
  double r = 0;
  for (const auto& row : table)
    for (double v : row) r = std::max(r, v);
  return r;
}

struct Stream3 {
  std::mt19937_64 market, exec, strategy;
};

}  // namespace

int SimConfig::n_steps() const { return static_cast<int>(std::ceil(T / dt - 1e-9)); }

void SimConfig::validate(const MarketModel& model) const {
  // Unestimated intensity cells are a data problem, distinct from a bad
  // configuration; report them as such before structural validation.
  for (const auto* table : {&model.exec_bid, &model.exec_ask})
    for (const auto& row : *table)
      for (double v : row)
        if (std::isnan(v))
          throw std::runtime_error(
              "simulator: execution intensity table contains unestimated cells");
  model.validate();

  require(std::isfinite(T) && T > 0, "T must be positive");
  require(std::isfinite(dt) && dt > 0, "dt must be positive");
  require(dt <= T, "dt must not exceed T");
  require(n_paths >= 1, "n_paths must be at least 1");
  require(std::isfinite(x0) && std::isfinite(y0), "x0 and y0 must be finite");
  require(std::isfinite(p0) && p0 > 0, "p0 must be positive");
  require(i0 >= 1 && i0 <= model.grid.m, "i0 must be a valid spread state");

  const double total = model.tick_clock.max_rate() + max_fill_rate(model.exec_bid) +
                       max_fill_rate(model.exec_ask);
  require(total * dt <= 1.0 + 1e-12, "dt times the maximum total intensity exceeds 1");
}

PathResult run_path(const MarketModel& model, const Strategy& strategy, const SimConfig& config,
                    long path_index, std::vector<PathEvent>* events) {
  Stream3 rng{make_stream(config.seed, static_cast<std::uint64_t>(path_index), 0),
              make_stream(config.seed, static_cast<std::uint64_t>(path_index), 1),
              make_stream(config.seed, static_cast<std::uint64_t>(path_index), 2)};

  const int m = model.grid.m;
  const int n = config.n_steps();
  const double dt = config.dt;
  const double drift = model.price.kind == PriceModel::Kind::bachelier ? model.price.b : 0.0;
  const double sig_dt = model.price.sigma * std::sqrt(dt);

  double x = config.x0;
  double y = config.y0;
  double p = config.p0;
  int i = config.i0;

  PathResult r;
  r.max_abs_y = std::abs(y);

  const PolicyStrategy* pol = std::get_if<PolicyStrategy>(&strategy);
  const ConstantStrategy* con = std::get_if<ConstantStrategy>(&strategy);
  const RandomStrategy* rnd = std::get_if<RandomStrategy>(&strategy);

  for (int k = 0; k < n; ++k) {
    const double t = k * dt;

    // One action per step, decided from the step-start state.
    Action act;
    if (pol != nullptr) {
      bool clamped = false;
      const int iy = pol->table->iy_of(y, clamped);
      if (clamped) ++r.n_clamped;
      act = pol->table->at(pol->table->slice_of(t), iy, i);
    } else if (con != nullptr) {
      act = MakeAction{QuoteBid::Bb, QuoteAsk::Ba, con->lot, con->lot};
    } else {
      // Both draws happen even when the tight spread forces the touch, so the
      // consumed randomness per step is constant.
      const double ub = next_uniform(rng.strategy);
      const double ua = next_uniform(rng.strategy);
      const QuoteBid qb = (i >= 2 && ub < 0.5) ? QuoteBid::BbPlus : QuoteBid::Bb;
      const QuoteAsk qa = (i >= 2 && ua < 0.5) ? QuoteAsk::BaMinus : QuoteAsk::Ba;
      act = MakeAction{qb, qa, rnd->lot, rnd->lot};
    }

    // Execution randomness is consumed unconditionally so that different
    // strategies on the same seed face the same fill opportunities.
    const double u_bid = next_uniform(rng.exec);
    const double u_ask = next_uniform(rng.exec);

    if (const TakeAction* take = std::get_if<TakeAction>(&act)) {
      x -= take_cost(take->e, p, i, model.grid, model.fees);
      y += take->e;
      ++r.n_market;
      if (events) events->push_back({PathEvent::Kind::take, t, i, 0, take->e, p});
    } else {
      const MakeAction mk = std::get<MakeAction>(act);
      if (mk.lb > 0 && u_bid < exec_intensity(model, mk.qb, i) * dt) {
        x -= bid_price(mk.qb, p, i, model.grid, model.fees) * mk.lb;
        y += mk.lb;
        ++r.n_bid;
        if (events)
          events->push_back(
              {PathEvent::Kind::bid_fill, t, i, static_cast<int>(mk.qb), mk.lb, p});
      }
      if (mk.la > 0 && u_ask < exec_intensity(model, mk.qa, i) * dt) {
        x += ask_price(mk.qa, p, i, model.grid, model.fees) * mk.la;
        y -= mk.la;
        ++r.n_ask;
        if (events)
          events->push_back(
              {PathEvent::Kind::ask_fill, t, i, static_cast<int>(mk.qa), mk.la, p});
      }
    }
    r.max_abs_y = std::max(r.max_abs_y, std::abs(y));

    // Market randomness: spread transition chance, transition target, price
    // shock.  All three are drawn every step.
    const double u_spread = next_uniform(rng.market);
    const double u_row = next_uniform(rng.market);
    const double z = next_normal(rng.market);
    if (u_spread < model.tick_clock.rate_at(t) * dt) {
      double acc = 0;
      int target = 0;
      for (int j = 1; j <= m; ++j) {
        if (j == i) continue;
        acc += model.rho[i - 1][j - 1];
        if (u_row < acc) {
          target = j;
          break;
        }
      }
      if (target == 0) {
        // The row sums to one only up to rounding; land on the last state
        // carrying any mass.
        for (int j = m; j >= 1; --j) {
          if (j != i && model.rho[i - 1][j - 1] > 0) {
            target = j;
            break;
          }
        }
      }
      if (target != 0) i = target;
    }
    p += drift * dt + sig_dt * z;
  }

  r.p_T = p;
  if (y != 0) {
    x -= take_cost(-y, p, i, model.grid, model.fees);
    ++r.n_market;
    if (events) events->push_back({PathEvent::Kind::liquidate, n * dt, i, 0, -y, p});
  }
  r.x_T = x;
  return r;
}

std::vector<PathResult> run_paths(const MarketModel& model, const Strategy& strategy,
                                  const SimConfig& config, int n_threads) {
  config.validate(model);
  require(n_threads >= 1, "n_threads must be at least 1");

  const long n = config.n_paths;
  std::vector<PathResult> out(static_cast<std::size_t>(n));
  const int nt = static_cast<int>(std::min<long>(n_threads, n));
  if (nt <= 1) {
    for (long idx = 0; idx < n; ++idx) out[static_cast<std::size_t>(idx)] = run_path(model, strategy, config, idx);
    return out;
  }
  // Static block partition into a preallocated vector: every path writes its
  // own slot, so the thread count cannot change a single byte of the result.
  const long chunk = (n + nt - 1) / nt;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(nt));
  for (int w = 0; w < nt; ++w) {
    const long lo = w * chunk;
    const long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([&model, &strategy, &config, &out, lo, hi] {
      for (long idx = lo; idx < hi; ++idx)
        out[static_cast<std::size_t>(idx)] = run_path(model, strategy, config, idx);
    });
  }
  for (auto& w : workers) w.join();
  return out;
}

namespace {

// Two-pass population moments, accumulated in path order for reproducibility.
template <class Get>
Stat stat_of(const std::vector<PathResult>& paths, Get get) {
  const double n = static_cast<double>(paths.size());
  double sum = 0;
  for (const auto& p : paths) sum += static_cast<double>(get(p));
  const double mean = sum / n;
  double ss = 0;
  for (const auto& p : paths) {
    const double d = static_cast<double>(get(p)) - mean;
    ss += d * d;
  }
  return Stat{mean, std::sqrt(std::max(0.0, ss / n))};
}

}  // namespace

BacktestStats summarize(const std::vector<PathResult>& paths) {
  if (paths.empty()) throw std::invalid_argument("simulator: no paths to summarize");
  BacktestStats s;
  s.n_paths = static_cast<long>(paths.size());
  s.x_T = stat_of(paths, [](const PathResult& p) { return p.x_T; });
  s.n_bid = stat_of(paths, [](const PathResult& p) { return p.n_bid; });
  s.n_ask = stat_of(paths, [](const PathResult& p) { return p.n_ask; });
  s.n_market = stat_of(paths, [](const PathResult& p) { return p.n_market; });
  s.max_abs_y = stat_of(paths, [](const PathResult& p) { return p.max_abs_y; });
  s.p_T = stat_of(paths, [](const PathResult& p) { return p.p_T; });
  for (const auto& p : paths) s.clamped_total += p.n_clamped;
  return s;
}

BacktestStats run_backtest(const MarketModel& model, const Strategy& strategy,
                           const SimConfig& config, int n_threads) {
  return summarize(run_paths(model, strategy, config, n_threads));
}

double replay_events(const std::vector<PathEvent>& events, const MarketModel& model, double x0) {
  double x = x0;
  for (const PathEvent& e : events) {
    switch (e.kind) {
      case PathEvent::Kind::bid_fill:
        x -= bid_price(static_cast<QuoteBid>(e.quote), e.price, e.state, model.grid, model.fees) *
             e.size;
        break;
      case PathEvent::Kind::ask_fill:
        x += ask_price(static_cast<QuoteAsk>(e.quote), e.price, e.state, model.grid, model.fees) *
             e.size;
        break;
      case PathEvent::Kind::take:
      case PathEvent::Kind::liquidate:
        x -= take_cost(e.size, e.price, e.state, model.grid, model.fees);
        break;
    }
  }
  return x;
}

SuiteResult benchmark_suite(const MarketModel& model, const PolicyTable& star,
                            const PolicyTable& womo, const SimConfig& config, double lot,
                            int n_threads) {
  require(std::isfinite(lot) && lot > 0, "benchmark lot must be positive");
  SuiteResult s;
  s.star = run_backtest(model, Strategy{PolicyStrategy{&star}}, config, n_threads);
  s.womo = run_backtest(model, Strategy{PolicyStrategy{&womo}}, config, n_threads);
  s.constant = run_backtest(model, Strategy{ConstantStrategy{lot}}, config, n_threads);
  s.random = run_backtest(model, Strategy{RandomStrategy{lot}}, config, n_threads);
  return s;
}

namespace {

double ratio_or_nan(const Stat& s) {
  return s.sd > 0 ? s.mean / s.sd : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string stats_table_csv(const SuiteResult& suite) {
  const BacktestStats* cols[] = {&suite.star, &suite.womo, &suite.constant, &suite.random};
  std::string out = "statistic,optimal,womo,constant,random\n";
  const auto row = [&](const char* name, auto get) {
    out += name;
    for (const BacktestStats* c : cols) {
      out += ',';
      out += fmt_double(get(*c));
    }
    out += '\n';
  };
  row("mean_x_T", [](const BacktestStats& s) { return s.x_T.mean; });
  row("std_x_T", [](const BacktestStats& s) { return s.x_T.sd; });
  row("mean_n_bid", [](const BacktestStats& s) { return s.n_bid.mean; });
  row("std_n_bid", [](const BacktestStats& s) { return s.n_bid.sd; });
  row("mean_n_ask", [](const BacktestStats& s) { return s.n_ask.mean; });
  row("std_n_ask", [](const BacktestStats& s) { return s.n_ask.sd; });
  row("mean_n_market", [](const BacktestStats& s) { return s.n_market.mean; });
  row("std_n_market", [](const BacktestStats& s) { return s.n_market.sd; });
  row("mean_sup_abs_y", [](const BacktestStats& s) { return s.max_abs_y.mean; });
  row("std_sup_abs_y", [](const BacktestStats& s) { return s.max_abs_y.sd; });
  row("ir", [](const BacktestStats& s) { return ratio_or_nan(s.x_T); });
  return out;
}

std::string paths_csv(const std::vector<PathResult>& paths) {
  std::string out = "path,x_T,n_bid,n_ask,n_market,max_abs_y\n";
  for (std::size_t idx = 0; idx < paths.size(); ++idx) {
    const PathResult& p = paths[idx];
    out += std::to_string(idx);
    out += ',';
    out += fmt_double(p.x_T);
    out += ',';
    out += std::to_string(p.n_bid);
    out += ',';
    out += std::to_string(p.n_ask);
    out += ',';
    out += std::to_string(p.n_market);
    out += ',';
    out += fmt_double(p.max_abs_y);
    out += '\n';
  }
  return out;
}

}  // namespace lobmm
