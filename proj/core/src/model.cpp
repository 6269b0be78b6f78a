#include "lobmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lobmm {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void SpreadGrid::validate() const {
  require(std::isfinite(delta) && delta > 0, "spread grid: delta must be positive");
  require(m >= 1, "spread grid: m must be at least 1");
}

const char* to_string(QuoteBid q) { return q == QuoteBid::Bb ? "Bb" : "Bb+"; }
const char* to_string(QuoteAsk q) { return q == QuoteAsk::Ba ? "Ba" : "Ba-"; }

QuoteBid quote_bid_from_string(const std::string& s) {
  if (s == "Bb") return QuoteBid::Bb;
  if (s == "Bb+") return QuoteBid::BbPlus;
  throw std::invalid_argument("unknown bid quote '" + s + "'");
}

QuoteAsk quote_ask_from_string(const std::string& s) {
  if (s == "Ba") return QuoteAsk::Ba;
  if (s == "Ba-") return QuoteAsk::BaMinus;
  throw std::invalid_argument("unknown ask quote '" + s + "'");
}

bool quote_admissible(QuoteBid q, int i) { return q == QuoteBid::Bb || i >= 2; }
bool quote_admissible(QuoteAsk q, int i) { return q == QuoteAsk::Ba || i >= 2; }

std::vector<std::pair<QuoteBid, QuoteAsk>> admissible_quote_pairs(int i) {
  std::vector<std::pair<QuoteBid, QuoteAsk>> out;
  for (QuoteBid qb : {QuoteBid::Bb, QuoteBid::BbPlus}) {
    for (QuoteAsk qa : {QuoteAsk::Ba, QuoteAsk::BaMinus}) {
      if (quote_admissible(qb, i) && quote_admissible(qa, i)) out.emplace_back(qb, qa);
    }
  }
  return out;
}

void FeeSchedule::validate() const {
  require(std::isfinite(rebate_per_share) && rebate_per_share >= 0,
          "fees: rebate_per_share must be finite and nonnegative");
  require(std::isfinite(take_fee_per_share) && take_fee_per_share >= 0,
          "fees: take_fee_per_share must be finite and nonnegative");
  require(std::isfinite(fixed_fee) && fixed_fee >= 0,
          "fees: fixed_fee must be finite and nonnegative");
}

void PriceModel::validate() const {
  require(std::isfinite(sigma) && sigma >= 0, "price: sigma must be finite and nonnegative");
  require(std::isfinite(p0) && p0 > 0, "price: p0 must be positive");
  require(std::isfinite(b), "price: drift must be finite");
  if (kind == Kind::martingale) {
    require(b == 0, "price: martingale dynamics force zero drift");
  }
}

double TickClock::rate_at(double t) const {
  if (t <= boundaries.front()) return rates.front();
  if (t >= boundaries.back()) return rates.back();
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), t);
  std::size_t k = static_cast<std::size_t>(it - boundaries.begin()) - 1;
  if (k >= rates.size()) k = rates.size() - 1;
  return rates[k];
}

double TickClock::max_rate() const { return *std::max_element(rates.begin(), rates.end()); }

void TickClock::validate() const {
  require(boundaries.size() >= 2, "tick clock: need at least two boundaries");
  require(rates.size() + 1 == boundaries.size(),
          "tick clock: rates must have one entry per bucket");
  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
    require(std::isfinite(boundaries[k]) && boundaries[k] < boundaries[k + 1],
            "tick clock: boundaries must be strictly ascending");
  }
  require(std::isfinite(boundaries.back()), "tick clock: boundaries must be finite");
  for (double r : rates) {
    require(std::isfinite(r) && r >= 0, "tick clock: rates must be finite and nonnegative");
  }
}

void MarketModel::validate() const {
  grid.validate();
  const std::size_t m = static_cast<std::size_t>(grid.m);
  require(rho.size() == m, "model: rho must be m x m");
  for (std::size_t i = 0; i < m; ++i) {
    require(rho[i].size() == m, "model: rho must be m x m");
    double sum = 0;
    for (std::size_t j = 0; j < m; ++j) {
      require(std::isfinite(rho[i][j]) && rho[i][j] >= 0,
              "model: rho entries must be finite and nonnegative");
      sum += rho[i][j];
    }
    require(rho[i][i] == 0, "model: rho must have a zero diagonal");
    require(std::abs(sum - 1.0) <= 1e-9,
            "model: rho row " + std::to_string(i + 1) + " does not sum to 1");
  }
  tick_clock.validate();
  for (const auto* table : {&exec_bid, &exec_ask}) {
    require(table->size() == 2, "model: execution tables need one row per quote");
    for (const auto& row : *table) {
      require(row.size() == m, "model: execution tables need one entry per spread state");
      for (double v : row) {
        require(std::isfinite(v) && v >= 0,
                "model: execution intensities must be finite and nonnegative");
      }
    }
  }
  fees.validate();
  price.validate();
}

std::vector<std::string> model_warnings(const MarketModel& model) {
  std::vector<std::string> out;
  for (int i = 2; i <= model.grid.m; ++i) {
    if (exec_intensity(model, QuoteBid::BbPlus, i) < exec_intensity(model, QuoteBid::Bb, i)) {
      out.push_back("bid state " + std::to_string(i) +
                    ": improved quote has a lower fill intensity than the touch");
    }
    if (exec_intensity(model, QuoteAsk::BaMinus, i) < exec_intensity(model, QuoteAsk::Ba, i)) {
      out.push_back("ask state " + std::to_string(i) +
                    ": improved quote has a lower fill intensity than the touch");
    }
  }
  return out;
}

namespace {

int checked_state(const MarketModel& model, int i) {
  if (i < 1 || i > model.grid.m) {
    throw std::invalid_argument("spread state " + std::to_string(i) + " outside 1.." +
                                std::to_string(model.grid.m));
  }
  return i - 1;
}

}  // namespace

double exec_intensity(const MarketModel& model, QuoteBid q, int i) {
  return model.exec_bid[static_cast<std::size_t>(q)][checked_state(model, i)];
}

double exec_intensity(const MarketModel& model, QuoteAsk q, int i) {
  return model.exec_ask[static_cast<std::size_t>(q)][checked_state(model, i)];
}

double bid_price(QuoteBid q, double p, int i, const SpreadGrid& grid, const FeeSchedule& fees) {
  const int half_ticks = -i + (q == QuoteBid::BbPlus ? 2 : 0);
  return p + half_ticks * (grid.delta / 2.0) - fees.rebate_per_share;
}

double ask_price(QuoteAsk q, double p, int i, const SpreadGrid& grid, const FeeSchedule& fees) {
  const int half_ticks = i - (q == QuoteAsk::BaMinus ? 2 : 0);
  return p + half_ticks * (grid.delta / 2.0) + fees.rebate_per_share;
}

double take_cost(double e, double p, int i, const SpreadGrid& grid, const FeeSchedule& fees) {
  return e * p + std::abs(e) * (grid.half_spread(i) + fees.take_fee_per_share) + fees.fixed_fee;
}

double liquidation_value(double x, double y, double p, int i, const SpreadGrid& grid,
                         const FeeSchedule& fees) {
  return x - take_cost(-y, p, i, grid, fees);
}

}  // namespace lobmm
