#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lobmm {

// Ladder of admissible spreads: the spread takes the values i*delta, i in 1..m.
struct SpreadGrid {
  double delta = 0.005;
  int m = 6;

  double spread(int i) const { return i * delta; }
  double half_spread(int i) const { return i * (delta / 2.0); }
  int clamp_state(int i) const { return i < 1 ? 1 : (i > m ? m : i); }
  void validate() const;
};

// Passive bid placement: join the best bid, or improve it by one tick.
enum class QuoteBid : std::uint8_t { Bb = 0, BbPlus = 1 };
// Passive ask placement: join the best ask, or improve it by one tick.
enum class QuoteAsk : std::uint8_t { Ba = 0, BaMinus = 1 };

const char* to_string(QuoteBid q);
const char* to_string(QuoteAsk q);
QuoteBid quote_bid_from_string(const std::string& s);
QuoteAsk quote_ask_from_string(const std::string& s);

// Improving by a tick needs an empty tick inside the spread, i.e. state >= 2.
bool quote_admissible(QuoteBid q, int i);
bool quote_admissible(QuoteAsk q, int i);
std::vector<std::pair<QuoteBid, QuoteAsk>> admissible_quote_pairs(int i);

struct FeeSchedule {
  double rebate_per_share = 0.0008;    // credited on each passively filled share
  double take_fee_per_share = 0.0012;  // charged on each aggressively filled share
  double fixed_fee = 1e-6;             // charged once per market order
  void validate() const;
};

struct PriceModel {
  enum class Kind : std::uint8_t { martingale, bachelier };
  Kind kind = Kind::martingale;
  double b = 0.0;         // drift per second (bachelier only; martingale forces 0)
  double sigma = 0.0015;  // volatility per sqrt(second)
  double p0 = 45.0;
  void validate() const;
};

// Piecewise-constant intensity of the clock that drives spread updates.
// rates[k] applies on [boundaries[k], boundaries[k+1]); queries outside the
// covered range clamp to the first/last bucket.
struct TickClock {
  std::vector<double> boundaries;
  std::vector<double> rates;
  double rate_at(double t) const;
  double max_rate() const;
  void validate() const;
};

struct MarketModel {
  SpreadGrid grid;
  // Embedded spread transition matrix: m x m, zero diagonal, rows sum to 1.
  std::vector<std::vector<double>> rho;
  TickClock tick_clock;
  // Fill intensities per second, indexed [quote][state-1]; the quote index
  // matches the enum value (0 = at the touch, 1 = improved by one tick).
  std::vector<std::vector<double>> exec_bid;
  std::vector<std::vector<double>> exec_ask;
  FeeSchedule fees;
  PriceModel price;
  void validate() const;
};

// Non-fatal consistency findings, e.g. an improved quote with a lower fill
// intensity than the touch quote. Callers decide whether to surface them.
std::vector<std::string> model_warnings(const MarketModel& model);

double exec_intensity(const MarketModel& model, QuoteBid q, int i);
double exec_intensity(const MarketModel& model, QuoteAsk q, int i);

// Per-share execution price of a passive bid/ask, net of the rebate.
double bid_price(QuoteBid q, double p, int i, const SpreadGrid& grid, const FeeSchedule& fees);
double ask_price(QuoteAsk q, double p, int i, const SpreadGrid& grid, const FeeSchedule& fees);

// Signed cash cost of a market order of e shares (e > 0 buys at the ask,
// e < 0 sells at the bid): e*p + |e|*(half spread + fee) + fixed fee.
double take_cost(double e, double p, int i, const SpreadGrid& grid, const FeeSchedule& fees);

// Cash position after closing the inventory with a single market order.
double liquidation_value(double x, double y, double p, int i, const SpreadGrid& grid,
                         const FeeSchedule& fees);

struct MarketState {
  double t = 0;
  double x = 0;
  double y = 0;
  double p = 45.0;
  int i = 1;
};

struct MakeAction {
  QuoteBid qb = QuoteBid::Bb;
  QuoteAsk qa = QuoteAsk::Ba;
  double lb = 0;
  double la = 0;
  bool operator==(const MakeAction&) const = default;
};

struct TakeAction {
  double e = 0;
  bool operator==(const TakeAction&) const = default;
};

using Action = std::variant<MakeAction, TakeAction>;

}  // namespace lobmm
