#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lobmm/model.hpp"

namespace lobmm {

struct TickRecord {
  double ts = 0;        // seconds, nondecreasing across records
  double bid = 0;       // best bid price
  double ask = 0;       // best ask price, strictly above the bid
  double bid_sz = 0;    // shares displayed at the best bid
  double ask_sz = 0;    // shares displayed at the best ask
  double buy_vol = 0;   // buyer-initiated volume traded since the previous record
  double sell_vol = 0;  // seller-initiated volume traded since the previous record
};

// Strict reader for `ts,bid,ask,bid_sz,ask_sz,buy_vol,sell_vol` files.
// Rejects unknown headers, short rows, unordered timestamps, crossed books
// and negative sizes, with the offending line number in the message.
std::vector<TickRecord> read_ticks_csv(const std::filesystem::path& path);

// The spread path reduced to its update times. theta[k] is either a session
// start or a spread change; shat[k] is the state index at theta[k].
// segment_starts marks where a new session begins: records with a spread
// outside the ladder and gaps longer than session_gap split the data, and
// transitions or holding times are never counted across a split.
struct SpreadJumpSeries {
  std::vector<double> theta;
  std::vector<int> shat;
  std::vector<std::size_t> segment_starts;
  double t_end = 0;
  std::int64_t skipped_out_of_range = 0;
  int m = 0;

  std::size_t n_segments() const { return segment_starts.size(); }
  std::size_t segment_end(std::size_t seg) const {
    return seg + 1 < segment_starts.size() ? segment_starts[seg + 1] : theta.size();
  }
  // Spread changes, i.e. theta entries that are not segment starts.
  std::size_t n_jumps() const { return theta.size() - segment_starts.size(); }
  void validate() const;
};

SpreadJumpSeries extract_spread_jumps(const std::vector<TickRecord>& ticks, const SpreadGrid& grid,
                                      double session_gap = 4.0 * 3600.0);

struct TransitionEstimate {
  std::vector<std::vector<double>> rho;
  std::vector<std::vector<std::int64_t>> counts;
  // Visits with an observed successor, so each row of rho sums to exactly 1.
  std::vector<std::int64_t> visits;
  // 1-based states never visited; their rows fall back to uniform off-diagonal.
  std::vector<int> unvisited_states;
};
TransitionEstimate estimate_transition_matrix(const SpreadJumpSeries& series, int m);

struct TickClockEstimate {
  std::vector<double> boundaries;
  std::vector<double> rates;
  std::vector<std::int64_t> jump_counts;
};
// boundaries must be ascending and cover [first update, last record].
// Buckets are half-open [b_k, b_{k+1}); a jump exactly at the final boundary
// counts in the last bucket.
TickClockEstimate estimate_tick_clock(const SpreadJumpSeries& series,
                                      const std::vector<double>& boundaries);

// Execution counters accumulated between consecutive spread updates.
// Within an interval that starts in state i with displayed depths (Vb, Va):
// cumulated sell volume above v0 would have filled a one-tick-improved bid,
// above v0 + Vb also a bid at the touch; symmetrically for buys and asks.
// Only closed intervals (both endpoints observed inside one session segment)
// contribute, so occupation sums to the span of the update times.
struct ExecCounts {
  // counts[side][quote][state-1]; side 0 = bid, 1 = ask; quote index matches
  // the quote enums (0 = at the touch, 1 = improved).
  std::array<std::array<std::vector<std::int64_t>, 2>, 2> counts;
  std::vector<double> occupation;  // seconds spent in each state
  std::int64_t intervals = 0;
};
ExecCounts build_execution_proxies(const std::vector<TickRecord>& ticks, const SpreadGrid& grid,
                                   double v0, double session_gap = 4.0 * 3600.0);

struct ExecIntensityEstimate {
  // lambda[side][quote][state-1]; NaN marks a state with no occupation.
  std::array<std::array<std::vector<double>, 2>, 2> lambda;
  struct MissingCell {
    int side;   // 0 = bid, 1 = ask
    int quote;  // 0 = touch, 1 = improved
    int state;  // 1-based
  };
  std::vector<MissingCell> missing;
};
ExecIntensityEstimate estimate_exec_intensities(const ExecCounts& counts);

// Averages mirrored bid/ask intensities so both sides fill at the same rate.
MarketModel symmetrize(const MarketModel& model);

struct CalibrationReport {
  std::int64_t records = 0;
  std::int64_t skipped_out_of_range = 0;
  std::int64_t sessions = 0;
  std::int64_t jumps = 0;
  std::vector<std::vector<std::int64_t>> transition_counts;
  std::vector<std::int64_t> visits;
  std::vector<int> unvisited_states;
  std::vector<double> occupation;
  std::array<std::array<std::vector<std::int64_t>, 2>, 2> exec_counts;
  std::vector<ExecIntensityEstimate::MissingCell> missing_cells;
  std::vector<double> clock_boundaries;
  std::vector<double> clock_rates;
  std::vector<std::int64_t> clock_jump_counts;
  double v0 = 0;
  bool symmetrized = false;
};

std::string calibration_report_to_json(const CalibrationReport& report);
void save_calibration_report(const CalibrationReport& report, const std::filesystem::path& path);

struct CalibrationConfig {
  SpreadGrid grid;
  double v0 = 100;
  // Empty means a single bucket spanning the observed update times.
  std::vector<double> clock_boundaries;
  FeeSchedule fees;
  PriceModel price;
  bool symmetrize = false;
  double session_gap = 4.0 * 3600.0;
};

struct CalibrationResult {
  MarketModel model;
  CalibrationReport report;
};

// Full pipeline: spread updates -> transition matrix + clock + execution
// intensities -> assembled model. Throws std::runtime_error when a state has
// no occupation, listing the cells that could not be estimated.
CalibrationResult calibrate(const std::vector<TickRecord>& ticks, const CalibrationConfig& config);

}  // namespace lobmm
