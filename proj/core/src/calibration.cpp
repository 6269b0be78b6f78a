#include "lobmm/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "lobmm/io_util.hpp"

namespace lobmm {

namespace {

double parse_double(const std::string& text, std::size_t line, const char* what) {
  double value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("ticks: line " + std::to_string(line) + ": bad " + what + " '" +
                                text + "'");
  }
  return value;
}

}  // namespace

std::vector<TickRecord> read_ticks_csv(const std::filesystem::path& path) {
  static const std::string kHeader = "ts,bid,ask,bid_sz,ask_sz,buy_vol,sell_vol";
  std::string content = read_file(path);
  std::vector<std::string> lines = split(content, '\n');
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  if (lines.empty() || lines[0] != kHeader) {
    throw std::invalid_argument("ticks: expected header '" + kHeader + "'");
  }

  std::vector<TickRecord> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    std::vector<std::string> cells = split(lines[n], ',');
    if (cells.size() != 7) {
      throw std::invalid_argument("ticks: line " + std::to_string(n + 1) + ": expected 7 fields");
    }
    TickRecord rec;
    rec.ts = parse_double(cells[0], n + 1, "ts");
    rec.bid = parse_double(cells[1], n + 1, "bid");
    rec.ask = parse_double(cells[2], n + 1, "ask");
    rec.bid_sz = parse_double(cells[3], n + 1, "bid_sz");
    rec.ask_sz = parse_double(cells[4], n + 1, "ask_sz");
    rec.buy_vol = parse_double(cells[5], n + 1, "buy_vol");
    rec.sell_vol = parse_double(cells[6], n + 1, "sell_vol");
    const std::string where = "ticks: line " + std::to_string(n + 1);
    if (!std::isfinite(rec.ts)) throw std::invalid_argument(where + ": ts must be finite");
    if (!out.empty() && rec.ts < out.back().ts) {
      throw std::invalid_argument(where + ": timestamps must be nondecreasing");
    }
    if (!(rec.ask > rec.bid)) {
      throw std::invalid_argument(where + ": ask must be strictly above bid");
    }
    if (rec.bid_sz < 0 || rec.ask_sz < 0) {
      throw std::invalid_argument(where + ": sizes must be nonnegative");
    }
    if (rec.buy_vol < 0 || rec.sell_vol < 0) {
      throw std::invalid_argument(where + ": volumes must be nonnegative");
    }
    out.push_back(rec);
  }
  if (out.empty()) throw std::invalid_argument("ticks: no data rows in " + path.string());
  return out;
}

void SpreadJumpSeries::validate() const {
  if (theta.size() != shat.size()) {
    throw std::invalid_argument("spread series: theta and shat must have equal length");
  }
  if (!theta.empty() && (segment_starts.empty() || segment_starts.front() != 0)) {
    throw std::invalid_argument("spread series: first segment must start at index 0");
  }
  for (std::size_t seg = 0; seg < n_segments(); ++seg) {
    std::size_t end = segment_end(seg);
    for (std::size_t k = segment_starts[seg]; k + 1 < end; ++k) {
      if (shat[k] == shat[k + 1]) {
        throw std::invalid_argument("spread series: consecutive states must differ");
      }
      if (theta[k] > theta[k + 1]) {
        throw std::invalid_argument("spread series: update times must be nondecreasing");
      }
    }
  }
  for (int s : shat) {
    if (s < 1 || s > m) throw std::invalid_argument("spread series: state outside the ladder");
  }
}

namespace {

// Shared walk over the records: emits the update series plus, for the proxy
// counters, the record index behind every update.
struct SeriesWithRecords {
  SpreadJumpSeries series;
  std::vector<std::size_t> rec_index;
};

SeriesWithRecords build_series(const std::vector<TickRecord>& ticks, const SpreadGrid& grid,
                               double session_gap) {
  grid.validate();
  if (!(session_gap > 0)) throw std::invalid_argument("spread series: session gap must be positive");
  SeriesWithRecords out;
  out.series.m = grid.m;
  bool in_segment = false;
  int cur_state = 0;
  double last_ts = 0;
  for (std::size_t r = 0; r < ticks.size(); ++r) {
    const TickRecord& rec = ticks[r];
    const long long s = std::llround((rec.ask - rec.bid) / grid.delta);
    if (s < 1 || s > grid.m) {
      ++out.series.skipped_out_of_range;
      in_segment = false;
      continue;
    }
    if (in_segment && rec.ts - last_ts > session_gap) in_segment = false;
    const int state = static_cast<int>(s);
    if (!in_segment) {
      out.series.segment_starts.push_back(out.series.theta.size());
      out.series.theta.push_back(rec.ts);
      out.series.shat.push_back(state);
      out.rec_index.push_back(r);
      cur_state = state;
      in_segment = true;
    } else if (state != cur_state) {
      out.series.theta.push_back(rec.ts);
      out.series.shat.push_back(state);
      out.rec_index.push_back(r);
      cur_state = state;
    }
    last_ts = rec.ts;
    out.series.t_end = rec.ts;
  }
  return out;
}

}  // namespace

SpreadJumpSeries extract_spread_jumps(const std::vector<TickRecord>& ticks, const SpreadGrid& grid,
                                      double session_gap) {
  return build_series(ticks, grid, session_gap).series;
}

TransitionEstimate estimate_transition_matrix(const SpreadJumpSeries& series, int m) {
  if (m < 2) throw std::invalid_argument("transition matrix: need at least two states");
  series.validate();
  TransitionEstimate est;
  est.counts.assign(m, std::vector<std::int64_t>(m, 0));
  est.visits.assign(m, 0);
  std::int64_t transitions = 0;
  for (std::size_t seg = 0; seg < series.n_segments(); ++seg) {
    std::size_t end = series.segment_end(seg);
    for (std::size_t k = series.segment_starts[seg]; k + 1 < end; ++k) {
      ++est.counts[series.shat[k] - 1][series.shat[k + 1] - 1];
      ++est.visits[series.shat[k] - 1];
      ++transitions;
    }
  }
  if (transitions == 0) {
    throw std::runtime_error("transition matrix: no spread transitions observed");
  }
  est.rho.assign(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) {
    if (est.visits[i] == 0) {
      est.unvisited_states.push_back(i + 1);
      for (int j = 0; j < m; ++j) {
        if (j != i) est.rho[i][j] = 1.0 / (m - 1);
      }
      continue;
    }
    for (int j = 0; j < m; ++j) {
      est.rho[i][j] = static_cast<double>(est.counts[i][j]) / static_cast<double>(est.visits[i]);
    }
  }
  return est;
}

TickClockEstimate estimate_tick_clock(const SpreadJumpSeries& series,
                                      const std::vector<double>& boundaries) {
  series.validate();
  if (boundaries.size() < 2) {
    throw std::invalid_argument("tick clock: need at least two boundaries");
  }
  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
    if (!(boundaries[k] < boundaries[k + 1])) {
      throw std::invalid_argument("tick clock: boundaries must be strictly ascending");
    }
  }
  if (series.theta.empty()) throw std::runtime_error("tick clock: no spread updates observed");
  if (boundaries.front() > series.theta.front() || boundaries.back() < series.t_end) {
    throw std::invalid_argument("tick clock: boundaries do not cover the data horizon");
  }

  TickClockEstimate est;
  est.boundaries = boundaries;
  est.jump_counts.assign(boundaries.size() - 1, 0);
  for (std::size_t seg = 0; seg < series.n_segments(); ++seg) {
    std::size_t end = series.segment_end(seg);
    for (std::size_t k = series.segment_starts[seg] + 1; k < end; ++k) {
      auto it = std::upper_bound(boundaries.begin(), boundaries.end(), series.theta[k]);
      std::size_t bucket = static_cast<std::size_t>(it - boundaries.begin());
      bucket = bucket == 0 ? 0 : bucket - 1;
      if (bucket >= est.jump_counts.size()) bucket = est.jump_counts.size() - 1;
      ++est.jump_counts[bucket];
    }
  }
  est.rates.resize(est.jump_counts.size());
  for (std::size_t k = 0; k < est.rates.size(); ++k) {
    est.rates[k] = static_cast<double>(est.jump_counts[k]) / (boundaries[k + 1] - boundaries[k]);
  }
  return est;
}

ExecCounts build_execution_proxies(const std::vector<TickRecord>& ticks, const SpreadGrid& grid,
                                   double v0, double session_gap) {
  if (!(v0 >= 0) || !std::isfinite(v0)) {
    throw std::invalid_argument("execution proxies: v0 must be finite and nonnegative");
  }
  SeriesWithRecords sr = build_series(ticks, grid, session_gap);
  const SpreadJumpSeries& series = sr.series;

  ExecCounts out;
  for (auto& side : out.counts) {
    for (auto& row : side) row.assign(grid.m, 0);
  }
  out.occupation.assign(grid.m, 0.0);

  for (std::size_t seg = 0; seg < series.n_segments(); ++seg) {
    std::size_t end = series.segment_end(seg);
    for (std::size_t k = series.segment_starts[seg]; k + 1 < end; ++k) {
      const int state = series.shat[k] - 1;
      const std::size_t r0 = sr.rec_index[k];
      const std::size_t r1 = sr.rec_index[k + 1];
      const double depth_bid = ticks[r0].bid_sz;
      const double depth_ask = ticks[r0].ask_sz;
      double sell = 0;
      double buy = 0;
      for (std::size_t r = r0 + 1; r <= r1; ++r) {
        sell += ticks[r].sell_vol;
        buy += ticks[r].buy_vol;
      }
      out.occupation[state] += series.theta[k + 1] - series.theta[k];
      ++out.intervals;
      if (sell > v0) ++out.counts[0][1][state];              // improved bid would have filled
      if (sell > v0 + depth_bid) ++out.counts[0][0][state];  // bid at the touch as well
      if (buy > v0) ++out.counts[1][1][state];
      if (buy > v0 + depth_ask) ++out.counts[1][0][state];
    }
  }
  return out;
}

ExecIntensityEstimate estimate_exec_intensities(const ExecCounts& counts) {
  const std::size_t m = counts.occupation.size();
  bool any = false;
  for (double occ : counts.occupation) any = any || occ > 0;
  if (!any) {
    throw std::runtime_error("execution intensities: no closed spread intervals observed");
  }
  ExecIntensityEstimate est;
  for (int side = 0; side < 2; ++side) {
    for (int quote = 0; quote < 2; ++quote) {
      est.lambda[side][quote].assign(m, std::numeric_limits<double>::quiet_NaN());
      for (std::size_t i = 0; i < m; ++i) {
        if (counts.occupation[i] > 0) {
          est.lambda[side][quote][i] =
              static_cast<double>(counts.counts[side][quote][i]) / counts.occupation[i];
        } else {
          est.missing.push_back({side, quote, static_cast<int>(i) + 1});
        }
      }
    }
  }
  return est;
}

MarketModel symmetrize(const MarketModel& model) {
  MarketModel out = model;
  for (int quote = 0; quote < 2; ++quote) {
    for (int i = 0; i < model.grid.m; ++i) {
      const double mean = (model.exec_bid[quote][i] + model.exec_ask[quote][i]) / 2.0;
      out.exec_bid[quote][i] = mean;
      out.exec_ask[quote][i] = mean;
    }
  }
  return out;
}

namespace {

nlohmann::json missing_cell_json(const ExecIntensityEstimate::MissingCell& cell) {
  const char* quote = cell.side == 0 ? (cell.quote == 0 ? "Bb" : "Bb+")
                                     : (cell.quote == 0 ? "Ba" : "Ba-");
  return {{"side", cell.side == 0 ? "bid" : "ask"}, {"quote", quote}, {"state", cell.state}};
}

}  // namespace

std::string calibration_report_to_json(const CalibrationReport& report) {
  nlohmann::json j;
  j["records"] = report.records;
  j["skipped_out_of_range"] = report.skipped_out_of_range;
  j["sessions"] = report.sessions;
  j["jumps"] = report.jumps;
  j["transition_counts"] = report.transition_counts;
  j["visits"] = report.visits;
  j["unvisited_states"] = report.unvisited_states;
  j["occupation_seconds"] = report.occupation;
  j["exec_counts"] = {
      {"bid", {{"Bb", report.exec_counts[0][0]}, {"Bb+", report.exec_counts[0][1]}}},
      {"ask", {{"Ba", report.exec_counts[1][0]}, {"Ba-", report.exec_counts[1][1]}}}};
  j["missing_cells"] = nlohmann::json::array();
  for (const auto& cell : report.missing_cells) j["missing_cells"].push_back(missing_cell_json(cell));
  j["tick_clock"] = {{"boundaries", report.clock_boundaries},
                     {"rates", report.clock_rates},
                     {"jump_counts", report.clock_jump_counts}};
  j["v0"] = report.v0;
  j["symmetrized"] = report.symmetrized;
  return j.dump(2) + "\n";
}

void save_calibration_report(const CalibrationReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, calibration_report_to_json(report));
}

CalibrationResult calibrate(const std::vector<TickRecord>& ticks,
                            const CalibrationConfig& config) {
  SpreadJumpSeries series = extract_spread_jumps(ticks, config.grid, config.session_gap);
  if (series.theta.empty()) {
    throw std::runtime_error("calibrate: no records with a spread on the ladder");
  }
  TransitionEstimate transitions = estimate_transition_matrix(series, config.grid.m);

  std::vector<double> boundaries = config.clock_boundaries;
  if (boundaries.empty()) {
    double lo = series.theta.front();
    double hi = series.t_end;
    if (!(hi > lo)) hi = lo + 1.0;  // degenerate horizon: one 1s bucket
    boundaries = {lo, hi};
  }
  TickClockEstimate clock = estimate_tick_clock(series, boundaries);

  ExecCounts counts =
      build_execution_proxies(ticks, config.grid, config.v0, config.session_gap);
  ExecIntensityEstimate exec = estimate_exec_intensities(counts);
  if (!exec.missing.empty()) {
    std::string msg = "calibrate: no occupation for";
    for (const auto& cell : exec.missing) {
      msg += std::string(" [") + (cell.side == 0 ? "bid" : "ask") + " " +
             (cell.side == 0 ? (cell.quote == 0 ? "Bb" : "Bb+")
                             : (cell.quote == 0 ? "Ba" : "Ba-")) +
             " state " + std::to_string(cell.state) + "]";
    }
    throw std::runtime_error(msg);
  }

  CalibrationResult result;
  result.model.grid = config.grid;
  result.model.rho = transitions.rho;
  result.model.tick_clock.boundaries = clock.boundaries;
  result.model.tick_clock.rates = clock.rates;
  result.model.exec_bid = {exec.lambda[0][0], exec.lambda[0][1]};
  result.model.exec_ask = {exec.lambda[1][0], exec.lambda[1][1]};
  result.model.fees = config.fees;
  result.model.price = config.price;
  if (config.symmetrize) result.model = symmetrize(result.model);
  result.model.validate();

  CalibrationReport& report = result.report;
  report.records = static_cast<std::int64_t>(ticks.size());
  report.skipped_out_of_range = series.skipped_out_of_range;
  report.sessions = static_cast<std::int64_t>(series.n_segments());
  report.jumps = static_cast<std::int64_t>(series.n_jumps());
  report.transition_counts = transitions.counts;
  report.visits = transitions.visits;
  report.unvisited_states = transitions.unvisited_states;
  report.occupation = counts.occupation;
  report.exec_counts = counts.counts;
  report.missing_cells = exec.missing;
  report.clock_boundaries = clock.boundaries;
  report.clock_rates = clock.rates;
  report.clock_jump_counts = clock.jump_counts;
  report.v0 = config.v0;
  report.symmetrized = config.symmetrize;
  return result;
}

}  // namespace lobmm
