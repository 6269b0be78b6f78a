#pragma once

// Finite-difference solver for the market maker's control problem on the
// reduced state (inventory, spread state).  Two optimality criteria are
// supported:
//
//  * Criterion::mean — maximize expected terminal wealth minus a running
//    quadratic inventory penalty gamma * y^2.  The reduced value phi is the
//    expected wealth adjustment on top of the mark-to-market book value.
//  * Criterion::exponential — exponential utility of terminal wealth with
//    risk aversion eta.  The reduced value is a positive multiplier that the
//    solver minimizes; it requires gamma == 0 and uses the price drift and
//    volatility from the model.
//
// Both solves march backward with an explicit scheme.  Each output interval
// is cut into substeps chosen from the total event rate so the scheme stays
// monotone, and after every substep the market-order intervention operator is
// applied until it reaches a fixed point, so stored slices satisfy the
// intervention constraint exactly.

#include <string>
#include <vector>

#include "lobmm/model.hpp"

namespace lobmm {

enum class Criterion { mean, exponential };

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

// Uniform inventory grid: nodes at -y_max, -y_max + dy, ..., y_max.
struct SolverGrid {
  double y_max = 1000.0;
  double dy = 10.0;

  int n_half() const;
  int n_y() const { return 2 * n_half() + 1; }
  double y(int iy) const { return (iy - n_half()) * dy; }
  int iy_zero() const { return n_half(); }
  void validate() const;
};

struct SolverParams {
  double gamma = 5.0;     // running inventory penalty (mean criterion)
  double eta = 1.0;       // risk aversion (exponential criterion)
  double T = 300.0;       // horizon in seconds
  int n_out = 100;        // stored output intervals
  double lot_max = 100.0;   // largest passive order size per side
  double take_max = 100.0;  // largest market order size (0 disables takes)
  double tie_eps = 1e-10;   // margin a take must clear before it is recorded
  double cfl = 0.5;         // substep stability bound on rate * dtau
  // Share count that maps to one penalty unit: the running cost is
  // gamma * (y / inventory_unit)^2 per second, so published gamma values stay
  // on a comparable scale regardless of the share quantities being quoted.
  double inventory_unit = 1000.0;

  void validate(const SolverGrid& grid) const;
};

// Stored value slices: n_out + 1 time slices, each n_y * m nodes.
struct ValueSurface {
  SolverGrid grid;
  int m = 0;
  double T = 0;
  int n_out = 0;
  std::vector<double> data;

  std::size_t idx(int slice, int iy, int i) const {
    return (static_cast<std::size_t>(slice) * grid.n_y() + iy) * m + (i - 1);
  }
  double at(int slice, int iy, int i) const { return data[idx(slice, iy, i)]; }
  double& at(int slice, int iy, int i) { return data[idx(slice, iy, i)]; }
  double time_of(int slice) const { return T * slice / n_out; }
};

// Optimal action per (interval, inventory node, spread state).  Slice k holds
// the action applied on [t_k, t_{k+1}).
struct PolicyTable {
  SolverGrid grid;
  int m = 0;
  double T = 0;
  int n_out = 0;
  Criterion criterion = Criterion::mean;
  double gamma = 0;
  double eta = 0;
  std::vector<Action> actions;

  std::size_t idx(int slice, int iy, int i) const {
    return (static_cast<std::size_t>(slice) * grid.n_y() + iy) * m + (i - 1);
  }
  const Action& at(int slice, int iy, int i) const { return actions[idx(slice, iy, i)]; }
  Action& at(int slice, int iy, int i) { return actions[idx(slice, iy, i)]; }

  // Interval index containing time t, clamped to [0, n_out - 1].
  int slice_of(double t) const;
  // Nearest inventory node; sets clamped when that node falls outside the grid.
  int iy_of(double y, bool& clamped) const;
};

struct SolveResult {
  ValueSurface value;
  PolicyTable policy;
  int n_sub = 0;    // substeps per output interval
  double dtau = 0;  // substep length
};

SolveResult solve_mean_criterion(const MarketModel& model, const SolverGrid& grid,
                                 const SolverParams& params);
SolveResult solve_exponential(const MarketModel& model, const SolverGrid& grid,
                              const SolverParams& params);

// Best value reachable from each node of `slice` with a single market order
// (take costs included).  Layout matches a ValueSurface slice; nodes with no
// admissible take map to -inf (mean) or +inf (exponential).
std::vector<double> intervention_operator(const std::vector<double>& slice,
                                          const MarketModel& model, const SolverGrid& grid,
                                          const SolverParams& params, Criterion criterion);

struct SolutionCheck {
  // Largest amount by which a single market order could still improve any
  // stored node (positive values mean the intervention constraint is broken).
  double max_intervention_gain = 0;
  int worst_slice = -1;
};

SolutionCheck check_solution(const SolveResult& result, const MarketModel& model,
                             const SolverGrid& grid, const SolverParams& params);

}  // namespace lobmm
