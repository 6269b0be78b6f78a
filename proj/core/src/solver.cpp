#include "lobmm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace lobmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Keeps the exponential value strictly positive so ratios stay well defined.
constexpr double kPositivityFloor = 1e-300;
// Upper bound on log(value) the exponential criterion may reach before the
// solve is rejected as overflowing.
constexpr double kMaxLogRange = 690.0;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument("solver: " + msg);
}

// Quantities that depend only on (state, quote/size), precomputed once.
struct Tables {
  int m = 0;
  int ny = 0;
  int k_lot = 0;   // passive sizes are kl * dy, kl in 0..k_lot
  int k_take = 0;  // market orders are +-k * dy, k in 1..k_take
  std::vector<int> n_quotes;     // admissible passive placements per state
  std::vector<double> margin_l;  // revenue of a passive fill of kl * dy shares
  std::vector<double> fill_factor;  // exp(-eta * margin_l), exponential only
  std::vector<double> take_cost;    // cash cost of a take of k * dy shares
  std::vector<double> take_factor;  // exp(+eta * take_cost), exponential only

  std::size_t lot_idx(int i, int q, int kl) const {
    return (static_cast<std::size_t>(i - 1) * 2 + q) * (k_lot + 1) + kl;
  }
  std::size_t take_idx(int i, int k) const {
    return static_cast<std::size_t>(i - 1) * k_take + (k - 1);
  }
};

Tables build_tables(const MarketModel& model, const SolverGrid& grid, const SolverParams& params,
                    bool exponential) {
  Tables t;
  t.m = model.grid.m;
  t.ny = grid.n_y();
  t.k_lot = static_cast<int>(std::floor(params.lot_max / grid.dy + 1e-9));
  t.k_take = static_cast<int>(std::floor(params.take_max / grid.dy + 1e-9));
  t.n_quotes.assign(t.m, 1);
  t.margin_l.assign(static_cast<std::size_t>(t.m) * 2 * (t.k_lot + 1), 0.0);
  if (exponential) t.fill_factor.assign(t.margin_l.size(), 1.0);
  if (t.k_take > 0) {
    t.take_cost.assign(static_cast<std::size_t>(t.m) * t.k_take, 0.0);
    if (exponential) t.take_factor.assign(t.take_cost.size(), 1.0);
  }
  for (int i = 1; i <= t.m; ++i) {
    t.n_quotes[i - 1] = quote_admissible(QuoteBid::BbPlus, i) ? 2 : 1;
    const double hs = model.grid.half_spread(i);
    for (int q = 0; q < 2; ++q) {
      const double margin =
          hs - (q == 1 ? model.grid.delta : 0.0) + model.fees.rebate_per_share;
      for (int kl = 0; kl <= t.k_lot; ++kl) {
        const double revenue = margin * (kl * grid.dy);
        t.margin_l[t.lot_idx(i, q, kl)] = revenue;
        if (exponential) t.fill_factor[t.lot_idx(i, q, kl)] = std::exp(-params.eta * revenue);
      }
    }
    for (int k = 1; k <= t.k_take; ++k) {
      const double cost =
          (k * grid.dy) * (hs + model.fees.take_fee_per_share) + model.fees.fixed_fee;
      t.take_cost[t.take_idx(i, k)] = cost;
      if (exponential) t.take_factor[t.take_idx(i, k)] = std::exp(params.eta * cost);
    }
  }
  return t;
}

// Best value reachable from (iy, i) with one market order.  Candidates are
// enumerated toward zero inventory first, smallest size first, and only a
// strict improvement replaces the incumbent, so mirrored nodes pick mirrored
// orders.  Returns -inf (maximizing) / +inf (minimizing) when no size fits.
template <bool kExp>
double best_take(const Tables& t, const SolverGrid& grid, const std::vector<double>& vals, int iy,
                 int i, int* arg_k) {
  double best = kExp ? kInf : -kInf;
  int best_k = 0;
  auto consider = [&](int k_signed) {
    const int k = k_signed < 0 ? -k_signed : k_signed;
    const double v = vals[static_cast<std::size_t>(iy + k_signed) * t.m + (i - 1)];
    const double cand =
        kExp ? v * t.take_factor[t.take_idx(i, k)] : v - t.take_cost[t.take_idx(i, k)];
    if (kExp ? (cand < best) : (cand > best)) {
      best = cand;
      best_k = k_signed;
    }
  };
  const int down = std::min(t.k_take, iy);           // sells, e = -k * dy
  const int up = std::min(t.k_take, t.ny - 1 - iy);  // buys, e = +k * dy
  if (iy >= grid.iy_zero()) {
    for (int k = 1; k <= down; ++k) consider(-k);
    for (int k = 1; k <= up; ++k) consider(k);
  } else {
    for (int k = 1; k <= up; ++k) consider(k);
    for (int k = 1; k <= down; ++k) consider(-k);
  }
  if (arg_k != nullptr) *arg_k = best_k;
  return best;
}

template <bool kExp>
class Engine {
 public:
  Engine(const MarketModel& model, const SolverGrid& grid, const SolverParams& params)
      : model_(model), grid_(grid), params_(params), t_(build_tables(model, grid, params, kExp)) {}

  SolveResult run();

 private:
  std::size_t node(int iy, int i) const {
    return static_cast<std::size_t>(iy) * t_.m + (i - 1);
  }

  void advance(const std::vector<double>& phi, double t_new, double dtau, std::vector<double>& out,
               bool record);
  void apply_interventions(std::vector<double>& cur);
  void record_policy(int slice, const std::vector<double>& final_vals,
                     const std::vector<double>& advanced, PolicyTable& policy);

  const MarketModel& model_;
  const SolverGrid& grid_;
  const SolverParams& params_;
  Tables t_;
  std::vector<std::uint8_t> rec_qb_, rec_qa_;
  std::vector<int> rec_lb_, rec_la_;
  std::vector<double> sweep_prev_;
};

template <bool kExp>
void Engine<kExp>::advance(const std::vector<double>& phi, double t_new, double dtau,
                           std::vector<double>& out, bool record) {
  const double lam = model_.tick_clock.rate_at(t_new);
  const double eta = params_.eta;
  for (int iy = 0; iy < t_.ny; ++iy) {
    const double y = grid_.y(iy);
    double zeroth = 0;
    if constexpr (kExp) {
      // Price parameters enter only the exponential criterion; the mean
      // criterion is invariant to them by construction.
      const double b = model_.price.b;
      const double sigma = model_.price.sigma;
      zeroth = 0.5 * sigma * sigma * eta * eta * (y * y) - b * eta * y;
    }
    const int up_max = t_.ny - 1 - iy;
    const int down_max = iy;
    for (int i = 1; i <= t_.m; ++i) {
      const double f = phi[node(iy, i)];
      double trans = 0;
      for (int j = 1; j <= t_.m; ++j) {
        if (j == i) continue;
        trans += model_.rho[i - 1][j - 1] * (phi[node(iy, j)] - f);
      }
      trans *= lam;

      double best_b = kExp ? kInf : -kInf;
      int qb = 0, klb = 0;
      for (int q = 0; q < t_.n_quotes[i - 1]; ++q) {
        const double inten = model_.exec_bid[q][i - 1];
        const int kmax = std::min(t_.k_lot, up_max);
        for (int kl = 0; kl <= kmax; ++kl) {
          double v;
          if constexpr (kExp) {
            v = inten * (t_.fill_factor[t_.lot_idx(i, q, kl)] * phi[node(iy + kl, i)] - f);
          } else {
            v = inten * ((phi[node(iy + kl, i)] - f) + t_.margin_l[t_.lot_idx(i, q, kl)]);
          }
          if (kExp ? (v < best_b) : (v > best_b)) {
            best_b = v;
            qb = q;
            klb = kl;
          }
        }
      }

      double best_a = kExp ? kInf : -kInf;
      int qa = 0, kla = 0;
      for (int q = 0; q < t_.n_quotes[i - 1]; ++q) {
        const double inten = model_.exec_ask[q][i - 1];
        const int kmax = std::min(t_.k_lot, down_max);
        for (int kl = 0; kl <= kmax; ++kl) {
          double v;
          if constexpr (kExp) {
            v = inten * (t_.fill_factor[t_.lot_idx(i, q, kl)] * phi[node(iy - kl, i)] - f);
          } else {
            v = inten * ((phi[node(iy - kl, i)] - f) + t_.margin_l[t_.lot_idx(i, q, kl)]);
          }
          if (kExp ? (v < best_a) : (v > best_a)) {
            best_a = v;
            qa = q;
            kla = kl;
          }
        }
      }

      // The two passive sides are combined with one commutative addition so a
      // mirrored inventory produces the identical value.
      double h;
      if constexpr (kExp) {
        h = zeroth * f + trans + (best_b + best_a);
      } else {
        const double yu = y / params_.inventory_unit;
        h = trans + (best_b + best_a) - params_.gamma * (yu * yu);
      }
      double val = f + dtau * h;
      if constexpr (kExp) val = std::max(val, kPositivityFloor);
      out[node(iy, i)] = val;
      if (record) {
        rec_qb_[node(iy, i)] = static_cast<std::uint8_t>(qb);
        rec_qa_[node(iy, i)] = static_cast<std::uint8_t>(qa);
        rec_lb_[node(iy, i)] = klb;
        rec_la_[node(iy, i)] = kla;
      }
    }
  }
}

// Applies the market-order operator in Jacobi sweeps (so the update order
// cannot bias the result) until the slice stops changing.  A profitable chain
// of takes never revisits a node (every order costs a positive fee), so the
// sweep count is bounded by the node count.
template <bool kExp>
void Engine<kExp>::apply_interventions(std::vector<double>& cur) {
  if (t_.k_take < 1) return;
  const int max_sweeps = t_.ny + 2;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    sweep_prev_ = cur;
    bool changed = false;
    for (int iy = 0; iy < t_.ny; ++iy) {
      for (int i = 1; i <= t_.m; ++i) {
        const double base = sweep_prev_[node(iy, i)];
        const double reach = best_take<kExp>(t_, grid_, sweep_prev_, iy, i, nullptr);
        if (kExp ? (reach < base) : (reach > base)) {
          cur[node(iy, i)] = reach;
          changed = true;
        } else {
          cur[node(iy, i)] = base;
        }
      }
    }
    if (!changed) return;
  }
  throw std::runtime_error("solver: market order operator did not reach a fixed point");
}

template <bool kExp>
void Engine<kExp>::record_policy(int slice, const std::vector<double>& final_vals,
                                 const std::vector<double>& advanced, PolicyTable& policy) {
  for (int iy = 0; iy < t_.ny; ++iy) {
    for (int i = 1; i <= t_.m; ++i) {
      const std::size_t n = node(iy, i);
      bool take = false;
      if (t_.k_take >= 1) {
        if constexpr (kExp) {
          take = final_vals[n] < advanced[n] * (1.0 - params_.tie_eps);
        } else {
          take = final_vals[n] > advanced[n] + params_.tie_eps;
        }
      }
      int arg_k = 0;
      if (take) best_take<kExp>(t_, grid_, final_vals, iy, i, &arg_k);
      if (take && arg_k != 0) {
        policy.at(slice, iy, i) = TakeAction{arg_k * grid_.dy};
      } else {
        MakeAction a;
        a.qb = rec_qb_[n] != 0 ? QuoteBid::BbPlus : QuoteBid::Bb;
        a.qa = rec_qa_[n] != 0 ? QuoteAsk::BaMinus : QuoteAsk::Ba;
        a.lb = rec_lb_[n] * grid_.dy;
        a.la = rec_la_[n] * grid_.dy;
        policy.at(slice, iy, i) = a;
      }
    }
  }
}

template <bool kExp>
SolveResult Engine<kExp>::run() {
  const int m = t_.m;
  const int ny = t_.ny;
  SolveResult res;
  res.value.grid = grid_;
  res.value.m = m;
  res.value.T = params_.T;
  res.value.n_out = params_.n_out;
  res.value.data.assign(static_cast<std::size_t>(params_.n_out + 1) * ny * m, 0.0);
  res.policy.grid = grid_;
  res.policy.m = m;
  res.policy.T = params_.T;
  res.policy.n_out = params_.n_out;
  res.policy.criterion = kExp ? Criterion::exponential : Criterion::mean;
  res.policy.gamma = params_.gamma;
  res.policy.eta = kExp ? params_.eta : 0.0;
  res.policy.actions.assign(static_cast<std::size_t>(params_.n_out) * ny * m,
                            Action{MakeAction{}});

  // Substep count from the total event rate (plus the zeroth-order growth
  // rate under the exponential criterion) so the explicit update is monotone.
  double rate_max = 0;
  const double lam_max = model_.tick_clock.max_rate();
  for (int i = 0; i < m; ++i) {
    const double rb = std::max(model_.exec_bid[0][i], model_.exec_bid[1][i]);
    const double ra = std::max(model_.exec_ask[0][i], model_.exec_ask[1][i]);
    rate_max = std::max(rate_max, lam_max + rb + ra);
  }
  if constexpr (kExp) {
    const double eta = params_.eta;
    const double quad = 0.5 * model_.price.sigma * model_.price.sigma * eta * eta * grid_.y_max *
                        grid_.y_max;
    const double lin = std::abs(model_.price.b) * eta * grid_.y_max;
    rate_max += std::max(0.0, quad + lin);
  }
  const double dt_out = params_.T / params_.n_out;
  int n_sub = static_cast<int>(std::ceil(dt_out * rate_max / params_.cfl));
  n_sub = std::max(n_sub, 1);
  const double dtau = dt_out / n_sub;
  res.n_sub = n_sub;
  res.dtau = dtau;

  std::vector<double> phi(static_cast<std::size_t>(ny) * m);
  for (int iy = 0; iy < ny; ++iy) {
    const double ay = std::abs(grid_.y(iy));
    for (int i = 1; i <= m; ++i) {
      const double hs = model_.grid.half_spread(i);
      double v;
      if constexpr (kExp) {
        v = std::exp(params_.eta * ay * hs);
      } else {
        v = -ay * hs - model_.fees.fixed_fee;
      }
      phi[node(iy, i)] = v;
      res.value.at(params_.n_out, iy, i) = v;
    }
  }

  rec_qb_.assign(phi.size(), 0);
  rec_qa_.assign(phi.size(), 0);
  rec_lb_.assign(phi.size(), 0);
  rec_la_.assign(phi.size(), 0);
  std::vector<double> adv(phi.size());
  std::vector<double> before_take;

  for (int k = params_.n_out - 1; k >= 0; --k) {
    for (int s = 0; s < n_sub; ++s) {
      const bool last = (s == n_sub - 1);
      const double t_new = last ? k * dt_out : k * dt_out + (n_sub - 1 - s) * dtau;
      advance(phi, t_new, dtau, adv, last);
      if (last) before_take = adv;
      apply_interventions(adv);
      phi.swap(adv);
      if (last) record_policy(k, phi, before_take, res.policy);
    }
    for (int iy = 0; iy < ny; ++iy) {
      for (int i = 1; i <= m; ++i) res.value.at(k, iy, i) = phi[node(iy, i)];
    }
  }
  return res;
}

}  // namespace

std::string to_string(Criterion c) {
  return c == Criterion::mean ? "mean" : "exponential";
}

Criterion criterion_from_string(const std::string& s) {
  if (s == "mean" || s == "mean_penalty") return Criterion::mean;
  if (s == "exp" || s == "exponential" || s == "exponential_utility")
    return Criterion::exponential;
  throw std::invalid_argument("solver: unknown criterion '" + s + "'");
}

int SolverGrid::n_half() const {
  return static_cast<int>(std::lround(y_max / dy));
}

void SolverGrid::validate() const {
  require(std::isfinite(y_max) && y_max > 0, "y_max must be positive");
  require(std::isfinite(dy) && dy > 0, "dy must be positive");
  require(n_half() >= 1, "y_max must be at least dy");
  require(std::abs(n_half() * dy - y_max) <= 1e-9 * y_max,
          "y_max must be an integer multiple of dy");
}

void SolverParams::validate(const SolverGrid& grid) const {
  grid.validate();
  require(std::isfinite(gamma) && gamma >= 0, "gamma must be nonnegative");
  require(std::isfinite(T) && T > 0, "T must be positive");
  require(n_out >= 1, "n_out must be at least 1");
  require(std::isfinite(lot_max) && lot_max >= 0, "lot_max must be nonnegative");
  require(lot_max <= grid.y_max, "inventory grid must cover at least one full lot");
  require(std::isfinite(take_max) && take_max >= 0, "take_max must be nonnegative");
  require(std::isfinite(tie_eps) && tie_eps >= 0, "tie_eps must be nonnegative");
  require(std::isfinite(cfl) && cfl > 0 && cfl <= 1, "cfl must be in (0, 1]");
  require(std::isfinite(inventory_unit) && inventory_unit > 0,
          "inventory_unit must be positive");
}

int PolicyTable::slice_of(double t) const {
  const double dt = T / n_out;
  const int k = static_cast<int>(std::floor(t / dt));
  return std::clamp(k, 0, n_out - 1);
}

int PolicyTable::iy_of(double y, bool& clamped) const {
  clamped = false;
  long iy = std::lround((y + grid.y_max) / grid.dy);
  if (iy < 0) {
    iy = 0;
    clamped = true;
  }
  const long top = grid.n_y() - 1;
  if (iy > top) {
    iy = top;
    clamped = true;
  }
  return static_cast<int>(iy);
}

SolveResult solve_mean_criterion(const MarketModel& model, const SolverGrid& grid,
                                 const SolverParams& params) {
  model.validate();
  params.validate(grid);
  Engine<false> engine(model, grid, params);
  return engine.run();
}

SolveResult solve_exponential(const MarketModel& model, const SolverGrid& grid,
                              const SolverParams& params) {
  model.validate();
  params.validate(grid);
  require(params.gamma == 0, "exponential criterion requires gamma == 0");
  require(std::isfinite(params.eta) && params.eta > 0, "eta must be positive");
  const double eta = params.eta;
  const double ym = grid.y_max;
  const double log_range =
      eta * ym * model.grid.half_spread(model.grid.m) +
      (0.5 * model.price.sigma * model.price.sigma * eta * eta * ym * ym +
       std::abs(model.price.b) * eta * ym) *
          params.T;
  require(log_range <= kMaxLogRange,
          "exponential criterion would overflow; reduce eta, sigma, the horizon, or y_max");
  Engine<true> engine(model, grid, params);
  return engine.run();
}

std::vector<double> intervention_operator(const std::vector<double>& slice,
                                          const MarketModel& model, const SolverGrid& grid,
                                          const SolverParams& params, Criterion criterion) {
  model.validate();
  params.validate(grid);
  const bool exponential = criterion == Criterion::exponential;
  const Tables t = build_tables(model, grid, params, exponential);
  require(slice.size() == static_cast<std::size_t>(t.ny) * t.m,
          "slice size does not match the grid");
  std::vector<double> out(slice.size());
  for (int iy = 0; iy < t.ny; ++iy) {
    for (int i = 1; i <= t.m; ++i) {
      const std::size_t n = static_cast<std::size_t>(iy) * t.m + (i - 1);
      if (t.k_take < 1) {
        out[n] = exponential ? kInf : -kInf;
      } else if (exponential) {
        out[n] = best_take<true>(t, grid, slice, iy, i, nullptr);
      } else {
        out[n] = best_take<false>(t, grid, slice, iy, i, nullptr);
      }
    }
  }
  return out;
}

SolutionCheck check_solution(const SolveResult& result, const MarketModel& model,
                             const SolverGrid& grid, const SolverParams& params) {
  const ValueSurface& vs = result.value;
  const bool exponential = result.policy.criterion == Criterion::exponential;
  const std::size_t slice_size = static_cast<std::size_t>(vs.grid.n_y()) * vs.m;
  SolutionCheck out;
  out.max_intervention_gain = -kInf;
  std::vector<double> slice(slice_size);
  for (int k = 0; k <= vs.n_out; ++k) {
    const std::size_t offset = static_cast<std::size_t>(k) * slice_size;
    std::copy(vs.data.begin() + offset, vs.data.begin() + offset + slice_size, slice.begin());
    const std::vector<double> reach =
        intervention_operator(slice, model, grid, params, result.policy.criterion);
    for (std::size_t n = 0; n < slice_size; ++n) {
      const double gain = exponential ? slice[n] - reach[n] : reach[n] - slice[n];
      if (gain > out.max_intervention_gain) {
        out.max_intervention_gain = gain;
        out.worst_slice = k;
      }
    }
  }
  return out;
}

}  // namespace lobmm
