#pragma once

#include <array>

#include "lobmm/model.hpp"

// Reference parameter set measured on the bundled level-1 sample: spread
// transition frequencies, hourly clock rates and fill intensities for a
// six-state, half-tick 0.0025 ladder. Used as the generator of synthetic
// fixtures and as the default market for end-to-end tests.
namespace testsupport {

inline constexpr int kM = 6;
inline constexpr double kDelta = 0.005;

// Raw transition frequencies; rows are normalized before use so that the
// matrix is exactly stochastic.
inline constexpr std::array<std::array<double, 6>, 6> kRhoRaw = {{
    {0.0, 0.410, 0.220, 0.160, 0.142, 0.065},
    {0.201, 0.0, 0.435, 0.192, 0.103, 0.067},
    {0.113, 0.221, 0.0, 0.4582, 0.147, 0.059},
    {0.070, 0.085, 0.275, 0.0, 0.465, 0.102},
    {0.068, 0.049, 0.073, 0.363, 0.0, 0.446},
    {0.077, 0.057, 0.059, 0.112, 0.692, 0.0},
}};

// Hourly clock rates (spread updates per second) across a 7-hour session.
inline constexpr std::array<double, 7> kClockRates = {1.654, 0.799, 0.516, 0.377,
                                                      0.632, 1.305, 2.113};

// Fill intensities per second by spread state.
inline constexpr std::array<double, 6> kBidTouch = {0.0718, 0.0520, 0.0419,
                                                    0.0409, 0.0452, 0.0614};
inline constexpr std::array<double, 6> kBidImprove = {0.1763, 0.1144, 0.0915,
                                                      0.0896, 0.0930, 0.1255};
inline constexpr std::array<double, 6> kAskTouch = {0.0539, 0.0465, 0.0401,
                                                    0.0360, 0.0435, 0.0554};
inline constexpr std::array<double, 6> kAskImprove = {0.1485, 0.0979, 0.0846,
                                                      0.0856, 0.1009, 0.1202};

inline std::vector<std::vector<double>> normalized_rho() {
  std::vector<std::vector<double>> rho(kM, std::vector<double>(kM, 0.0));
  for (int i = 0; i < kM; ++i) {
    double sum = 0;
    for (int j = 0; j < kM; ++j) sum += kRhoRaw[i][j];
    for (int j = 0; j < kM; ++j) rho[i][j] = kRhoRaw[i][j] / sum;
  }
  return rho;
}

// Unit-rate clock, reference intensities, standard fee schedule, driftless
// mid price started at 45.
inline lobmm::MarketModel make_reference_model() {
  lobmm::MarketModel model;
  model.grid = {kDelta, kM};
  model.rho = normalized_rho();
  model.tick_clock.boundaries = {0.0, 1e9};
  model.tick_clock.rates = {1.0};
  model.exec_bid = {{kBidTouch.begin(), kBidTouch.end()}, {kBidImprove.begin(), kBidImprove.end()}};
  model.exec_ask = {{kAskTouch.begin(), kAskTouch.end()}, {kAskImprove.begin(), kAskImprove.end()}};
  model.fees = {0.0008, 0.0012, 1e-6};
  model.price = {lobmm::PriceModel::Kind::martingale, 0.0, 0.0015, 45.0};
  model.validate();
  return model;
}

}  // namespace testsupport
