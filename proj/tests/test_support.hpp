#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "crvirtres/config.hpp"
#include "crvirtres/model.hpp"

namespace crvirtres::testing {

/// M=1, N=1, C_min=1, r=0, all rates 1. Hand solve of the three-state chain
/// gives pi(0,0)=1/3, pi(0,1)=1/6, pi(1,0)=1/2.
inline SystemConfig tiny_config() { return SystemConfig{1, 1, 1, 0, 1.0, 1.0, 1.0, 1.0}; }

/// M=3 bands of N=4 channels, C_min=2, r=2.
inline SystemConfig three_bands_of_four() { return SystemConfig{3, 4, 2, 2, 1.0, 1.0, 1.0, 1.0}; }

/// Dense solve of pi Q = 0, sum(pi) = 1 by replacing one balance equation
/// with the normalization row. Independent of the state-reduction solver.
template <class Matrix>
std::vector<double> lu_stationary(const Matrix& q) {
  const auto n = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(j, i) = q(i, j);  // transpose
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  a.row(n - 1).setOnes();
  b(n - 1) = 1.0;
  const Eigen::VectorXd pi = a.fullPivLu().solve(b);
  return {pi.data(), pi.data() + n};
}

/// Random valid configs spanning small band layouts, every feasible r, and
/// rates over two orders of magnitude.
inline std::vector<SystemConfig> random_configs(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> bands(1, 5), per_band(1, 6);
  std::uniform_real_distribution<double> log_rate(-1.0, 1.0);
  auto rate = [&] { return std::pow(10.0, log_rate(rng)); };
  std::vector<SystemConfig> out;
  while (static_cast<int>(out.size()) < count) {
    SystemConfig c;
    c.bands = bands(rng);
    c.channels_per_band = per_band(rng);
    const int total = c.bands * c.channels_per_band;
    c.min_channels = std::uniform_int_distribution<int>(1, std::min(total, 4))(rng);
    c.reserved = std::uniform_int_distribution<int>(0, total - c.min_channels)(rng);
    c.pu_arrival = rate();
    c.pu_service = rate();
    c.su_arrival = rate();
    c.su_service = rate();
    out.push_back(c);
  }
  return out;
}

}  // namespace crvirtres::testing
