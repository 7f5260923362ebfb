#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "crvirtres/model.hpp"

namespace crvirtres {

/// Balance residual accepted by the end-to-end pipeline.
inline constexpr double kResidualTolerance = 1e-10;

template <class M>
concept SquareRateMatrix = requires(const M& m, std::size_t i) {
  { m.size() } -> std::convertible_to<std::size_t>;
  { m(i, i) } -> std::convertible_to<double>;
};

class StationaryDistribution {
 public:
  StationaryDistribution() = default;
  explicit StationaryDistribution(std::vector<double> p) : p_(std::move(p)) {}

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probabilities() const { return p_; }
  auto begin() const { return p_.begin(); }
  auto end() const { return p_.end(); }

 private:
  std::vector<double> p_;
};

/// Stationary vector by Grassmann-Taksar-Heyman state reduction. Only
/// off-diagonal rates are read; the elimination never subtracts, so it stays
/// accurate when rates differ by many orders of magnitude.
template <SquareRateMatrix Matrix>
StationaryDistribution solve_stationary(const Matrix& q) {
  const std::size_t n = q.size();
  if (n == 0) throw std::invalid_argument("empty generator");
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = i == j ? 0.0 : static_cast<double>(q(i, j));
  }
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  // Censor states n-1, ..., 1 out of the chain one at a time.
  std::vector<double> exit_rate(n, 0.0);
  for (std::size_t k = n - 1; k >= 1; --k) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += at(k, j);
    if (!(s > 0.0)) throw std::invalid_argument("generator is reducible");
    exit_rate[k] = s;
    for (std::size_t i = 0; i < k; ++i) {
      const double into_k = at(i, k);
      if (into_k == 0.0) continue;
      const double scale = into_k / s;
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) at(i, j) += scale * at(k, j);
      }
    }
  }

  std::vector<double> pi(n, 0.0);
  pi[0] = 1.0;
  double total = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    double inflow = 0.0;
    for (std::size_t i = 0; i < k; ++i) inflow += pi[i] * at(i, k);
    pi[k] = inflow / exit_rate[k];
    total += pi[k];
  }
  for (auto& p : pi) {
    p /= total;
    if (p < -1e-14 || !std::isfinite(p)) throw std::runtime_error("malformed generator: negative probability");
    p = std::max(p, 0.0);
  }
  return StationaryDistribution(std::move(pi));
}

/// Infinity norm of pi * Q.
template <SquareRateMatrix Matrix>
double residual(const Matrix& q, std::span<const double> pi) {
  const std::size_t n = q.size();
  if (pi.size() != n) throw std::invalid_argument("dimension mismatch between generator and distribution");
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += pi[i] * q(i, j);
    worst = std::max(worst, std::abs(col));
  }
  return worst;
}

template <SquareRateMatrix Matrix>
double residual(const Matrix& q, const StationaryDistribution& pi) {
  return residual(q, pi.probabilities());
}

}  // namespace crvirtres
