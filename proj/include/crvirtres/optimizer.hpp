#pragma once

// Reservation level minimizing zeta = alpha * P_FT + P_B.

#include <span>
#include <stdexcept>
#include <vector>

#include "crvirtres/kpi.hpp"

namespace crvirtres {

struct CostPoint {
  int reserved = 0;
  double alpha = 1.0;
  double p_ft = 0.0;
  double p_block = 0.0;
  double zeta = 0.0;
};

struct OptimalPolicy {
  SystemConfig config;  // with reserved = r_star
  double alpha = 1.0;
  int r_star = 0;
  double zeta_star = 0.0;
  std::vector<CostPoint> curve;  // r = 0 .. C - C_min
};

inline CostPoint objective(const SystemConfig& cfg, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  const auto k = compute_kpis(cfg);
  return {cfg.reserved, alpha, k.p_ft, k.p_block, alpha * k.p_ft + k.p_block};
}

/// Exhaustive search over every feasible integer r. Ties go to the smallest r.
inline OptimalPolicy optimal_reservation(const SystemConfig& config_template, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  validate(with_reserved(config_template, 0));
  OptimalPolicy best;
  best.alpha = alpha;
  const int r_max = config_template.total_channels() - config_template.min_channels;
  for (int r = 0; r <= r_max; ++r) {
    const auto point = objective(with_reserved(config_template, r), alpha);
    if (best.curve.empty() || point.zeta < best.zeta_star) {
      best.r_star = r;
      best.zeta_star = point.zeta;
    }
    best.curve.push_back(point);
  }
  best.config = with_reserved(config_template, best.r_star);
  return best;
}

struct SweepPoint {
  double pu_arrival = 0.0;
  double rho_s = 0.0;
  OptimalPolicy policy;
};

/// One optimal policy per (lambda_p, rho_s) grid point, lambda_p outermost.
/// lambda_s follows rho_s through lambda_s = rho_s * mu_2.
inline std::vector<SweepPoint> sweep(const SystemConfig& config_template, double alpha,
                                     std::span<const double> pu_arrivals, std::span<const double> rho_s_grid) {
  std::vector<SweepPoint> out;
  out.reserve(pu_arrivals.size() * rho_s_grid.size());
  for (double lp : pu_arrivals) {
    for (double rho : rho_s_grid) {
      auto cfg = config_template;
      cfg.pu_arrival = lp;
      cfg.su_arrival = rho * cfg.mu2();
      out.push_back({lp, rho, optimal_reservation(cfg, alpha)});
    }
  }
  return out;
}

}  // namespace crvirtres
