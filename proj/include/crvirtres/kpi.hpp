#pragma once

// SU blocking probability, forced-termination probability and per-SU
// throughput computed from the stationary distribution.

#include <cstddef>
#include <stdexcept>

#include "crvirtres/model.hpp"
#include "crvirtres/stationary.hpp"

namespace crvirtres {

struct KpiReport {
  SystemConfig config;
  std::size_t states = 0;
  double residual = 0.0;
  double p_block = 0.0;
  double p_ft = 0.0;
  /// Reward-weighted sum over SU-occupied states, unconditioned.
  double c_avg = 0.0;
  /// c_avg / P(n_s >= 1): mean channels per SU given at least one SU is active.
  double c_avg_conditional = 0.0;
  double su_occupancy = 0.0;  // P(n_s >= 1)
};

namespace detail {
inline void require_matching(const StateSpace& space, const StationaryDistribution& pi) {
  if (space.size() != pi.size()) throw std::invalid_argument("dimension mismatch between states and distribution");
}
}  // namespace detail

/// Stationary mass of states in which a new SU would be rejected, i.e.
/// N*n_p + C_min*(n_s+1) + r > C.
inline double blocking_probability(const SystemConfig& cfg, const StateSpace& space,
                                   const StationaryDistribution& pi) {
  detail::require_matching(space, pi);
  double p = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!admits_su(cfg, space[i])) p += pi[i];
  }
  return p;
}

/// Rate of SU forced terminations divided by the rate of SU admissions:
/// sum(U_d * lambda_p * pi) / ((1 - P_B) * lambda_s).
inline double forced_termination_probability(const SystemConfig& cfg, const StateSpace& space,
                                             const StationaryDistribution& pi, double p_block) {
  detail::require_matching(space, pi);
  const double admission_rate = (1.0 - p_block) * cfg.su_arrival;
  if (!(admission_rate > 0.0)) throw std::domain_error("no SU is ever admitted (P_B = 1)");
  double ft_rate = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto s = space[i];
    if (s.pu >= cfg.bands) continue;
    const int dropped = pu_arrival_outcome(cfg, s).dropped;
    if (dropped > 0) ft_rate += dropped * cfg.pu_arrival * pi[i];
  }
  return ft_rate / admission_rate;
}

/// Markov reward with reward N*(M-n_p)/n_s on every state with n_s >= 1.
inline double average_throughput(const SystemConfig& cfg, const StateSpace& space,
                                 const StationaryDistribution& pi) {
  detail::require_matching(space, pi);
  double c = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto s = space[i];
    if (s.su >= 1) c += static_cast<double>(free_channels(cfg, s.pu)) / s.su * pi[i];
  }
  return c;
}

inline double su_occupancy(const StateSpace& space, const StationaryDistribution& pi) {
  detail::require_matching(space, pi);
  double p = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space[i].su >= 1) p += pi[i];
  }
  return p;
}

/// Enumerate, assemble, solve and evaluate all KPIs for one config.
inline KpiReport compute_kpis(const SystemConfig& cfg) {
  validate(cfg);
  const auto space = enumerate_states(cfg);
  const auto q = build_generator(cfg, space);
  const auto pi = solve_stationary(q);

  KpiReport r;
  r.config = cfg;
  r.states = space.size();
  r.residual = residual(q, pi);
  if (!(r.residual < kResidualTolerance)) throw std::runtime_error("stationary solve failed the balance residual check");
  r.p_block = blocking_probability(cfg, space, pi);
  r.p_ft = forced_termination_probability(cfg, space, pi, r.p_block);
  r.c_avg = average_throughput(cfg, space, pi);
  r.su_occupancy = su_occupancy(space, pi);
  r.c_avg_conditional = r.su_occupancy > 0.0 ? r.c_avg / r.su_occupancy : 0.0;
  return r;
}

}  // namespace crvirtres
