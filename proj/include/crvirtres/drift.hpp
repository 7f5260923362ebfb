#pragma once

// Per-state drift of the embedded jump chain, comparing full-spectrum
// sharing against a cooperative baseline that allocates exactly C_min
// channels per SU. Right/up jumps count positive, left/down negative.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "crvirtres/model.hpp"
#include "crvirtres/stationary.hpp"

namespace crvirtres {

class EmbeddedChain {
 public:
  EmbeddedChain() = default;
  explicit EmbeddedChain(std::size_t n) : n_(n), p_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return p_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return p_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> p_;
};

/// Jump-chain probabilities p_ij = q_ij / sum_k q_ik.
template <SquareRateMatrix Matrix>
EmbeddedChain embedded_chain(const Matrix& q) {
  const std::size_t n = q.size();
  EmbeddedChain p(n);
  for (std::size_t i = 0; i < n; ++i) {
    double out = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) out += q(i, j);
    }
    if (!(out > 0.0)) throw std::invalid_argument("absorbing state in generator");
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) p(i, j) = q(i, j) / out;
    }
  }
  return p;
}

/// How a forced-termination jump (one band right, some SUs down) enters
/// the drift.
enum class ForcedJumpRule {
  as_rightward,  // counted with the PU-arrival rate a_r
  excluded,      // dropped from numerator and denominator
};

/// (a_r + a_u - a_l - a_*) / (a_r + a_u + a_l + a_*) over the given
/// outgoing transitions of one state.
inline double state_drift(std::span<const Transition> rates, ForcedJumpRule rule = ForcedJumpRule::as_rightward) {
  double up = 0.0;
  double down = 0.0;
  for (const auto& t : rates) {
    switch (t.kind) {
      case TransitionKind::pu_arrival:
      case TransitionKind::su_arrival:
        up += t.rate;
        break;
      case TransitionKind::pu_arrival_forced:
        if (rule == ForcedJumpRule::as_rightward) up += t.rate;
        break;
      case TransitionKind::pu_departure:
      case TransitionKind::su_departure:
        down += t.rate;
        break;
    }
  }
  const double total = up + down;
  if (!(total > 0.0)) return 0.0;
  return (up - down) / total;
}

inline double state_drift(const SystemConfig& cfg, SystemState s, Allocation alloc = Allocation::full_spectrum,
                          ForcedJumpRule rule = ForcedJumpRule::as_rightward) {
  const auto rates = transition_rates(cfg, s, alloc);
  return state_drift(rates, rule);
}

struct DriftReport {
  Allocation allocation = Allocation::full_spectrum;
  std::vector<double> drift;          // forced jumps counted as rightward
  std::vector<double> drift_strict4;  // forced jumps excluded
  StationaryDistribution pi;          // of this model's own chain
  double mean_drift = 0.0;            // pi-weighted
};

inline DriftReport drift_report(const SystemConfig& cfg, const StateSpace& space, Allocation alloc) {
  DriftReport r;
  r.allocation = alloc;
  r.pi = solve_stationary(build_generator(cfg, space, alloc));
  r.drift.reserve(space.size());
  r.drift_strict4.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto rates = transition_rates(cfg, space[i], alloc);
    r.drift.push_back(state_drift(rates, ForcedJumpRule::as_rightward));
    r.drift_strict4.push_back(state_drift(rates, ForcedJumpRule::excluded));
    r.mean_drift += r.pi[i] * r.drift.back();
  }
  return r;
}

/// Both models share the admission and forced-termination rules, so they
/// live on the same state space and every state is common to both.
struct DriftComparison {
  StateSpace space;
  DriftReport fsu;
  DriftReport baseline;
  /// Baseline drift weighted by the full-spectrum stationary distribution.
  double baseline_mean_under_fsu_pi = 0.0;
};

inline DriftComparison drift_comparison(const SystemConfig& cfg) {
  validate(cfg);
  DriftComparison c;
  c.space = enumerate_states(cfg);
  c.fsu = drift_report(cfg, c.space, Allocation::full_spectrum);
  c.baseline = drift_report(cfg, c.space, Allocation::minimum);
  for (std::size_t i = 0; i < c.space.size(); ++i) c.baseline_mean_under_fsu_pi += c.fsu.pi[i] * c.baseline.drift[i];
  return c;
}

}  // namespace crvirtres
