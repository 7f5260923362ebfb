#pragma once

// Two-dimensional CTMC over (active PUs, active SUs): admission and
// forced-termination rules, reachable state space, and generator assembly.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "crvirtres/config.hpp"

namespace crvirtres {

struct SystemState {
  int pu = 0;  // n_p
  int su = 0;  // n_s

  auto operator<=>(const SystemState&) const = default;
};

/// How idle spectrum is split among active SUs. Full-spectrum sharing gives
/// every idle channel to the SUs and scales their service rate with the
/// allocation; minimum allocation gives each SU exactly C_min channels.
enum class Allocation { full_spectrum, minimum };

enum class TransitionKind { pu_arrival, pu_arrival_forced, su_arrival, pu_departure, su_departure };

struct Transition {
  SystemState target;
  double rate = 0.0;
  TransitionKind kind = TransitionKind::pu_arrival;
};

struct PuArrivalOutcome {
  SystemState next;
  int dropped = 0;

  bool operator==(const PuArrivalOutcome&) const = default;
};

/// Channels left for SUs once n_p bands are taken by PUs.
inline int free_channels(const SystemConfig& cfg, int pu) {
  return cfg.channels_per_band * (cfg.bands - pu);
}

/// A new SU is admitted iff C - N*n_p - r - C_min*(n_s+1) >= 0.
inline bool admits_su(const SystemConfig& cfg, SystemState s) {
  return cfg.total_channels() - cfg.channels_per_band * s.pu - cfg.reserved -
             cfg.min_channels * (s.su + 1) >=
         0;
}

/// Effect of a PU arrival. SUs that no longer fit at C_min channels each are
/// force-terminated, leaving floor((C - N*(n_p+1)) / C_min) survivors.
inline PuArrivalOutcome pu_arrival_outcome(const SystemConfig& cfg, SystemState s) {
  if (s.pu >= cfg.bands) throw std::invalid_argument("PU arrival with all bands occupied is lost");
  const int remaining = free_channels(cfg, s.pu + 1);
  if (remaining >= cfg.min_channels * s.su) return {{s.pu + 1, s.su}, 0};
  const int survivors = remaining / cfg.min_channels;
  return {{s.pu + 1, survivors}, s.su - survivors};
}

/// Largest PU count that can coexist with n_s SUs; M when n_s = 0.
inline int max_pu(const SystemConfig& cfg, int su) {
  if (su <= 0) return cfg.bands;
  // floor(M - n_s*C_min/N) computed exactly in integers
  const int numerator = cfg.bands * cfg.channels_per_band - su * cfg.min_channels;
  const int n = cfg.channels_per_band;
  return numerator >= 0 ? numerator / n : -((-numerator + n - 1) / n);
}

/// Largest SU count admissible with n_p PUs present, floored at zero.
inline int max_su(const SystemConfig& cfg, int pu) {
  const int room = cfg.total_channels() - cfg.channels_per_band * pu - cfg.reserved;
  return room > 0 ? room / cfg.min_channels : 0;
}

/// Aggregate SU departure rate in a state. Under full-spectrum sharing the
/// n_s SUs split N*(M-n_p) channels, each served at mu_s * share / C_min, so
/// the total is N*(M-n_p)*mu_s/C_min independent of n_s.
inline double su_departure_rate(const SystemConfig& cfg, SystemState s, Allocation alloc) {
  if (s.su < 1) return 0.0;
  if (alloc == Allocation::minimum) return s.su * cfg.su_service;
  return static_cast<double>(free_channels(cfg, s.pu)) * cfg.su_service / cfg.min_channels;
}

/// All nonzero outgoing rates of a state. PU arrivals at n_p = M are lost
/// and produce no transition.
inline std::vector<Transition> transition_rates(const SystemConfig& cfg, SystemState s,
                                                Allocation alloc = Allocation::full_spectrum) {
  std::vector<Transition> out;
  out.reserve(4);
  if (s.pu < cfg.bands) {
    const auto outcome = pu_arrival_outcome(cfg, s);
    out.push_back({outcome.next, cfg.pu_arrival,
                   outcome.dropped > 0 ? TransitionKind::pu_arrival_forced : TransitionKind::pu_arrival});
  }
  if (admits_su(cfg, s)) out.push_back({{s.pu, s.su + 1}, cfg.su_arrival, TransitionKind::su_arrival});
  if (s.pu >= 1) {
    out.push_back({{s.pu - 1, s.su}, s.pu * cfg.pu_service, TransitionKind::pu_departure});
  }
  if (s.su >= 1) {
    out.push_back({{s.pu, s.su - 1}, su_departure_rate(cfg, s, alloc), TransitionKind::su_departure});
  }
  return out;
}

/// Reachable states in lexicographic (n_p, n_s) order with a dense index.
class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<SystemState> states) : states_(std::move(states)) {
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (!index_.emplace(states_[i], i).second) throw std::invalid_argument("duplicate state");
    }
  }

  std::size_t size() const { return states_.size(); }
  const SystemState& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<SystemState>& states() const { return states_; }
  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }

  std::optional<std::size_t> index_of(SystemState s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(SystemState s) const { return index_.contains(s); }

 private:
  std::vector<SystemState> states_;
  std::map<SystemState, std::size_t> index_;
};

/// Breadth-first closure of (0,0) under the transition rules. The result is
/// not a rectangle: a PU arrival that triggers no forced termination can
/// leave more SUs than the admission bound allows (overflow states).
inline StateSpace enumerate_states(const SystemConfig& cfg) {
  std::map<SystemState, bool> seen;
  std::deque<SystemState> frontier{SystemState{0, 0}};
  seen[SystemState{0, 0}] = true;
  while (!frontier.empty()) {
    const SystemState s = frontier.front();
    frontier.pop_front();
    for (const auto& t : transition_rates(cfg, s)) {
      if (seen.emplace(t.target, true).second) frontier.push_back(t.target);
    }
  }
  std::vector<SystemState> states;
  states.reserve(seen.size());
  for (const auto& [s, _] : seen) states.push_back(s);
  return StateSpace(std::move(states));
}

/// Dense row-major infinitesimal generator.
class GeneratorMatrix {
 public:
  GeneratorMatrix() = default;
  explicit GeneratorMatrix(std::size_t n) : n_(n), q_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return q_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return q_[i * n_ + j]; }

  /// Sets every diagonal entry to the negated off-diagonal row sum.
  void close_rows() {
    for (std::size_t i = 0; i < n_; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (j != i) sum += (*this)(i, j);
      }
      (*this)(i, i) = -sum;
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> q_;
};

inline GeneratorMatrix build_generator(const SystemConfig& cfg, const StateSpace& space,
                                       Allocation alloc = Allocation::full_spectrum) {
  GeneratorMatrix q(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (const auto& t : transition_rates(cfg, space[i], alloc)) {
      const auto j = space.index_of(t.target);
      if (!j) throw std::logic_error("transition leaves the enumerated state space");
      q(i, *j) += t.rate;
    }
  }
  q.close_rows();
  return q;
}

}  // namespace crvirtres
