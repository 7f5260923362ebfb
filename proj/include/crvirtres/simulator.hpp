#pragma once

// Discrete-event simulation of PU/SU traffic under three spectrum policies,
// with replication-based Student-t confidence intervals.
//
//  * fsu_virtual_reservation: the analytical model. Idle channels are shared
//    by all active SUs, so the aggregate SU departure rate is
//    N*(M-n_p)*mu_s/C_min; by memorylessness the next departure can be
//    resampled at every event and the (n_p, n_s) process matches the CTMC.
//  * min_alloc_cooperative: same admission and forced-termination rules,
//    each SU holds exactly C_min channels (departure rate n_s*mu_s).
//  * non_cooperative: channel-level model without reservation. A new SU
//    grabs C_min random idle channels. A PU lands on a uniformly chosen free
//    band; every SU holding channels there hands off to idle channels
//    elsewhere if enough remain, otherwise it is forced to terminate.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crvirtres/kpi.hpp"
#include "crvirtres/model.hpp"

namespace crvirtres {

enum class PolicyVariant { fsu_virtual_reservation, min_alloc_cooperative, non_cooperative };

inline std::string_view to_string(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::fsu_virtual_reservation: return "fsu";
    case PolicyVariant::min_alloc_cooperative: return "min_alloc";
    case PolicyVariant::non_cooperative: return "nc";
  }
  return "?";
}

inline std::optional<PolicyVariant> parse_policy(std::string_view s) {
  if (s == "fsu" || s == "fsu_virtual_reservation") return PolicyVariant::fsu_virtual_reservation;
  if (s == "min_alloc" || s == "min_alloc_cooperative") return PolicyVariant::min_alloc_cooperative;
  if (s == "nc" || s == "non_cooperative") return PolicyVariant::non_cooperative;
  return std::nullopt;
}

struct SimPolicy {
  PolicyVariant variant = PolicyVariant::fsu_virtual_reservation;
  int reserved = 0;

  static SimPolicy fsu(int r) { return {PolicyVariant::fsu_virtual_reservation, r}; }
  static SimPolicy min_alloc(int r) { return {PolicyVariant::min_alloc_cooperative, r}; }
  static SimPolicy non_cooperative() { return {PolicyVariant::non_cooperative, 0}; }

  bool operator==(const SimPolicy&) const = default;
};

struct SimSettings {
  double horizon = 1e5;
  int replications = 10;
  std::uint64_t seed = 1;
};

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% two-sided

  bool covers(double value) const { return std::abs(value - mean) <= half_width; }
};

struct ReplicationResult {
  std::uint64_t su_arrivals = 0;
  std::uint64_t admissions = 0;
  std::uint64_t blocks = 0;
  std::uint64_t ft_events = 0;   // SUs forced to terminate
  std::uint64_t pu_lost = 0;     // PU arrivals finding every band busy
  double reward_time = 0.0;      // integral of channels-per-SU over SU-occupied time
  double occupied_time = 0.0;    // time with n_s >= 1
  double sim_time = 0.0;
  std::map<SystemState, double> time_in_state;
};

struct SimKpiReport {
  SimPolicy policy;
  SimSettings settings;
  std::optional<Estimate> p_block;  // empty when no SU ever arrived
  Estimate p_ft;
  Estimate c_avg;
  Estimate c_avg_conditional;
  std::uint64_t su_arrivals = 0;
  std::uint64_t admissions = 0;
  std::uint64_t blocks = 0;
  std::uint64_t ft_events = 0;
  double sim_time = 0.0;
  std::vector<ReplicationResult> replications;

  /// Pooled fraction of simulated time spent in each (n_p, n_s).
  std::map<SystemState, double> occupancy() const {
    std::map<SystemState, double> out;
    for (const auto& rep : replications) {
      for (const auto& [s, t] : rep.time_in_state) out[s] += t;
    }
    for (auto& [s, t] : out) t /= sim_time;
    return out;
  }
};

namespace detail {

using Rng = std::mt19937_64;

/// Independent stream for one replication, derived only from (seed, index).
inline Rng replication_stream(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  return Rng(seq);
}

inline double exponential(Rng& rng, double rate) {
  return std::exponential_distribution<double>(rate)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline Estimate mean_and_half_width(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, std::numeric_limits<double>::infinity()};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {mean, t * sd / std::sqrt(n)};
}

/// Time-weighted bookkeeping shared by all policies.
struct Recorder {
  ReplicationResult& out;
  void dwell(SystemState s, double dt, double per_su_channels) {
    out.time_in_state[s] += dt;
    out.sim_time += dt;
    if (s.su >= 1) {
      out.occupied_time += dt;
      out.reward_time += per_su_channels * dt;
    }
  }
};

inline ReplicationResult run_aggregate(const SystemConfig& cfg, Allocation alloc, double horizon, Rng& rng) {
  ReplicationResult res;
  Recorder rec{res};
  SystemState s{0, 0};
  double t = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    const double a_pa = cfg.pu_arrival;
    const double a_sa = cfg.su_arrival;
    const double a_pd = s.pu * cfg.pu_service;
    const double a_sd = su_departure_rate(cfg, s, alloc);
    const double total = a_pa + a_sa + a_pd + a_sd;
    const double dt = exponential(rng, total);
    const double share = s.su >= 1 ? (alloc == Allocation::full_spectrum
                                          ? static_cast<double>(free_channels(cfg, s.pu)) / s.su
                                          : static_cast<double>(cfg.min_channels))
                                    : 0.0;
    if (t + dt >= horizon) {
      rec.dwell(s, horizon - t, share);
      break;
    }
    rec.dwell(s, dt, share);
    t += dt;

    double u = unit(rng) * total;
    if (u < a_pa) {
      if (s.pu < cfg.bands) {
        const auto outcome = pu_arrival_outcome(cfg, s);
        res.ft_events += static_cast<std::uint64_t>(outcome.dropped);
        s = outcome.next;
      } else {
        ++res.pu_lost;
      }
    } else if ((u -= a_pa) < a_sa) {
      ++res.su_arrivals;
      if (admits_su(cfg, s)) {
        ++res.admissions;
        ++s.su;
      } else {
        ++res.blocks;
      }
    } else if ((u -= a_sa) < a_pd) {
      --s.pu;
    } else if (s.su >= 1) {
      --s.su;
    }
  }
  return res;
}

/// Channel-level state of the non-cooperative policy.
class ChannelMap {
 public:
  static constexpr int kIdle = -1;
  static constexpr int kPrimary = -2;

  explicit ChannelMap(const SystemConfig& cfg)
      : cfg_(cfg), owner_(static_cast<std::size_t>(cfg.total_channels()), kIdle),
        idle_pos_(owner_.size()), band_busy_(static_cast<std::size_t>(cfg.bands), false) {
    for (int c = 0; c < cfg.total_channels(); ++c) {
      idle_pos_[c] = idle_.size();
      idle_.push_back(c);
    }
  }

  SystemState state() const { return {pu_count_, static_cast<int>(active_.size())}; }
  std::size_t idle_count() const { return idle_.size(); }

  bool admit(Rng& rng) {
    if (idle_.size() < static_cast<std::size_t>(cfg_.min_channels)) return false;
    int id = next_id_++;
    auto& chans = held_[id];
    for (int k = 0; k < cfg_.min_channels; ++k) chans.push_back(take_random_idle(rng, id));
    active_.push_back(id);
    return true;
  }

  void depart_random_su(Rng& rng) {
    const std::size_t k = uniform_index(rng, active_.size());
    terminate(active_[k]);
  }

  void depart_random_pu(Rng& rng) {
    std::vector<int> busy;
    for (int b = 0; b < cfg_.bands; ++b) {
      if (band_busy_[b]) busy.push_back(b);
    }
    const int b = busy[uniform_index(rng, busy.size())];
    band_busy_[b] = false;
    --pu_count_;
    for (int c = b * cfg_.channels_per_band; c < (b + 1) * cfg_.channels_per_band; ++c) release(c);
  }

  /// Returns the number of SUs forced to terminate, or nullopt if the PU
  /// found every band busy.
  std::optional<int> pu_arrival(Rng& rng) {
    std::vector<int> free_bands;
    for (int b = 0; b < cfg_.bands; ++b) {
      if (!band_busy_[b]) free_bands.push_back(b);
    }
    if (free_bands.empty()) return std::nullopt;
    const int b = free_bands[uniform_index(rng, free_bands.size())];
    band_busy_[b] = true;
    ++pu_count_;

    std::vector<int> displaced;
    std::map<int, int> lost;
    for (int c = b * cfg_.channels_per_band; c < (b + 1) * cfg_.channels_per_band; ++c) {
      const int who = owner_[c];
      if (who == kIdle) remove_idle(c);
      if (who >= 0) {
        if (lost[who]++ == 0) displaced.push_back(who);
        auto& chans = held_[who];
        chans.erase(std::find(chans.begin(), chans.end(), c));
      }
      owner_[c] = kPrimary;
    }
    std::shuffle(displaced.begin(), displaced.end(), rng);
    int dropped = 0;
    for (int who : displaced) {
      const int need = lost[who];
      if (idle_.size() >= static_cast<std::size_t>(need)) {
        for (int k = 0; k < need; ++k) held_[who].push_back(take_random_idle(rng, who));
      } else {
        terminate(who);
        ++dropped;
      }
    }
    return dropped;
  }

  /// Channels held by SUs plus channels inside PU bands; never exceeds C.
  int channels_in_use() const {
    int used = pu_count_ * cfg_.channels_per_band;
    for (const auto& [id, chans] : held_) used += static_cast<int>(chans.size());
    return used;
  }

 private:
  int take_random_idle(Rng& rng, int who) {
    const std::size_t k = uniform_index(rng, idle_.size());
    const int c = idle_[k];
    remove_idle(c);
    owner_[c] = who;
    return c;
  }

  void remove_idle(int c) {
    const std::size_t k = idle_pos_[c];
    const int last = idle_.back();
    idle_[k] = last;
    idle_pos_[last] = k;
    idle_.pop_back();
  }

  void release(int c) {
    owner_[c] = kIdle;
    idle_pos_[c] = idle_.size();
    idle_.push_back(c);
  }

  void terminate(int who) {
    for (int c : held_[who]) release(c);
    held_.erase(who);
    active_.erase(std::find(active_.begin(), active_.end(), who));
  }

  SystemConfig cfg_;
  std::vector<int> owner_;
  std::vector<int> idle_;
  std::vector<std::size_t> idle_pos_;
  std::vector<bool> band_busy_;
  std::map<int, std::vector<int>> held_;
  std::vector<int> active_;
  int pu_count_ = 0;
  int next_id_ = 0;
};

inline ReplicationResult run_non_cooperative(const SystemConfig& cfg, double horizon, Rng& rng) {
  ReplicationResult res;
  Recorder rec{res};
  ChannelMap channels(cfg);
  double t = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    const SystemState s = channels.state();
    const double a_pa = cfg.pu_arrival;
    const double a_sa = cfg.su_arrival;
    const double a_pd = s.pu * cfg.pu_service;
    const double a_sd = s.su * cfg.su_service;
    const double total = a_pa + a_sa + a_pd + a_sd;
    const double dt = exponential(rng, total);
    const double share = static_cast<double>(cfg.min_channels);
    if (t + dt >= horizon) {
      rec.dwell(s, horizon - t, share);
      break;
    }
    rec.dwell(s, dt, share);
    t += dt;

    double u = unit(rng) * total;
    if (u < a_pa) {
      if (auto dropped = channels.pu_arrival(rng)) {
        res.ft_events += static_cast<std::uint64_t>(*dropped);
      } else {
        ++res.pu_lost;
      }
    } else if ((u -= a_pa) < a_sa) {
      ++res.su_arrivals;
      if (channels.admit(rng)) {
        ++res.admissions;
      } else {
        ++res.blocks;
      }
    } else if ((u -= a_sa) < a_pd) {
      channels.depart_random_pu(rng);
    } else if (s.su >= 1) {
      channels.depart_random_su(rng);
    }
  }
  return res;
}

}  // namespace detail

/// Replications run in index order on independent pre-derived streams, so
/// the report depends only on (config, policy, settings).
inline SimKpiReport simulate(const SystemConfig& cfg, const SimPolicy& policy, const SimSettings& settings) {
  validate_structure(cfg);
  if (!(cfg.pu_arrival > 0.0) || !(cfg.pu_service > 0.0) || !(cfg.su_service > 0.0) || !(cfg.su_arrival >= 0.0)) {
    throw ConfigError("simulation needs positive lambda_p, mu_p, mu_s and non-negative lambda_s");
  }
  if (!(settings.horizon > 0.0) || !std::isfinite(settings.horizon)) {
    throw std::invalid_argument("horizon must be positive");
  }
  if (settings.replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (policy.variant == PolicyVariant::non_cooperative) {
    if (policy.reserved != 0) throw std::invalid_argument("non_cooperative policy has no reservation (r must be 0)");
  } else if (policy.reserved != cfg.reserved) {
    throw std::invalid_argument("policy reservation does not match config r");
  }

  SimKpiReport report;
  report.policy = policy;
  report.settings = settings;
  std::vector<double> pb, pft, cavg, ccond;
  for (int i = 0; i < settings.replications; ++i) {
    auto rng = detail::replication_stream(settings.seed, i);
    ReplicationResult rep;
    switch (policy.variant) {
      case PolicyVariant::fsu_virtual_reservation:
        rep = detail::run_aggregate(cfg, Allocation::full_spectrum, settings.horizon, rng);
        break;
      case PolicyVariant::min_alloc_cooperative:
        rep = detail::run_aggregate(cfg, Allocation::minimum, settings.horizon, rng);
        break;
      case PolicyVariant::non_cooperative: {
        auto nc = cfg;
        nc.reserved = 0;
        rep = detail::run_non_cooperative(nc, settings.horizon, rng);
        break;
      }
    }
    if (rep.su_arrivals > 0) pb.push_back(static_cast<double>(rep.blocks) / static_cast<double>(rep.su_arrivals));
    pft.push_back(rep.admissions > 0 ? static_cast<double>(rep.ft_events) / static_cast<double>(rep.admissions) : 0.0);
    cavg.push_back(rep.reward_time / rep.sim_time);
    ccond.push_back(rep.occupied_time > 0.0 ? rep.reward_time / rep.occupied_time : 0.0);
    report.su_arrivals += rep.su_arrivals;
    report.admissions += rep.admissions;
    report.blocks += rep.blocks;
    report.ft_events += rep.ft_events;
    report.sim_time += rep.sim_time;
    report.replications.push_back(std::move(rep));
  }
  if (!pb.empty()) report.p_block = detail::mean_and_half_width(pb);
  report.p_ft = detail::mean_and_half_width(pft);
  report.c_avg = detail::mean_and_half_width(cavg);
  report.c_avg_conditional = detail::mean_and_half_width(ccond);
  return report;
}

struct KpiCheck {
  std::string name;
  double analytical = 0.0;
  Estimate simulated;
  double abs_gap = 0.0;
  double rel_gap = 0.0;
  bool covered = false;
};

struct ValidationReport {
  KpiReport analytical;
  SimKpiReport simulated;
  std::vector<KpiCheck> checks;

  bool all_covered() const {
    return std::all_of(checks.begin(), checks.end(), [](const KpiCheck& c) { return c.covered; });
  }
};

/// Per-KPI gap and CI-coverage verdict of a simulation against an analytical
/// report. The two need not come from the same config; a mismatch is exactly
/// what this is meant to catch.
inline ValidationReport compare(const KpiReport& analytical, const SimKpiReport& simulated) {
  ValidationReport v{analytical, simulated, {}};
  auto check = [&](std::string name, double exact, std::optional<Estimate> est) {
    KpiCheck c;
    c.name = std::move(name);
    c.analytical = exact;
    if (est) {
      c.simulated = *est;
      c.abs_gap = std::abs(est->mean - exact);
      c.rel_gap = exact != 0.0 ? c.abs_gap / std::abs(exact) : c.abs_gap;
      c.covered = est->covers(exact);
    } else {
      c.simulated = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
      c.abs_gap = c.rel_gap = std::numeric_limits<double>::quiet_NaN();
    }
    v.checks.push_back(std::move(c));
  };
  check("p_block", analytical.p_block, simulated.p_block);
  check("p_ft", analytical.p_ft, simulated.p_ft);
  check("c_avg", analytical.c_avg, simulated.c_avg);
  return v;
}

/// Solves the chain and simulates the full-spectrum policy on the same config.
inline ValidationReport cross_validate(const SystemConfig& cfg, const SimSettings& settings) {
  return compare(compute_kpis(cfg), simulate(cfg, SimPolicy::fsu(cfg.reserved), settings));
}

}  // namespace crvirtres
