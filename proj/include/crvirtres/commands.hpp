#pragma once

// CSV-producing commands behind the crvirtres executable. Each command
// writes a fixed header line followed by data rows; see README.md for the
// column definitions.

#include <array>
#include <exception>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "crvirtres/drift.hpp"
#include "crvirtres/kpi.hpp"
#include "crvirtres/optimizer.hpp"
#include "crvirtres/scenario.hpp"
#include "crvirtres/simulator.hpp"

namespace crvirtres {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitInputError = 2;

inline constexpr std::array<std::string_view, 10> kCommands = {
    "solve",      "simulate", "validate",  "optimize",  "sweep-pft",
    "sweep-pb",   "sweep-throughput", "sweep-mu1", "sweep-cmin", "drift"};

inline constexpr std::string_view kSolveHeader =
    "M,N,C_min,r,lambda_p,mu_p,lambda_s,mu_s,rho_p,rho_s,states,residual,p_block,p_ft,c_avg_unconditioned,"
    "c_avg_conditional";
inline constexpr std::string_view kSweepHeader =
    "axis_value,lambda_p,rho_p,rho_s,mu1,C_min,r,p_block,p_ft,c_avg_unconditioned,c_avg_conditional";
inline constexpr std::string_view kOptimizeHeader = "lambda_p,rho_p,rho_s,alpha,r_star,zeta_star";
inline constexpr std::string_view kDriftHeader = "n_p,n_s,drift_fsu,drift_baseline,drift_fsu_strict4";
inline constexpr std::string_view kSimulateHeader =
    "policy,r,horizon,replications,seed,su_arrivals,admissions,blocks,ft_events,sim_time,p_block,p_block_hw,p_ft,"
    "p_ft_hw,c_avg_unconditioned,c_avg_unconditioned_hw,c_avg_conditional,c_avg_conditional_hw";
inline constexpr std::string_view kValidateHeader = "kpi,analytical,simulated,half_width,abs_gap,rel_gap,covered";

inline std::string usage() {
  std::string u = "usage: crvirtres <command> [--scenario FILE] [--alpha X] [--seed N] [--horizon T] [--reps K]\n"
                  "commands:";
  for (auto c : kCommands) u += " " + std::string(c);
  return u + "\n";
}

namespace detail {

class CsvRow {
 public:
  explicit CsvRow(std::ostream& out) : out_(out) {}
  ~CsvRow() { out_ << '\n'; }
  CsvRow(const CsvRow&) = delete;
  CsvRow& operator=(const CsvRow&) = delete;

  CsvRow& operator<<(double v) { return field(format_number(v)); }
  CsvRow& operator<<(int v) { return field(std::to_string(v)); }
  CsvRow& operator<<(std::size_t v) { return field(std::to_string(v)); }
  CsvRow& operator<<(std::string_view v) { return field(std::string(v)); }
  CsvRow& operator<<(const std::optional<double>& v) { return field(v ? format_number(*v) : std::string()); }

 private:
  CsvRow& field(const std::string& s) {
    if (!first_) out_ << ',';
    first_ = false;
    out_ << s;
    return *this;
  }
  std::ostream& out_;
  bool first_ = true;
};

template <class T>
std::vector<T> require_grid(const std::optional<std::vector<T>>& g, std::vector<T> fallback, const char* key) {
  auto grid = g ? *g : std::move(fallback);
  if (grid.empty()) throw ScenarioError(std::string("grid ") + key + " is empty");
  return grid;
}

inline void write_sweep_row(std::ostream& out, double axis_value, const KpiReport& k) {
  const auto& c = k.config;
  CsvRow(out) << axis_value << c.pu_arrival << c.rho_p() << c.rho_s() << c.mu1() << c.min_channels << c.reserved
              << k.p_block << k.p_ft << k.c_avg << k.c_avg_conditional;
}

enum class SweepAxis { pu_arrival, mu1, min_channels };

inline void run_sweep(const Scenario& sc, SweepAxis axis, std::ostream& out) {
  const auto base = sc.parameters();
  const auto rs = require_grid(sc.sweep.reserved, {base.reserved}, "r");
  out << kSweepHeader << '\n';
  auto emit = [&](double axis_value, RawParameters p) {
    for (int r : rs) {
      p.reserved = r;
      write_sweep_row(out, axis_value, compute_kpis(build_config(p)));
    }
  };
  switch (axis) {
    case SweepAxis::pu_arrival: {
      for (double lp : require_grid(sc.sweep.pu_arrival, {*base.pu_arrival}, "lambda_p")) {
        auto p = base;
        p.pu_arrival = lp;
        emit(lp, p);
      }
      break;
    }
    case SweepAxis::mu1: {
      const std::vector<double> rho_default = {build_config(base).rho_s()};
      for (double rho : require_grid(sc.sweep.rho_s, rho_default, "rho_s")) {
        for (double m1 : require_grid(sc.sweep.mu1, {build_config(base).mu1()}, "mu1")) {
          auto p = base;
          p.rho_s = rho;
          p.su_arrival.reset();
          p.mu1 = m1;
          p.pu_service.reset();
          emit(m1, p);
        }
      }
      break;
    }
    case SweepAxis::min_channels: {
      // mu2 and rho_s are per-channel quantities and stay fixed as C_min moves.
      const auto cfg = build_config(base);
      for (int cmin : require_grid(sc.sweep.min_channels, {base.min_channels}, "C_min")) {
        auto p = base;
        p.min_channels = cmin;
        p.su_service.reset();
        p.mu2 = cfg.mu2();
        p.su_arrival.reset();
        p.rho_s = cfg.rho_s();
        emit(cmin, p);
      }
      break;
    }
  }
}

inline void run_optimize(const Scenario& sc, std::ostream& out) {
  const auto cfg = sc.config();
  const auto lps = require_grid(sc.sweep.pu_arrival, {cfg.pu_arrival}, "lambda_p");
  const auto rhos = require_grid(sc.sweep.rho_s, {cfg.rho_s()}, "rho_s");
  out << kOptimizeHeader << '\n';
  for (const auto& point : sweep(cfg, sc.alpha, lps, rhos)) {
    CsvRow(out) << point.pu_arrival << point.policy.config.rho_p() << point.rho_s << sc.alpha << point.policy.r_star
                << point.policy.zeta_star;
  }
}

inline void run_drift(const Scenario& sc, std::ostream& out) {
  const auto cmp = drift_comparison(sc.config());
  out << kDriftHeader << '\n';
  for (std::size_t i = 0; i < cmp.space.size(); ++i) {
    CsvRow(out) << cmp.space[i].pu << cmp.space[i].su << cmp.fsu.drift[i] << cmp.baseline.drift[i]
                << cmp.fsu.drift_strict4[i];
  }
}

inline std::optional<double> mean_of(const std::optional<Estimate>& e) {
  return e ? std::optional<double>(e->mean) : std::nullopt;
}
inline std::optional<double> half_width_of(const std::optional<Estimate>& e) {
  return e ? std::optional<double>(e->half_width) : std::nullopt;
}

inline void run_simulate(const Scenario& sc, std::ostream& out) {
  const auto cfg = sc.config();
  const SimPolicy policy =
      sc.policy == PolicyVariant::non_cooperative ? SimPolicy::non_cooperative() : SimPolicy{sc.policy, cfg.reserved};
  const auto rep = simulate(cfg, policy, sc.simulation);
  out << kSimulateHeader << '\n';
  CsvRow(out) << to_string(policy.variant) << policy.reserved << sc.simulation.horizon << sc.simulation.replications
              << std::to_string(sc.simulation.seed) << std::to_string(rep.su_arrivals)
              << std::to_string(rep.admissions) << std::to_string(rep.blocks) << std::to_string(rep.ft_events)
              << rep.sim_time << mean_of(rep.p_block) << half_width_of(rep.p_block) << rep.p_ft.mean
              << rep.p_ft.half_width << rep.c_avg.mean << rep.c_avg.half_width << rep.c_avg_conditional.mean
              << rep.c_avg_conditional.half_width;
}

inline bool run_validate(const Scenario& sc, std::ostream& out) {
  const auto v = cross_validate(sc.config(), sc.simulation);
  out << kValidateHeader << '\n';
  for (const auto& c : v.checks) {
    CsvRow(out) << c.name << c.analytical << c.simulated.mean << c.simulated.half_width << c.abs_gap << c.rel_gap
                << std::string_view(c.covered ? "yes" : "no");
  }
  return v.all_covered();
}

}  // namespace detail

/// Runs one command against a parsed scenario. CSV goes to out, diagnostics
/// to err. Returns 0 on success, 1 if validation finds a KPI outside its
/// confidence interval, 2 on bad input.
inline int run_command(std::string_view command, const Scenario& sc, std::ostream& out, std::ostream& err) {
  try {
    if (command == "solve") {
      const auto k = compute_kpis(sc.config());
      const auto& c = k.config;
      out << kSolveHeader << '\n';
      detail::CsvRow(out) << c.bands << c.channels_per_band << c.min_channels << c.reserved << c.pu_arrival
                          << c.pu_service << c.su_arrival << c.su_service << c.rho_p() << c.rho_s() << k.states
                          << k.residual << k.p_block << k.p_ft << k.c_avg << k.c_avg_conditional;
    } else if (command == "sweep-pft" || command == "sweep-pb" || command == "sweep-throughput") {
      detail::run_sweep(sc, detail::SweepAxis::pu_arrival, out);
    } else if (command == "sweep-mu1") {
      detail::run_sweep(sc, detail::SweepAxis::mu1, out);
    } else if (command == "sweep-cmin") {
      detail::run_sweep(sc, detail::SweepAxis::min_channels, out);
    } else if (command == "optimize") {
      detail::run_optimize(sc, out);
    } else if (command == "drift") {
      detail::run_drift(sc, out);
    } else if (command == "simulate") {
      detail::run_simulate(sc, out);
    } else if (command == "validate") {
      if (!detail::run_validate(sc, out)) {
        err << "validation failed: at least one KPI lies outside its 95% confidence interval\n";
        return kExitValidationFailed;
      }
    } else {
      err << "unknown command '" << command << "'\n" << usage();
      return kExitInputError;
    }
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace crvirtres
