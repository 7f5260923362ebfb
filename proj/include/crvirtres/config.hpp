#pragma once

// System parameters of the virtual-reservation model: M primary bands of N
// channels each, a minimum per-SU channel requirement, r virtually reserved
// channels, and Poisson/exponential traffic for both user classes.

#include <optional>
#include <stdexcept>
#include <string>

namespace crvirtres {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SystemConfig {
  int bands = 1;              // M
  int channels_per_band = 1;  // N
  int min_channels = 1;       // C_min
  int reserved = 0;           // r
  double pu_arrival = 1.0;    // lambda_p
  double pu_service = 1.0;    // mu_p, whole-band departure rate of one PU
  double su_arrival = 1.0;    // lambda_s
  double su_service = 1.0;    // mu_s, SU departure rate when holding exactly C_min channels

  int total_channels() const { return bands * channels_per_band; }
  double rho_p() const { return pu_arrival / pu_service; }
  /// Per-channel PU service rate (mu_1 = mu_p / N).
  double mu1() const { return pu_service / channels_per_band; }
  /// Per-channel SU service rate (mu_2 = mu_s / C_min).
  double mu2() const { return su_service / min_channels; }
  double rho_s() const { return su_arrival / mu2(); }

  bool operator==(const SystemConfig&) const = default;
};

/// Parameters as a user supplies them. Each rate may be given directly or in
/// per-channel form; giving both
/// forms of the same rate is an error.
struct RawParameters {
  int bands = 4;
  int channels_per_band = 5;
  int min_channels = 2;
  int reserved = 0;
  std::optional<double> pu_arrival;
  std::optional<double> pu_service;  // mu_p
  std::optional<double> mu1;         // mu_p / N
  std::optional<double> su_arrival;  // lambda_s
  std::optional<double> rho_s;       // lambda_s / mu_2
  std::optional<double> su_service;  // mu_s
  std::optional<double> mu2;         // mu_s / C_min

  bool operator==(const RawParameters&) const = default;
};

namespace detail {

inline double pick_rate(const std::optional<double>& direct, const std::optional<double>& scaled,
                        double scale, const char* direct_name, const char* scaled_name) {
  if (direct && scaled) {
    throw ConfigError(std::string("give either ") + direct_name + " or " + scaled_name + ", not both");
  }
  if (direct) return *direct;
  if (scaled) return *scaled * scale;
  throw ConfigError(std::string("missing rate: ") + direct_name + " or " + scaled_name);
}

inline void require_positive(double value, const char* name) {
  if (!(value > 0.0)) throw ConfigError(std::string(name) + " must be positive");
}

}  // namespace detail

/// Checks the integer invariants (band layout, C_min, r) and throws
/// ConfigError naming the first violated one.
inline void validate_structure(const SystemConfig& cfg) {
  if (cfg.bands < 1) throw ConfigError("M must be at least 1");
  if (cfg.channels_per_band < 1) throw ConfigError("N must be at least 1");
  if (cfg.min_channels < 1) throw ConfigError("C_min must be at least 1");
  if (cfg.min_channels > cfg.total_channels()) throw ConfigError("C_min must not exceed C = M*N");
  if (cfg.reserved < 0) throw ConfigError("r must be non-negative");
  if (cfg.reserved > cfg.total_channels() - cfg.min_channels) {
    throw ConfigError("r leaves no room for C_min (need r <= C - C_min)");
  }
}

inline void validate(const SystemConfig& cfg) {
  validate_structure(cfg);
  detail::require_positive(cfg.pu_arrival, "lambda_p");
  detail::require_positive(cfg.pu_service, "mu_p");
  detail::require_positive(cfg.su_arrival, "lambda_s");
  detail::require_positive(cfg.su_service, "mu_s");
}

/// Builds a validated config. Per-channel rates convert as mu_p = N*mu1,
/// mu_s = C_min*mu2 and lambda_s = rho_s*mu2.
inline SystemConfig build_config(const RawParameters& raw) {
  SystemConfig cfg;
  cfg.bands = raw.bands;
  cfg.channels_per_band = raw.channels_per_band;
  cfg.min_channels = raw.min_channels;
  cfg.reserved = raw.reserved;
  if (!raw.pu_arrival) throw ConfigError("missing rate: lambda_p");
  cfg.pu_arrival = *raw.pu_arrival;
  cfg.pu_service = detail::pick_rate(raw.pu_service, raw.mu1, raw.channels_per_band, "mu_p", "mu1");
  cfg.su_service = detail::pick_rate(raw.su_service, raw.mu2, raw.min_channels, "mu_s", "mu2");
  if (raw.rho_s) detail::require_positive(*raw.rho_s, "rho_s");
  if (raw.min_channels < 1) throw ConfigError("C_min must be at least 1");
  cfg.su_arrival = detail::pick_rate(raw.su_arrival, raw.rho_s, cfg.su_service / raw.min_channels,
                                     "lambda_s", "rho_s");
  validate(cfg);
  return cfg;
}

/// Default operating point: M=4, N=5, C_min=2,
/// lambda_p=1.3, mu1=1, mu2=0.75, rho_s=0.6.
inline RawParameters reference_parameters(int reserved = 0) {
  RawParameters raw;
  raw.reserved = reserved;
  raw.pu_arrival = 1.3;
  raw.mu1 = 1.0;
  raw.mu2 = 0.75;
  raw.rho_s = 0.6;
  return raw;
}

inline SystemConfig reference_config(int reserved = 0) {
  return build_config(reference_parameters(reserved));
}

/// Copy of cfg with a different reservation level, revalidated.
inline SystemConfig with_reserved(SystemConfig cfg, int reserved) {
  cfg.reserved = reserved;
  validate(cfg);
  return cfg;
}

}  // namespace crvirtres
