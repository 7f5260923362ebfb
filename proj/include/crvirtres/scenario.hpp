#pragma once

// Scenario files: INI-style `key = value` lines grouped in [system],
// [sweep], [optimize] and [simulation] sections. '#' starts a comment.
// Omitted system keys take the default operating point (M=4, N=5, C_min=2,
// r=0, lambda_p=1.3, mu1=1, mu2=0.75, rho_s=0.6). Sweep grids are either
// comma lists ("0, 2, 4") or inclusive ranges "start:step:stop".

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "crvirtres/config.hpp"
#include "crvirtres/simulator.hpp"

namespace crvirtres {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepGrids {
  std::optional<std::vector<double>> pu_arrival;  // lambda_p
  std::optional<std::vector<double>> rho_s;
  std::optional<std::vector<double>> mu1;
  std::optional<std::vector<int>> reserved;      // r
  std::optional<std::vector<int>> min_channels;  // C_min

  bool operator==(const SweepGrids&) const = default;
};

struct Scenario {
  /// Only keys present in the file are set; see parameters() for defaults.
  RawParameters system;
  SweepGrids sweep;
  double alpha = 1.0;
  SimSettings simulation;
  PolicyVariant policy = PolicyVariant::fsu_virtual_reservation;

  /// System parameters with defaults filled for every rate left unset.
  RawParameters parameters() const {
    RawParameters p = system;
    if (!p.pu_arrival) p.pu_arrival = 1.3;
    if (!p.pu_service && !p.mu1) p.mu1 = 1.0;
    if (!p.su_service && !p.mu2) p.mu2 = 0.75;
    if (!p.su_arrival && !p.rho_s) p.rho_s = 0.6;
    return p;
  }

  SystemConfig config() const { return build_config(parameters()); }

  bool operator==(const Scenario& o) const {
    return system == o.system && sweep == o.sweep && alpha == o.alpha && policy == o.policy &&
           simulation.horizon == o.simulation.horizon && simulation.replications == o.simulation.replications &&
           simulation.seed == o.simulation.seed;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string format_number(long long v) { return std::to_string(v); }
inline std::string format_number(int v) { return std::to_string(v); }
inline std::string format_number(std::uint64_t v) { return std::to_string(v); }

class LineParser {
 public:
  explicit LineParser(int line) : line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ScenarioError("line " + std::to_string(line_) + ": " + what);
  }

  template <class T>
  T scalar(std::string_view key, std::string_view value) const {
    auto v = parse_number<T>(value);
    if (!v) fail("invalid number for " + std::string(key) + ": '" + std::string(value) + "'");
    return *v;
  }

  template <class T>
  std::vector<T> grid(std::string_view key, std::string_view value) const {
    std::vector<T> out;
    value = trim(value);
    if (value.empty()) return out;
    if (value.find(':') != std::string_view::npos) {
      std::vector<std::string_view> parts;
      std::size_t start = 0;
      while (true) {
        const auto colon = value.find(':', start);
        parts.push_back(value.substr(start, colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
      }
      if (parts.size() != 3) fail("range for " + std::string(key) + " must be start:step:stop");
      const T first = scalar<T>(key, parts[0]);
      const T step = scalar<T>(key, parts[1]);
      const T last = scalar<T>(key, parts[2]);
      if (!(step > T{0})) fail("range step for " + std::string(key) + " must be positive");
      if (last < first) fail("range for " + std::string(key) + " ends before it starts");
      if constexpr (std::is_floating_point_v<T>) {
        const auto count = static_cast<long long>(std::floor((last - first) / step + 1e-9));
        for (long long i = 0; i <= count; ++i) out.push_back(first + static_cast<T>(i) * step);
      } else {
        for (T x = first; x <= last; x += step) out.push_back(x);
      }
      return out;
    }
    std::size_t start = 0;
    while (true) {
      const auto comma = value.find(',', start);
      out.push_back(scalar<T>(key, value.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

 private:
  int line_;
};

template <class T>
void check_grid(const std::optional<std::vector<T>>& g, const char* key, bool (*ok)(T), const char* rule) {
  if (!g) return;
  for (T v : *g) {
    if (!ok(v)) throw ScenarioError(std::string("key ") + key + ": grid values " + rule);
  }
}

}  // namespace detail

/// Checks everything a scenario can get wrong beyond syntax.
inline void validate(const Scenario& sc) {
  try {
    sc.config();
  } catch (const ConfigError& e) {
    throw ScenarioError(e.what());
  }
  detail::check_grid<double>(sc.sweep.pu_arrival, "lambda_p", [](double v) { return v > 0.0; }, "must be positive");
  detail::check_grid<double>(sc.sweep.rho_s, "rho_s", [](double v) { return v > 0.0; }, "must be positive");
  detail::check_grid<double>(sc.sweep.mu1, "mu1", [](double v) { return v > 0.0; }, "must be positive");
  detail::check_grid<int>(sc.sweep.reserved, "r", [](int v) { return v >= 0; }, "must be non-negative");
  detail::check_grid<int>(sc.sweep.min_channels, "C_min", [](int v) { return v >= 1; }, "must be at least 1");
  if (!(sc.alpha >= 0.0)) throw ScenarioError("key alpha: alpha must be non-negative");
  if (!(sc.simulation.horizon > 0.0)) throw ScenarioError("key horizon: horizon must be positive");
  if (sc.simulation.replications < 1) throw ScenarioError("key replications: replications must be at least 1");
}

inline Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string section = "system";
  std::vector<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const detail::LineParser p(line_no);
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (section != "system" && section != "sweep" && section != "optimize" && section != "simulation") {
        p.fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) p.fail("expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) p.fail("missing key");
    const std::string qualified = section + "." + key;
    if (std::find(seen.begin(), seen.end(), qualified) != seen.end()) p.fail("duplicate key " + key);
    seen.push_back(qualified);

    if (section == "system") {
      auto& s = sc.system;
      if (key == "M") s.bands = p.scalar<int>(key, value);
      else if (key == "N") s.channels_per_band = p.scalar<int>(key, value);
      else if (key == "C_min") s.min_channels = p.scalar<int>(key, value);
      else if (key == "r") s.reserved = p.scalar<int>(key, value);
      else if (key == "lambda_p") s.pu_arrival = p.scalar<double>(key, value);
      else if (key == "mu_p") s.pu_service = p.scalar<double>(key, value);
      else if (key == "mu1") s.mu1 = p.scalar<double>(key, value);
      else if (key == "lambda_s") s.su_arrival = p.scalar<double>(key, value);
      else if (key == "rho_s") s.rho_s = p.scalar<double>(key, value);
      else if (key == "mu_s") s.su_service = p.scalar<double>(key, value);
      else if (key == "mu2") s.mu2 = p.scalar<double>(key, value);
      else p.fail("unknown key " + key + " in [system]");
    } else if (section == "sweep") {
      auto& g = sc.sweep;
      if (key == "lambda_p") g.pu_arrival = p.grid<double>(key, value);
      else if (key == "rho_s") g.rho_s = p.grid<double>(key, value);
      else if (key == "mu1") g.mu1 = p.grid<double>(key, value);
      else if (key == "r") g.reserved = p.grid<int>(key, value);
      else if (key == "C_min") g.min_channels = p.grid<int>(key, value);
      else p.fail("unknown key " + key + " in [sweep]");
    } else if (section == "optimize") {
      if (key == "alpha") sc.alpha = p.scalar<double>(key, value);
      else p.fail("unknown key " + key + " in [optimize]");
    } else {
      auto& sim = sc.simulation;
      if (key == "horizon") sim.horizon = p.scalar<double>(key, value);
      else if (key == "replications") sim.replications = p.scalar<int>(key, value);
      else if (key == "seed") sim.seed = p.scalar<std::uint64_t>(key, value);
      else if (key == "policy") {
        auto v = parse_policy(value);
        if (!v) p.fail("unknown policy '" + std::string(value) + "' (fsu, min_alloc, nc)");
        sc.policy = *v;
      } else {
        p.fail("unknown key " + key + " in [simulation]");
      }
    }
  }
  validate(sc);
  return sc;
}

inline Scenario parse_scenario_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_scenario(in);
}

inline Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  return parse_scenario(in);
}

/// Writes every key that is set; parse_scenario of the result reproduces sc.
inline std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream out;
  auto put = [&](const char* key, const auto& v) { out << key << " = " << detail::format_number(v) << '\n'; };
  auto put_opt = [&](const char* key, const std::optional<double>& v) {
    if (v) put(key, *v);
  };
  auto put_grid = [&](const char* key, const auto& g) {
    if (!g) return;
    out << key << " =";
    for (std::size_t i = 0; i < g->size(); ++i) out << (i ? ", " : " ") << detail::format_number((*g)[i]);
    out << '\n';
  };
  const auto& s = sc.system;
  out << "[system]\n";
  put("M", s.bands);
  put("N", s.channels_per_band);
  put("C_min", s.min_channels);
  put("r", s.reserved);
  put_opt("lambda_p", s.pu_arrival);
  put_opt("mu_p", s.pu_service);
  put_opt("mu1", s.mu1);
  put_opt("lambda_s", s.su_arrival);
  put_opt("rho_s", s.rho_s);
  put_opt("mu_s", s.su_service);
  put_opt("mu2", s.mu2);
  out << "\n[sweep]\n";
  put_grid("lambda_p", sc.sweep.pu_arrival);
  put_grid("rho_s", sc.sweep.rho_s);
  put_grid("mu1", sc.sweep.mu1);
  put_grid("r", sc.sweep.reserved);
  put_grid("C_min", sc.sweep.min_channels);
  out << "\n[optimize]\n";
  put("alpha", sc.alpha);
  out << "\n[simulation]\n";
  put("horizon", sc.simulation.horizon);
  put("replications", sc.simulation.replications);
  put("seed", sc.simulation.seed);
  out << "policy = " << to_string(sc.policy) << '\n';
  return out.str();
}

}  // namespace crvirtres
