#pragma once

// Scenario configuration: flat `key = value` lines, '#' starts a comment.
//
//   profile.key = expinv          profile.<param> = value   (registry parameters)
//   initial.boundary_height = 4   initial.n = 2
//   initial.perturbation = 0
//   solver.<field> = value        (see SolverConfig; snapshot_schedule = dyadic|uniform)
//   cert.type = default|none|type0|type1|type2
//   cert.<field> = value          (c1 c2 c3 alpha delta z_check_max sigma c z_check_min)
//   analysis.fit_skip_decades, analysis.fit_span_decades
//   output.name = expinv_k1       seed = 1

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pinchflow/analysis.hpp"
#include "pinchflow/errors.hpp"
#include "pinchflow/profiles.hpp"
#include "pinchflow/solver.hpp"

namespace pinchflow {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Scenario {
  std::string name = "run";
  std::string profile_key;
  std::map<std::string, double> profile_params;
  double boundary_height = 0.0;
  int n = 2;
  double perturbation = 0.0;
  SolverConfig solver;
  AnalysisConfig analysis;
  Certificate certificate;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_number(const ConfigEntry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError("line " + std::to_string(e.line) + ": '" + e.key + "' expects a number, got '" + e.value + "'");
  }
  return v;
}

inline long long parse_integer(const ConfigEntry& e) {
  const double v = parse_number(e);
  if (v != std::floor(v) || std::abs(v) > 9e15) {
    throw ConfigError("line " + std::to_string(e.line) + ": '" + e.key + "' expects an integer, got '" + e.value + "'");
  }
  return static_cast<long long>(v);
}

}  // namespace detail

/// Ordered key/value document; later lines override earlier ones.
class ScenarioConfig {
 public:
  static ScenarioConfig parse(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string body = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
      const std::string key = detail::trim(body.substr(0, eq));
      const std::string value = detail::trim(body.substr(eq + 1));
      if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key or value");
      cfg.set(key, value, line);
    }
    return cfg;
  }

  static ScenarioConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  void set(const std::string& key, const std::string& value, int line = 0) {
    for (auto& e : entries_) {
      if (e.key == key) {
        e.value = value;
        e.line = line;
        return;
      }
    }
    entries_.push_back({key, value, line});
  }

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& e : entries_) {
      if (e.key == key) return e.value;
    }
    return std::nullopt;
  }

  const std::vector<ConfigEntry>& entries() const { return entries_; }

  std::string to_text() const {
    std::string out;
    for (const auto& e : entries_) out += e.key + " = " + e.value + "\n";
    return out;
  }

  /// Typed, validated scenario. Errors carry the offending line and key.
  Scenario resolve() const {
    Scenario sc;
    std::optional<std::string> cert_type;
    std::map<std::string, double> cert;
    bool have_height = false;
    for (const auto& e : entries_) {
      const std::string& k = e.key;
      auto num = [&] { return detail::parse_number(e); };
      auto where = [&] { return "line " + std::to_string(e.line) + ": "; };
      if (k == "profile.key") {
        sc.profile_key = e.value;
      } else if (k.rfind("profile.", 0) == 0) {
        sc.profile_params[k.substr(8)] = num();
      } else if (k == "initial.boundary_height") {
        sc.boundary_height = num();
        have_height = true;
      } else if (k == "initial.n") {
        sc.n = static_cast<int>(detail::parse_integer(e));
      } else if (k == "initial.perturbation") {
        sc.perturbation = num();
      } else if (k == "solver.N") {
        const long long N = detail::parse_integer(e);
        if (N < 0) throw ConfigError(where() + "solver.N must be non-negative");
        sc.solver.N = static_cast<std::size_t>(N);
      } else if (k == "solver.dt_init") {
        sc.solver.dt_init = num();
      } else if (k == "solver.dt_min") {
        sc.solver.dt_min = num();
      } else if (k == "solver.dt_max") {
        sc.solver.dt_max = num();
      } else if (k == "solver.cfl_safety") {
        sc.solver.cfl_safety = num();
      } else if (k == "solver.r_stop_fraction") {
        sc.solver.r_stop_fraction = num();
      } else if (k == "solver.A2_stop") {
        sc.solver.A2_stop = num();
      } else if (k == "solver.t_stop") {
        sc.solver.t_stop = num();
      } else if (k == "solver.picard_tol") {
        sc.solver.picard_tol = num();
      } else if (k == "solver.picard_max") {
        sc.solver.picard_max = static_cast<int>(detail::parse_integer(e));
      } else if (k == "solver.snapshot_schedule") {
        if (e.value == "dyadic") {
          sc.solver.snapshot_schedule = SnapshotSchedule::Dyadic;
        } else if (e.value == "uniform") {
          sc.solver.snapshot_schedule = SnapshotSchedule::Uniform;
        } else {
          throw ConfigError(where() + "solver.snapshot_schedule must be dyadic or uniform");
        }
      } else if (k == "solver.snapshot_interval") {
        sc.solver.snapshot_interval = num();
      } else if (k == "solver.diffusive_factor") {
        sc.solver.diffusive_factor = num();
      } else if (k == "solver.argmax_tol_factor") {
        sc.solver.argmax_tol_factor = num();
      } else if (k == "solver.max_steps") {
        const long long m = detail::parse_integer(e);
        if (m <= 0) throw ConfigError(where() + "solver.max_steps must be positive");
        sc.solver.max_steps = static_cast<std::size_t>(m);
      } else if (k == "analysis.fit_skip_decades") {
        sc.analysis.fit_skip_decades = num();
      } else if (k == "analysis.fit_span_decades") {
        sc.analysis.fit_span_decades = num();
      } else if (k == "cert.type") {
        cert_type = e.value;
      } else if (k.rfind("cert.", 0) == 0) {
        cert[k.substr(5)] = num();
      } else if (k == "output.name") {
        sc.name = e.value;
      } else if (k == "seed") {
        sc.seed = static_cast<std::uint64_t>(detail::parse_integer(e));
      } else {
        throw ConfigError(where() + "unknown key '" + k + "'");
      }
    }
    if (sc.profile_key.empty()) throw ConfigError("missing profile.key");
    if (!have_height) throw ConfigError("missing initial.boundary_height");
    if (sc.n < 2) throw ConfigError("initial.n must be >= 2");
    if (!(sc.solver.t_stop > 0.0)) throw ConfigError("solver.t_stop must be positive");
    if (!(sc.analysis.fit_skip_decades >= 0.0 && sc.analysis.fit_span_decades > 0.0))
      throw ConfigError("analysis fit window must have skip >= 0 and span > 0");
    try {
      (void)make_profile(sc.profile_key, sc.profile_params);
    } catch (const Error& e) {
      throw ConfigError(std::string("profile: ") + e.what());
    }
    sc.solver.validate();

    const std::string label = make_profile(sc.profile_key, sc.profile_params).label();
    auto need = [&](const char* f) {
      auto it = cert.find(f);
      if (it == cert.end()) throw ConfigError(std::string("cert.") + f + " is required for cert.type " + *cert_type);
      return it->second;
    };
    // Report the first missing field in declaration order.
    auto require = [&](std::initializer_list<const char*> fields) {
      for (const char* f : fields) (void)need(f);
    };
    try {
      if (!cert_type || *cert_type == "default") {
        sc.certificate = default_certificate(sc.profile_key, sc.profile_params);
      } else if (*cert_type == "none") {
        sc.certificate = std::monostate{};
      } else if (*cert_type == "type2") {
        require({"c1", "c2", "c3", "alpha", "delta", "z_check_max"});
        sc.certificate = Type2Certificate(need("c1"), need("c2"), need("c3"), need("alpha"), need("delta"),
                                          need("z_check_max"), label);
      } else if (*cert_type == "type1") {
        require({"sigma", "c1", "c2", "z_check_max"});
        sc.certificate = Type1Certificate(need("sigma"), need("c1"), need("c2"), need("z_check_max"), label);
      } else if (*cert_type == "type0") {
        require({"sigma", "c", "z_check_min"});
        sc.certificate = Type0Certificate(need("sigma"), need("c"), need("z_check_min"), label);
      } else {
        throw ConfigError("cert.type must be default, none, type0, type1 or type2");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("certificate: ") + e.what());
    }
    return sc;
  }

 private:
  std::vector<ConfigEntry> entries_;
};

/// Sweepable parameters and the config keys they set.
inline std::string sweep_key(const std::string& param) {
  static const std::map<std::string, std::string> keys = {
      {"k", "profile.k"}, {"c", "profile.c"}, {"slope", "profile.c"}, {"a", "profile.a"},
      {"boundary_height", "initial.boundary_height"}, {"N", "solver.N"},
  };
  auto it = keys.find(param);
  if (it == keys.end()) throw ConfigError("sweep parameter must be one of k, c, slope, a, boundary_height, N");
  return it->second;
}

/// Initial state of a scenario: the compatible cap, optionally perturbed.
inline GraphState initial_state(const Scenario& sc, const ProfileCurve& profile) {
  GraphState s = make_initial_cap(profile, sc.boundary_height, sc.n, sc.solver.N);
  if (sc.perturbation != 0.0) s = perturb_cap(std::move(s), sc.perturbation);
  return s;
}

}  // namespace pinchflow
