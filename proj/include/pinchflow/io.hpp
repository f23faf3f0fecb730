#pragma once

// Run directory files: timeseries.csv, snapshots.csv, report.json and the
// config echo. Numbers are written with %.17g; files are written to a
// temporary name and renamed into place.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pinchflow/analysis.hpp"
#include "pinchflow/errors.hpp"
#include "pinchflow/graph_state.hpp"
#include "pinchflow/scenario.hpp"
#include "pinchflow/solver.hpp"

namespace pinchflow::io {

namespace fs = std::filesystem;

inline std::string num(double x) { return detail::format_double(x); }

inline void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw Error("bad number '" + s + "'");
  }
}

// ---------------------------------------------------------------------------
// timeseries.csv

inline constexpr const char* kTimeseriesHeader = "t,r,u_boundary,supA2,H_boundary,dt,argmax_at_boundary";

inline std::string timeseries_csv(const Trajectory& traj) {
  std::string out = std::string(kTimeseriesHeader) + "\n";
  for (const auto& s : traj.samples) {
    out += num(s.t) + ',' + num(s.r) + ',' + num(s.u_boundary) + ',' + num(s.sup_A2) + ',' + num(s.H_boundary) + ',' +
           num(s.dt) + ',' + (s.argmax_at_boundary ? "1" : "0") + '\n';
  }
  return out;
}

inline std::vector<TrajectorySample> parse_timeseries(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTimeseriesHeader) throw Error("timeseries.csv: unexpected header");
  std::vector<TrajectorySample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7) throw Error("timeseries.csv: expected 7 columns");
    out.push_back({to_double(f[0]), to_double(f[1]), to_double(f[2]), to_double(f[3]), to_double(f[4]),
                   to_double(f[5]), f[6] == "1"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// snapshots.csv (long form)

inline constexpr const char* kSnapshotHeader = "snapshot_id,t,xi,y,u";

inline std::string snapshots_csv(const std::vector<GraphState>& snaps) {
  std::string out = std::string(kSnapshotHeader) + "\n";
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const GraphState& s = snaps[k];
    for (std::size_t i = 0; i <= s.N(); ++i) {
      out += std::to_string(k) + ',' + num(s.t) + ',' + num(s.xi(i)) + ',' + num(s.y(i)) + ',' + num(s.u(i)) + '\n';
    }
  }
  return out;
}

/// Reloads snapshots; r is the y value of the last node of each snapshot.
inline std::vector<GraphState> parse_snapshots(const std::string& text, int n) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSnapshotHeader) throw Error("snapshots.csv: unexpected header");
  std::vector<GraphState> out;
  long current = -1;
  double t = 0.0, r = 0.0;
  std::vector<double> u;
  auto flush = [&] {
    if (current >= 0) out.push_back(GraphState::from_heights(t, n, r, u));
    u.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw Error("snapshots.csv: expected 5 columns");
    const long id = std::stol(f[0]);
    if (id != current) {
      flush();
      current = id;
    }
    t = to_double(f[1]);
    r = to_double(f[3]);
    u.push_back(to_double(f[4]));
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// report.json: flat object of dotted keys

class Report {
 public:
  void put(const std::string& key, double v) { items_.emplace_back(key, num(v)); }
  void put(const std::string& key, std::size_t v) { items_.emplace_back(key, std::to_string(v)); }
  void put(const std::string& key, int v) { items_.emplace_back(key, std::to_string(v)); }
  void put(const std::string& key, bool v) { items_.emplace_back(key, v ? "true" : "false"); }
  void put(const std::string& key, const std::string& v) { items_.emplace_back(key, quote(v)); }
  void put(const std::string& key, const char* v) { put(key, std::string(v)); }
  void put_null(const std::string& key) { items_.emplace_back(key, "null"); }

  /// Replaces the value of an existing key with an already formatted one.
  void replace_raw(const std::string& key, const std::string& raw) {
    for (auto& [k, v] : items_) {
      if (k == key) v = raw;
    }
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& kv : items_) out.push_back(kv.first);
    return out;
  }

  std::string text() const {
    std::string out = "{\n";
    for (std::size_t i = 0; i < items_.size(); ++i) {
      out += "  " + quote(items_[i].first) + ": " + items_[i].second + (i + 1 < items_.size() ? ",\n" : "\n");
    }
    return out + "}\n";
  }

  static std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') {
        out += '\\';
        out += c;
      } else if (c == '\n') {
        out += "\\n";
      } else {
        out += c;
      }
    }
    return out + '"';
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

/// Reads back the flat report (string values unquoted, others verbatim).
inline std::map<std::string, std::string> parse_report(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto q1 = line.find('"');
    if (q1 == std::string::npos) continue;
    const auto q2 = line.find('"', q1 + 1);
    const auto colon = line.find(':', q2);
    if (q2 == std::string::npos || colon == std::string::npos) continue;
    std::string v = detail::trim(line.substr(colon + 1));
    if (!v.empty() && v.back() == ',') v.pop_back();
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
      std::string raw = v.substr(1, v.size() - 2), un;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\\' && i + 1 < raw.size()) {
          ++i;
          un += raw[i] == 'n' ? '\n' : raw[i];
        } else {
          un += raw[i];
        }
      }
      v = un;
    }
    out[line.substr(q1 + 1, q2 - q1 - 1)] = v;
  }
  return out;
}

struct RunInfo {
  std::string certificate;
  double slope_bound = 0.0;
  double C_sigma = 0.0;
  std::string analysis_error;
  std::optional<NotType0Verdict> not_type0;
};

inline Report build_report(const Trajectory& traj, const SingularityReport& rep, const AnalysisConfig& acfg,
                           const RunInfo& info) {
  Report r;
  r.put("profile_label", traj.profile_label);
  r.put("certificate", info.certificate);
  r.put("type", info.analysis_error.empty() ? std::string(to_string(rep.type)) : std::string("Unclassified"));
  r.put("low_confidence", rep.low_confidence);
  if (rep.T) {
    r.put("T_est", rep.T->T);
    r.put("T_uncertainty", rep.T->uncertainty);
    r.put("T_coordinate", rep.T->coordinate);
    r.put("T_decay_exponent", rep.T->q);
  } else {
    r.put_null("T_est");
    r.put_null("T_uncertainty");
  }
  if (rep.fit) {
    r.put("p_fit", rep.fit->p);
    r.put("p_residual", rep.fit->residual);
    r.put("rate_constants.C", rep.fit->prefactor);
    r.put("rate_constants.C_hat1", rep.C_hat1);
    r.put("rate_constants.C_hat2", rep.C_hat2);
    r.put("fit_window.tau_lo", rep.fit->tau_lo);
    r.put("fit_window.tau_hi", rep.fit->tau_hi);
    r.put("fit_window.samples", rep.fit->count);
  } else {
    r.put_null("p_fit");
    r.put_null("p_residual");
  }
  r.put("fit_window.skip_decades", acfg.fit_skip_decades);
  r.put("fit_window.span_decades", acfg.fit_span_decades);
  r.put("growth_factor", rep.growth_factor);
  if (rep.A2_limit) {
    r.put("A2_limit", *rep.A2_limit);
  } else {
    r.put_null("A2_limit");
  }
  r.put("bound_verdicts.count", rep.bound_verdicts.size());
  for (std::size_t i = 0; i < rep.bound_verdicts.size(); ++i) {
    const auto& v = rep.bound_verdicts[i];
    const std::string p = "bound_verdicts." + std::to_string(i) + ".";
    r.put(p + "theorem", v.theorem);
    r.put(p + "predicted", v.predicted);
    r.put(p + "observed", v.observed);
    r.put(p + "pass", v.pass);
    r.put(p + "detail", v.detail);
  }
  if (info.not_type0) {
    r.put("not_type0.pass", info.not_type0->pass);
    r.put("not_type0.detail", info.not_type0->detail);
  }
  if (!rep.note.empty()) r.put("note", rep.note);
  if (!info.analysis_error.empty()) r.put("analysis_error", info.analysis_error);
  r.put("stop_reason", to_string(traj.stop_reason));
  r.put("grid.N", traj.N);
  r.put("grid.n", traj.n);
  r.put("steps.accepted", traj.stats.accepted);
  r.put("steps.rejected", traj.stats.rejected);
  r.put("steps.dt_min", traj.stats.accepted ? traj.stats.min_dt : 0.0);
  r.put("steps.dt_max", traj.stats.max_dt);
  r.put("steps.max_picard_iterations", traj.stats.max_picard_iterations);
  r.put("diagnostics.max_neumann_C", traj.stats.max_neumann_C);
  r.put("diagnostics.max_rprime_rel_error", traj.stats.max_rprime_rel_error);
  r.put("diagnostics.max_boundary_slope", traj.stats.max_boundary_slope);
  r.put("diagnostics.C_sigma", info.C_sigma);
  r.put("diagnostics.slope_bound", info.slope_bound);
  if (!traj.samples.empty()) {
    r.put("final.t", traj.samples.back().t);
    r.put("final.r", traj.samples.back().r);
    r.put("final.u_boundary", traj.samples.back().u_boundary);
    r.put("final.supA2", traj.samples.back().sup_A2);
  }
  return r;
}

}  // namespace pinchflow::io
