#pragma once

// Scenario execution shared by the command-line tool and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "pinchflow/analysis.hpp"
#include "pinchflow/geometry.hpp"
#include "pinchflow/io.hpp"
#include "pinchflow/profiles.hpp"
#include "pinchflow/scenario.hpp"
#include "pinchflow/solver.hpp"

namespace pinchflow {

struct RunOutcome {
  Scenario scenario;
  Trajectory trajectory;
  SingularityReport report;
  io::RunInfo info;
};

/// Graph floor over the heights the boundary visited during the run.
inline double visited_graph_floor(const ProfileCurve& profile, const Trajectory& traj) {
  double lo = traj.samples.front().u_boundary, hi = lo;
  for (const auto& s : traj.samples) {
    lo = std::min(lo, s.u_boundary);
    hi = std::max(hi, s.u_boundary);
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  return graph_floor(profile, lo, hi);
}

/// Classification plus certificate and not-Type-0 checks for a trajectory.
/// Analysis errors are recorded in `info`, not thrown.
inline void analyze(const Trajectory& traj, const Scenario& sc, SingularityReport& rep, io::RunInfo& info) {
  info.certificate = describe(sc.certificate);
  try {
    rep = classify(traj, sc.analysis);
    if (!std::holds_alternative<std::monostate>(sc.certificate)) {
      rep.bound_verdicts.push_back(check_bounds(rep, traj, sc.certificate, sc.analysis));
    }
  } catch (const AnalysisError& e) {
    rep = SingularityReport{};
    rep.profile_label = traj.profile_label;
    rep.stop_reason = to_string(traj.stop_reason);
    info.analysis_error = e.what();
  }
  if (traj.pinch_height && traj.stop_reason != StopReason::Horizon) info.not_type0 = not_type0_check(traj);
}

inline RunOutcome execute(const Scenario& sc) {
  RunOutcome out;
  out.scenario = sc;
  const ProfileCurve profile = make_profile(sc.profile_key, sc.profile_params);
  const GraphState initial = initial_state(sc, profile);
  out.trajectory = run(profile, initial, sc.solver);
  out.info.C_sigma = visited_graph_floor(profile, out.trajectory);
  out.info.slope_bound = boundary_gradient_bound(out.info.C_sigma).bound;
  analyze(out.trajectory, sc, out.report, out.info);
  return out;
}

inline void write_run_dir(const RunOutcome& r, const std::filesystem::path& dir, const std::string& config_text) {
  std::filesystem::create_directories(dir);
  io::write_atomic(dir / "config.txt", config_text);
  io::write_atomic(dir / "timeseries.csv", io::timeseries_csv(r.trajectory));
  io::write_atomic(dir / "snapshots.csv", io::snapshots_csv(r.trajectory.snapshots));
  io::write_atomic(dir / "report.json", io::build_report(r.trajectory, r.report, r.scenario.analysis, r.info).text());
}

/// Rebuilds the trajectory of a run directory (samples, stop reason, pinch
/// height) from its files.
inline Trajectory load_run_dir(const std::filesystem::path& dir, Scenario& sc) {
  sc = ScenarioConfig::load((dir / "config.txt").string()).resolve();
  const ProfileCurve profile = make_profile(sc.profile_key, sc.profile_params);
  Trajectory traj;
  traj.profile_label = profile.label();
  traj.n = sc.n;
  traj.N = sc.solver.N;
  traj.samples = io::parse_timeseries(io::read_file(dir / "timeseries.csv"));
  if (traj.samples.empty()) throw Error("timeseries.csv has no samples");
  for (double w : profile.pinch_points()) {
    const double h0 = traj.samples.front().u_boundary;
    if (!traj.pinch_height || std::abs(w - h0) < std::abs(*traj.pinch_height - h0)) traj.pinch_height = w;
  }
  const auto report = io::parse_report(io::read_file(dir / "report.json"));
  const auto it = report.find("stop_reason");
  if (it == report.end()) throw Error("report.json lacks stop_reason");
  const std::string& s = it->second;
  if (s == "RadiusFloor") {
    traj.stop_reason = StopReason::RadiusFloor;
  } else if (s == "CurvatureCap") {
    traj.stop_reason = StopReason::CurvatureCap;
  } else if (s == "Horizon") {
    traj.stop_reason = StopReason::Horizon;
  } else if (s == "StepFloor") {
    traj.stop_reason = StopReason::StepFloor;
  } else {
    throw Error("report.json: unknown stop_reason '" + s + "'");
  }
  return traj;
}

}  // namespace pinchflow
