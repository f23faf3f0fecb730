#pragma once

// Acceptance criteria, shared by the acceptance test binary and `pinchflow verify`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pinchflow/analysis.hpp"
#include "pinchflow/geometry.hpp"
#include "pinchflow/oracle.hpp"
#include "pinchflow/pipeline.hpp"
#include "pinchflow/scenario.hpp"
#include "pinchflow/solver.hpp"

namespace pinchflow::acceptance {

using CurvatureFormula = std::function<CurvaturePoint(double y, double w1, double w2, int n)>;

/// Curvature with the rotational terms taken once, as if n were 2. Used as a
/// mutant: it agrees with curvature_at only for n = 2.
inline CurvaturePoint curvature_without_multiplicity(double y, double w1, double w2, int n) {
  return curvature_at(y, w1, w2, std::min(n, 2));
}

struct Options {
  std::filesystem::path scenario_dir;
  CurvatureFormula curvature = curvature_at;    // replaced by mutation tests
  std::optional<AnalysisConfig> synthetic_analysis;  // replaced by mutation tests
  std::set<int> only;                           // empty = all
};

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  std::optional<std::string> known_failure;  // set when the criterion cannot hold as stated
};

/// Criteria that cannot pass as stated, with the reason printed next to them.
inline const std::map<int, std::string>& known_failures() {
  static const std::map<int, std::string> k = {
      {7, "the printed bound sqrt(1/C - 1) lies below max|omega_Sigma'| = sqrt(1/C^2 - 1) whenever C < 1, and the "
          "Neumann condition makes the boundary slope equal |omega_Sigma'|"},
  };
  return k;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::string fmt(double x) { return pinchflow::detail::format_short(x); }

class Runs {
 public:
  explicit Runs(std::filesystem::path dir) : dir_(std::move(dir)) {}

  ScenarioConfig config(const std::string& name) const {
    return ScenarioConfig::load((dir_ / (name + ".cfg")).string());
  }

  // Runs are cached by name so criteria sharing a scenario run it once.
  const RunOutcome& get(const std::string& name, const std::map<std::string, std::string>& overrides = {}) {
    std::string key = name;
    for (const auto& [k, v] : overrides) key += ";" + k + "=" + v;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second.first;
    ScenarioConfig cfg = config(name);
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    const auto t0 = Clock::now();
    RunOutcome r = execute(cfg.resolve());
    const double secs = seconds_since(t0);
    return cache_.emplace(key, std::make_pair(std::move(r), secs)).first->second.first;
  }

  double seconds(const std::string& name, const std::map<std::string, std::string>& overrides = {}) const {
    std::string key = name;
    for (const auto& [k, v] : overrides) key += ";" + k + "=" + v;
    auto it = cache_.find(key);
    return it == cache_.end() ? 0.0 : it->second.second;
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::pair<RunOutcome, double>> cache_;
};

inline double max_sphere_error(const Trajectory& traj, const SphereSolution& sph, double t_max) {
  double err = 0.0;
  for (const auto& s : traj.samples) {
    if (s.t > t_max) break;
    const double ex = sph.r(s.t);
    err = std::max(err, std::abs(s.r - ex) / ex);
  }
  return err;
}

// r and the pinch distance are non-increasing over the final decade of the
// pinch distance.
inline bool monotone_final_decade(const Trajectory& traj) {
  const auto& S = traj.samples;
  const double zp = traj.pinch_height.value_or(0.0);
  const double d_last = std::abs(S.back().u_boundary - zp);
  for (std::size_t j = S.size() - 1; j > 0; --j) {
    if (std::abs(S[j - 1].u_boundary - zp) > 10.0 * d_last) return true;
    if (S[j].r > S[j - 1].r) return false;
    if (std::abs(S[j].u_boundary - zp) > std::abs(S[j - 1].u_boundary - zp)) return false;
  }
  return false;
}

// Linear interpolation of a state's heights at physical radius y <= r.
inline double height_at(const GraphState& s, double y) {
  const double x = std::clamp(y / s.r, 0.0, 1.0) * static_cast<double>(s.N());
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), s.N() - 1);
  const double f = x - static_cast<double>(i);
  return (1.0 - f) * s.u(i) + f * s.u(i + 1);
}

struct OrderingResult {
  std::size_t compared = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  bool ordered = true;
};

// Advances two states with a common step and compares them on the domain
// overlap after every step.
inline OrderingResult lockstep_ordering(const ProfileCurve& profile, GraphState a, GraphState b,
                                        const SolverConfig& cfg, double r_stop, double slack) {
  OrderingResult res;
  std::optional<GraphState> pa, pb;
  auto compare = [&] {
    const double overlap = std::min(a.r, b.r);
    for (std::size_t i = 0; i <= a.N(); ++i) {
      if (a.y(i) > overlap) break;
      const double gap = height_at(b, a.y(i)) - a.u(i);
      res.min_gap = std::min(res.min_gap, gap);
      if (gap < -slack) res.ordered = false;
    }
    res.min_gap = std::min(res.min_gap, b.height - a.height);
    if (b.height - a.height < -slack) res.ordered = false;
    ++res.compared;
  };
  compare();
  double dt_prev = 0.0;
  while (a.r > r_stop && b.r > r_stop) {
    double dt = std::min(adapt_dt(a, curvature(a), cfg), adapt_dt(b, curvature(b), cfg));
    if (pa) dt = std::min(dt, kMaxStepRatio * dt_prev);
    if (!pa) dt = std::min(dt, cfg.dt_init);
    StepResult ra, rb;
    while (true) {
      ra = step(a, dt, profile, cfg, pa ? &*pa : nullptr);
      rb = step(b, dt, profile, cfg, pb ? &*pb : nullptr);
      if (ra.accepted() && rb.accepted()) break;
      dt *= 0.5;
      if (dt < cfg.dt_min) throw Error("comparison run: step floor reached");
    }
    pa = std::move(a);
    pb = std::move(b);
    a = std::move(ra.state);
    b = std::move(rb.state);
    dt_prev = dt;
    compare();
  }
  return res;
}

}  // namespace detail

inline std::vector<Result> run_all(const Options& opt) {
  using detail::fmt;
  detail::Runs runs(opt.scenario_dir);
  std::vector<Result> out;
  auto wanted = [&](int id) { return opt.only.empty() || opt.only.count(id) > 0; };
  auto record = [&](int id, const std::string& name, auto&& body) {
    if (!wanted(id)) return;
    Result r;
    r.id = id;
    r.name = name;
    const auto t0 = detail::Clock::now();
    try {
      body(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = detail::seconds_since(t0);
    auto k = known_failures().find(id);
    if (!r.pass && k != known_failures().end()) r.known_failure = k->second;
    out.push_back(std::move(r));
  };

  const SphereSolution sph(2.0, 2, 1.0);

  record(1, "sphere oracle", [&](Result& r) {
    // Substitution of the closed form into the PDE and curvature formulas.
    double subst = 0.0;
    for (double t : {0.0, 0.3, 0.6, 0.9}) {
      for (double y : {0.1, 0.5, 1.0}) subst = std::max(subst, sphere_substitution_residual(sph, y * sph.r(t), t));
    }
    double curv = 0.0;
    for (int n : {2, 3, 4}) {
      const double R = 1.7;
      const GraphState s = sphere_state(R, n, 0.0, 1.0, 64);
      const GridDerivatives d = sphere_derivatives(s, R);
      for (std::size_t i = 0; i < d.y.size(); ++i) {
        const CurvaturePoint c = opt.curvature(d.y[i], d.w1[i], d.w2[i], n);
        curv = std::max(curv, std::abs(c.A2 - n / (R * R)) / (n / (R * R)));
        curv = std::max(curv, std::abs(c.H - n / R) / (n / R));
      }
    }
    const RunOutcome& run = runs.get("sphere");
    const double err = detail::max_sphere_error(run.trajectory, sph, 0.99);
    const double T = run.report.T ? run.report.T->T : NAN;
    const double secs = runs.seconds("sphere");
    r.pass = subst <= 1e-5 && curv <= 1e-8 && err <= 1e-3 && std::abs(T - 1.0) <= 1e-2 && secs <= 60.0;
    r.detail = "max rel err r(t), t<=0.99: " + fmt(err) + " (<=1e-3); T_est " + fmt(T) + " (1 +- 1e-2, T = R0^2/(2n)); " +
               "substitution residual " + fmt(subst) + "; curvature rel err n=2..4 " + fmt(curv) + " (<=1e-8); " +
               fmt(secs) + " s (<=60)";
  });

  record(2, "convergence order", [&](Result& r) {
    std::vector<double> errs;
    double secs = 0.0;
    for (const char* N : {"100", "200", "400"}) {
      const auto ov = std::string(N) == "400" ? std::map<std::string, std::string>{}
                                               : std::map<std::string, std::string>{{"solver.N", N}};
      const RunOutcome& run = runs.get("sphere", ov);
      secs += runs.seconds("sphere", ov);
      errs.push_back(detail::max_sphere_error(run.trajectory, sph, 0.9 * sph.T()));
    }
    const double o1 = std::log2(errs[0] / errs[1]);
    const double o2 = std::log2(errs[1] / errs[2]);
    r.pass = std::min(o1, o2) >= 1.8 && secs <= 300.0;
    r.detail = "errors " + fmt(errs[0]) + ", " + fmt(errs[1]) + ", " + fmt(errs[2]) + "; orders " + fmt(o1) + ", " +
               fmt(o2) + " (>=1.8); " + fmt(secs) + " s (<=300)";
  });

  record(3, "Type 1 classification (cone)", [&](Result& r) {
    const RunOutcome& run = runs.get("cone");
    const auto& rep = run.report;
    if (!rep.fit) throw Error(run.info.analysis_error.empty() ? "no fit" : run.info.analysis_error);
    double lo = 0.0, hi = 0.0;
    pinchflow::detail::tau_A2_band(run.trajectory, rep.T->T, *rep.fit, lo, hi);
    const double band = hi / lo;
    const double secs = runs.seconds("cone");
    r.pass = rep.type == SingularityType::Type1 && rep.fit->p >= 0.9 && rep.fit->p <= 1.1 &&
             rep.fit->residual <= 0.05 && band <= 10.0 && secs <= 120.0;
    r.detail = std::string(to_string(rep.type)) + ", p_fit " + fmt(rep.fit->p) + " in [0.9,1.1], residual " +
               fmt(rep.fit->residual) + " (<=0.05), (T-t)supA2 band " + fmt(band) + " (<=10); " + fmt(secs) + " s";
  });

  record(4, "Type 2 lower bound (expinv k=1,2)", [&](Result& r) {
    bool ok = true;
    std::string d;
    for (const auto& [name, k] : {std::pair{"expinv_k1", 1.0}, std::pair{"expinv_k2", 2.0}}) {
      const RunOutcome& run = runs.get(name);
      const auto& rep = run.report;
      const double predicted = 1.0 + k / (k + 2.0);
      const double p = rep.fit ? rep.fit->p : NAN;
      const double secs = runs.seconds(name);
      const bool pass = rep.fit && rep.type == SingularityType::Type2 && p >= predicted - 0.1 && p > 1.1 &&
                        secs <= 600.0;
      ok = ok && pass;
      d += std::string(d.empty() ? "" : "; ") + "k=" + fmt(k) + ": " + to_string(rep.type) + ", p_fit " + fmt(p) +
           " (>=" + fmt(predicted - 0.1) + "), residual " + fmt(rep.fit ? rep.fit->residual : NAN) + ", " +
           fmt(secs) + " s";
    }
    r.pass = ok;
    r.detail = d;
  });

  record(5, "finite-time pinch", [&](Result& r) {
    bool ok = true;
    std::string d;
    for (const char* name : {"cone", "expinv_k1", "expinv_k2"}) {
      const Trajectory& tr = runs.get(name).trajectory;
      const auto& a = tr.samples.front();
      const auto& b = tr.samples.back();
      const double rr = b.r / a.r;
      const double hr = b.u_boundary / a.u_boundary;
      const bool mono = detail::monotone_final_decade(tr);
      const bool pass = rr <= 1e-4 && hr <= 1e-3 && mono;
      ok = ok && pass;
      d += std::string(d.empty() ? "" : "; ") + name + ": r/r0 " + fmt(rr) + ", uN/uN0 " + fmt(hr) +
           (mono ? ", monotone" : ", not monotone");
    }
    r.pass = ok;
    r.detail = d;
  });

  record(6, "not Type 0", [&](Result& r) {
    bool ok = true;
    std::string d;
    for (const char* name : {"sphere", "cone", "expinv_k1", "expinv_k2"}) {
      const NotType0Verdict v = not_type0_check(runs.get(name).trajectory);
      ok = ok && v.pass;
      d += std::string(d.empty() ? "" : "; ") + name + ": " + v.detail;
    }
    r.pass = ok;
    r.detail = d;
  });

  record(7, "boundary gradient estimate", [&](Result& r) {
    bool ok = true, ok_corrected = true;
    std::string d;
    for (const char* name : {"sphere", "cone", "expinv_k1", "expinv_k2", "recip_mollified", "flat_disk"}) {
      const RunOutcome& run = runs.get(name);
      const double slope = run.trajectory.stats.max_boundary_slope;
      const double C = run.info.C_sigma;
      const double printed = boundary_gradient_bound(C).bound;
      const double corrected = std::sqrt(1.0 / (C * C) - 1.0);
      ok = ok && slope <= printed + 1e-8;
      // The grid slope is a one-sided stencil, hence the discretisation slack.
      ok_corrected = ok_corrected && slope <= corrected * (1.0 + 1e-3) + 1e-8;
      d += std::string(d.empty() ? "" : "; ") + name + ": max|w'| " + fmt(slope) + " vs " + fmt(printed) + " (" +
           fmt(corrected) + ")";
    }
    r.pass = ok;
    r.detail = d + (ok_corrected ? " | all within sqrt(1/C^2-1) (in parentheses) up to 1e-3"
                                  : " | sqrt(1/C^2-1) (in parentheses) also violated");
  });

  record(8, "long-time regularity (recip_mollified)", [&](Result& r) {
    const RunOutcome& run = runs.get("recip_mollified");
    const auto& S = run.trajectory.samples;
    double max_rate = 0.0;
    for (std::size_t j = 1; j < S.size(); ++j) {
      max_rate = std::max(max_rate, std::abs(S[j].sup_A2 - S[j - 1].sup_A2) / (S[j].t - S[j - 1].t));
    }
    // Rate over the final 5% of the horizon.
    const double t_tail = S.back().t - 0.05 * (S.back().t - S.front().t);
    auto it = std::find_if(S.begin(), S.end(), [&](const TrajectorySample& s) { return s.t >= t_tail; });
    const double end_rate = std::abs(S.back().sup_A2 - it->sup_A2) / (S.back().t - it->t);
    const auto& rep = run.report;
    const bool horizon = run.trajectory.stop_reason == StopReason::Horizon && S.back().t >= 50.0 - 1e-9;
    r.pass = horizon && rep.type == SingularityType::NoFiniteTimeSingularity && rep.growth_factor < 2.0 &&
             end_rate < 0.05 * max_rate;
    r.detail = std::string(to_string(rep.type)) + ", t_final " + fmt(S.back().t) + ", growth over final half " +
               fmt(rep.growth_factor) + " (<2), |dA2/dt| final " + fmt(end_rate) + " vs max " + fmt(max_rate) +
               ", A2 " + fmt(S.back().sup_A2);
  });

  record(9, "comparison principle", [&](Result& r) {
    const ProfileCurve cone = profiles::cone(1.0);
    SolverConfig cfg;
    cfg.N = 100;
    cfg.diffusive_factor = 64.0;
    const GraphState a = perturb_cap(make_initial_cap(cone, std::sqrt(2.0), 2, cfg.N), -0.05);
    const GraphState b = perturb_cap(make_initial_cap(cone, 2.5 / std::sqrt(2.0), 2, cfg.N), 0.2);
    const auto res = detail::lockstep_ordering(cone, a, b, cfg, 1e-3 * a.r, 1e-9);
    r.pass = res.ordered && res.compared > 10;
    r.detail = "compared " + std::to_string(res.compared) + " times, min gap " + fmt(res.min_gap) + " (>= -1e-9)";
  });

  record(10, "analysis self-test", [&](Result& r) {
    const AnalysisConfig acfg = opt.synthetic_analysis.value_or(AnalysisConfig{});
    bool ok = true;
    std::string d;
    for (double p : {1.0, 4.0 / 3.0, 1.5}) {
      const Trajectory tr = synthetic_trajectory(p, 0.5, 0.01, 64);
      std::string line = "p=" + fmt(p) + ": ";
      try {
        const TEstimate T = estimate_T(tr, acfg);
        const ExponentFit f = fit_exponent(tr, T.T, acfg);
        const bool pass = std::abs(f.p - p) <= 0.03 && std::abs(T.T - 0.5) <= 1e-3;
        ok = ok && pass;
        line += "p_fit " + fmt(f.p) + ", T " + fmt(T.T);
      } catch (const AnalysisError& e) {
        ok = false;
        line += e.what();
      }
      d += (d.empty() ? "" : "; ") + line;
    }
    r.pass = ok;
    r.detail = d;
  });

  return out;
}

/// One line per criterion; returns the number of failures not covered by
/// the known-failure list.
inline int print(const std::vector<Result>& results, std::FILE* out = stdout) {
  int unexpected = 0;
  for (const auto& r : results) {
    std::fprintf(out, "[%s] %2d %-40s %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(),
                 r.seconds);
    if (!r.pass) {
      if (r.known_failure) {
        std::fprintf(out, "       known failure: %s\n", r.known_failure->c_str());
      } else {
        ++unexpected;
      }
    }
  }
  const auto passed = std::count_if(results.begin(), results.end(), [](const Result& r) { return r.pass; });
  std::fprintf(out, "%zd/%zu criteria pass\n", static_cast<std::ptrdiff_t>(passed), results.size());
  return unexpected;
}

}  // namespace pinchflow::acceptance
