#pragma once

// Time integration of the rotationally symmetric graph flow
//
//   omega_t = omega'' / (1 + omega'^2) + (n - 1) omega' / y   on (0, r(t)),
//   omega'(r) = -omega_Sigma'(omega(r)),  r = omega_Sigma(omega(r)),
//
// on the fixed grid xi = y / r(t). With u(xi, t) = omega(xi r, t) the change of
// variables adds the advection term xi (r'/r) u_xi.
//
// Each step is implicit (variable-step BDF2, backward Euler on the first step)
// with the diffusion coefficient, the drift and the radius frozen at the
// current iterate of the boundary height. Unknowns are the normalised
// offsets phi_i = (u_i - u_N)/r together with the boundary height rate; the
// system splits into two tridiagonal solves plus the scalar Neumann closure
// (3 phi_N - 4 phi_{N-1} + phi_{N-2}) / (2 dxi) = -omega_Sigma'(u_N).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pinchflow/errors.hpp"
#include "pinchflow/geometry.hpp"
#include "pinchflow/graph_state.hpp"
#include "pinchflow/profiles.hpp"

namespace pinchflow {

enum class SnapshotSchedule { Dyadic, Uniform };
enum class StopReason { RadiusFloor, CurvatureCap, Horizon, StepFloor };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::RadiusFloor: return "RadiusFloor";
    case StopReason::CurvatureCap: return "CurvatureCap";
    case StopReason::Horizon: return "Horizon";
    case StopReason::StepFloor: return "StepFloor";
  }
  return "?";
}

struct SolverConfig {
  std::size_t N = 200;
  double dt_init = 1e-6;
  double dt_min = 1e-14;
  double dt_max = 1e-2;
  double cfl_safety = 0.5;
  double r_stop_fraction = 1e-4;  // stop once r < r_stop_fraction * r(0)
  double A2_stop = 1e10;
  double t_stop = 1e3;
  double picard_tol = 1e-11;
  int picard_max = 25;
  SnapshotSchedule snapshot_schedule = SnapshotSchedule::Dyadic;
  double snapshot_interval = 0.1;  // for Uniform
  double diffusive_factor = 1.0;   // K in the K r^2 dxi^2 resolution term of adapt_dt; 0 disables it
  double argmax_tol_factor = 32.0;  // boundary counts as argmax within argmax_tol_factor * dxi^2 (relative)
  std::size_t max_steps = 50'000'000;

  void validate() const {
    if (N < 16) throw ConfigError("solver.N must be >= 16");
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
      throw ConfigError("solver time steps must satisfy 0 < dt_min <= dt_init <= dt_max");
    if (!(cfl_safety > 0.0 && cfl_safety < 1.0)) throw ConfigError("solver.cfl_safety must lie in (0,1)");
    if (!(r_stop_fraction > 0.0 && r_stop_fraction < 1.0)) throw ConfigError("solver.r_stop_fraction must lie in (0,1)");
    if (!(A2_stop > 0.0)) throw ConfigError("solver.A2_stop must be positive");
    if (!(picard_tol > 0.0) || picard_max < 1) throw ConfigError("solver Picard settings must be positive");
    if (!(diffusive_factor >= 0.0)) throw ConfigError("solver.diffusive_factor must be non-negative");
    if (!(argmax_tol_factor >= 0.0)) throw ConfigError("solver.argmax_tol_factor must be non-negative");
    if (snapshot_schedule == SnapshotSchedule::Uniform && !(snapshot_interval > 0.0))
      throw ConfigError("solver.snapshot_interval must be positive");
  }
};

// ---------------------------------------------------------------------------

namespace detail {

// Thomas algorithm for a tridiagonal system with one factorisation shared by
// several right-hand sides. lower[0] and upper[n-1] are ignored.
class Tridiagonal {
 public:
  Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
      : lower_(std::move(lower)), c_(std::move(upper)), denom_(diag.size()) {
    const std::size_t n = diag.size();
    double prev_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = diag[i] - (i > 0 ? lower_[i] * prev_c : 0.0);
      denom_[i] = d;
      c_[i] = (i + 1 < n) ? c_[i] / d : 0.0;
      prev_c = c_[i];
    }
  }

  std::vector<double> solve(std::vector<double> rhs) const {
    const std::size_t n = rhs.size();
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = (rhs[i] - (i > 0 ? lower_[i] * rhs[i - 1] : 0.0)) / denom_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c_[i] * rhs[i + 1];
    return rhs;
  }

 private:
  std::vector<double> lower_, c_, denom_;
};

inline bool crosses_pinch(const ProfileCurve& p, double a, double b) {
  for (double w : p.pinch_points()) {
    if ((a - w) * (b - w) <= 0.0) return true;
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Spherical cap centred on the axis meeting the support orthogonally at
/// boundary height `boundary_height`. Slope s = -omega_Sigma'(h) gives
/// cap radius r sqrt(1+s^2)/|s|; the offsets are evaluated in a form that is
/// exact for s -> 0 (flat disk).
inline GraphState make_initial_cap(const ProfileCurve& profile, double boundary_height, int n, std::size_t N) {
  if (n < 2) throw ArgumentError("make_initial_cap: dimension n must be >= 2");
  if (N < 16) throw ArgumentError("make_initial_cap: N must be >= 16");
  const ProfileJet j = profile.jet(boundary_height);
  const double r = j.value;
  const double s = -j.deriv;
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(s)) {
    throw ArgumentError("make_initial_cap: no admissible cap at height " + detail::format_double(boundary_height) +
                        " (r = " + detail::format_double(r) + "); try a perturbed profile height");
  }
  GraphState st;
  st.n = n;
  st.r = r;
  st.height = boundary_height;
  st.offset.resize(N + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    const double xi = static_cast<double>(i) / static_cast<double>(N);
    const double q = 1.0 - xi * xi;
    st.offset[i] = -s * q / (1.0 + std::sqrt(1.0 + s * s * q));
  }
  st.offset[N] = 0.0;
  for (std::size_t i = 0; i <= N; ++i) {
    if (!(st.u(i) > 0.0) || !std::isfinite(st.u(i))) {
      throw ArgumentError("make_initial_cap: cap at height " + detail::format_double(boundary_height) +
                          " leaves the positive half-space; try a perturbed profile height");
    }
  }
  return st;
}

/// Adds amplitude * r * (1 - xi^2)^2 to the heights. The bump has zero value
/// and slope at the boundary and zero slope at the axis, so the Neumann and
/// symmetry conditions of the input are kept.
inline GraphState perturb_cap(GraphState s, double amplitude) {
  if (!std::isfinite(amplitude)) throw ArgumentError("perturb_cap: amplitude must be finite");
  for (std::size_t i = 0; i <= s.N(); ++i) {
    const double q = 1.0 - s.xi(i) * s.xi(i);
    s.offset[i] += amplitude * q * q;
  }
  for (std::size_t i = 0; i <= s.N(); ++i) {
    if (!(s.u(i) > 0.0)) throw ArgumentError("perturb_cap: perturbed heights leave the positive half-space");
  }
  return s;
}

/// du/dt of the front-fixed PDE at every node. The axis uses n u_xixi / r^2;
/// the boundary entry uses one-sided stencils (the solver closes that node
/// with the Neumann condition instead).
inline std::vector<double> rescaled_rhs(const GraphState& s, double r_dot) {
  const std::size_t N = s.N();
  if (N < 3) throw ArgumentError("rescaled_rhs: grid too small");
  if (!(s.r > 0.0)) throw DegenerateState("rescaled_rhs: r must be positive");
  const double h = s.dxi();
  const double h2 = h * h;
  const double m = static_cast<double>(s.n - 1);
  const auto& f = s.offset;
  std::vector<double> out(N + 1);
  out[0] = static_cast<double>(s.n) * 2.0 * (f[1] - f[0]) / (h2 * s.r);
  auto node = [&](std::size_t i, double fx, double fxx) {
    const double xi = s.xi(i);
    return (fxx / (1.0 + fx * fx) + m * fx / xi) / s.r + xi * r_dot * fx;
  };
  for (std::size_t i = 1; i < N; ++i) {
    out[i] = node(i, (f[i + 1] - f[i - 1]) / (2.0 * h), (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2);
  }
  out[N] = node(N, (3.0 * f[N] - 4.0 * f[N - 1] + f[N - 2]) / (2.0 * h),
                (2.0 * f[N] - 5.0 * f[N - 1] + 4.0 * f[N - 2] - f[N - 3]) / h2);
  for (std::size_t i = 0; i <= N; ++i) {
    if (!std::isfinite(out[i])) throw NumericalBlowup("rescaled_rhs: non-finite value", i);
  }
  return out;
}

enum class StepStatus { Accepted, PicardDiverged, DomainExit, NonPositive, NonFinite };

inline const char* to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Accepted: return "Accepted";
    case StepStatus::PicardDiverged: return "PicardDiverged";
    case StepStatus::DomainExit: return "DomainExit";
    case StepStatus::NonPositive: return "NonPositive";
    case StepStatus::NonFinite: return "NonFinite";
  }
  return "?";
}

struct StepResult {
  StepStatus status = StepStatus::PicardDiverged;
  GraphState state;  // valid only when accepted
  int iterations = 0;

  bool accepted() const { return status == StepStatus::Accepted; }
};

/// One semi-implicit step of size dt. With `previous` (the state before `s`)
/// the time derivative is the variable-step BDF2 formula, otherwise backward
/// Euler. A rejected result leaves the caller to retry with a smaller step.
inline StepResult step(const GraphState& s, double dt, const ProfileCurve& profile, const SolverConfig& cfg = {},
                       const GraphState* previous = nullptr) {
  if (!(dt > 0.0)) throw ArgumentError("step: dt must be positive");
  const std::size_t N = s.N();
  if (N < 3) throw ArgumentError("step: grid too small");
  const double h = s.dxi();
  const double h2 = h * h;
  const double nd = static_cast<double>(s.n);
  const double m = nd - 1.0;

  // u_t ~ a0 u(t+dt) + a1 u(t) + a2 u(t-dt_prev), a0 + a1 + a2 = 0.
  double a0 = 1.0 / dt, a1 = -1.0 / dt, a2 = 0.0;
  const bool bdf2 = previous != nullptr && previous->N() == N && s.t > previous->t;
  if (bdf2) {
    const double w = dt / (s.t - previous->t);
    a0 = (1.0 + 2.0 * w) / (dt * (1.0 + w));
    a1 = -(1.0 + w) / dt;
    a2 = w * w / (dt * (1.0 + w));
  }
  // History part of the time derivative at fixed xi, without the boundary
  // height a0 (h_new - h): a1 r phi + a2 (h_prev - h + r_prev phi_prev).
  std::vector<double> history(N);
  for (std::size_t i = 0; i < N; ++i) {
    history[i] = a1 * s.r * s.offset[i];
    if (bdf2) history[i] += a2 * (previous->height - s.height + previous->r * previous->offset[i]);
  }

  StepResult res;
  std::vector<double> phi = s.offset;
  std::vector<double> lower(N), diag(N), upper(N), rhs_a(N), ones(N, 1.0);

  // One linear solve with the coefficients frozen at boundary height
  // s.height + dh. Returns the implied height increment, or a rejection.
  auto sweep = [&](double dh, double& dh_out) -> StepStatus {
    const double h_it = s.height + dh;
    if (!profile.in_domain(h_it) || detail::crosses_pinch(profile, s.height, h_it)) return StepStatus::DomainExit;
    const ProfileJet jet = profile.jet(h_it);
    const double r_it = jet.value;
    if (!(r_it > 0.0) || !std::isfinite(r_it) || !std::isfinite(jet.deriv)) return StepStatus::NonPositive;
    const double r_rate = a0 * r_it + a1 * s.r + (bdf2 ? a2 * previous->r : 0.0);
    const double rho = r_it * r_rate;  // r * dr/dt
    double mu = a0 * r_it * r_it;
    if (mu < 1e-200) mu = 0.0;

    diag[0] = mu + 2.0 * nd / h2;
    upper[0] = -2.0 * nd / h2;
    lower[0] = 0.0;
    rhs_a[0] = -r_it * history[0];
    for (std::size_t i = 1; i < N; ++i) {
      const double xi = s.xi(i);
      const double fx = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
      const double alpha = 1.0 / (1.0 + fx * fx);
      const double beta = m / xi + xi * rho;
      lower[i] = -alpha / h2 + beta / (2.0 * h);
      diag[i] = mu + 2.0 * alpha / h2;
      upper[i] = -alpha / h2 - beta / (2.0 * h);
      rhs_a[i] = -r_it * history[i];
    }
    const detail::Tridiagonal system(lower, diag, upper);
    const std::vector<double> pa = system.solve(rhs_a);
    const std::vector<double> pb = system.solve(ones);

    const double g = -jet.deriv;
    const double denom = 4.0 * pb[N - 1] - pb[N - 2];
    const double v_scaled = (2.0 * h * g + 4.0 * pa[N - 1] - pa[N - 2]) / denom;  // a0 r (h_new - h)
    dh_out = v_scaled / (a0 * r_it);
    if (!std::isfinite(dh_out)) return StepStatus::NonFinite;
    for (std::size_t i = 0; i < N; ++i) phi[i] = pa[i] - v_scaled * pb[i];
    phi[N] = 0.0;
    return StepStatus::Accepted;
  };

  // Fixed point dh = G(dh) by secant iteration on G(dh) - dh. The radius
  // feedback through r^2/dt makes plain substitution oscillate with a
  // contraction factor close to -1.
  double x_prev = 0.0, g_prev = 0.0;
  double x = 0.0;
  // Start from the previous rate, dh/dt = r'/omega_Sigma'(h).
  if (s.r_dot != 0.0 && profile.in_domain(s.height)) {
    const double guess = dt * s.r_dot / profile.deriv_at(s.height);
    if (std::isfinite(guess) && profile.in_domain(s.height + guess) &&
        !detail::crosses_pinch(profile, s.height, s.height + guess)) {
      x = guess;
    }
  }
  for (int iter = 1; iter <= cfg.picard_max; ++iter) {
    res.iterations = iter;
    double gx = 0.0;
    const StepStatus st = sweep(x, gx);
    if (st != StepStatus::Accepted) {
      res.status = st;
      return res;
    }
    const double resid = gx - x;
    const double h_new = s.height + gx;
    const double r_new = profile.value_at(h_new);
    const double r_it = profile.value_at(s.height + x);
    if (iter >= 2 && std::abs(resid) <= cfg.picard_tol * std::max(std::abs(h_new), 1e-300) &&
        std::abs(r_new - r_it) <= 1e3 * cfg.picard_tol * r_new) {
      if (!profile.in_domain(h_new) || detail::crosses_pinch(profile, s.height, h_new)) {
        res.status = StepStatus::DomainExit;
        return res;
      }
      GraphState out;
      out.t = s.t + dt;
      out.n = s.n;
      out.r = r_new;
      out.height = h_new;
      out.r_dot = (r_new - s.r) / dt;
      out.offset = std::move(phi);
      if (!(out.r > 0.0)) {
        res.status = StepStatus::NonPositive;
        return res;
      }
      for (std::size_t i = 0; i <= N; ++i) {
        if (!std::isfinite(out.offset[i])) {
          res.status = StepStatus::NonFinite;
          return res;
        }
        if (!(out.u(i) > 0.0)) {
          res.status = StepStatus::NonPositive;
          return res;
        }
      }
      res.status = StepStatus::Accepted;
      res.state = std::move(out);
      return res;
    }
    double x_next = gx;
    if (iter >= 2) {
      const double slope = (resid - g_prev) / (x - x_prev);
      if (std::isfinite(slope) && slope != 0.0) x_next = x - resid / slope;
    }
    x_prev = x;
    g_prev = resid;
    x = x_next;
  }
  res.status = StepStatus::PicardDiverged;
  return res;
}

/// Adaptive step: cfl * min(1/sup|A|^2, K r^2 dxi^2, r dxi/|r'|), clamped.
inline double adapt_dt(const GraphState& s, const CurvatureField& field, const SolverConfig& cfg) {
  double limit = std::numeric_limits<double>::infinity();
  if (field.sup_A2 > 0.0) limit = std::min(limit, 1.0 / field.sup_A2);
  const double h = s.dxi();
  if (cfg.diffusive_factor > 0.0) limit = std::min(limit, cfg.diffusive_factor * s.r * s.r * h * h);
  limit = std::min(limit, s.r * h / std::max(std::abs(s.r_dot), 1e-300));
  return std::clamp(cfg.cfl_safety * limit, cfg.dt_min, cfg.dt_max);
}

// ---------------------------------------------------------------------------

struct TrajectorySample {
  double t = 0.0;
  double r = 0.0;
  double u_boundary = 0.0;
  double sup_A2 = 0.0;
  double H_boundary = 0.0;
  double dt = 0.0;
  bool argmax_at_boundary = false;
};

struct RunStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  int max_picard_iterations = 0;
  double max_neumann_C = 0.0;          // max Neumann residual / dxi^2
  double max_boundary_slope = 0.0;     // max |omega'(r)|
  double max_rprime_rel_error = 0.0;   // finite-difference dr/dt vs radius_velocity
  double min_dt = std::numeric_limits<double>::infinity();
  double max_dt = 0.0;
};

struct Trajectory {
  std::string profile_label;
  int n = 2;
  std::size_t N = 0;
  // Pinch point nearest the initial boundary height, if the support has one.
  std::optional<double> pinch_height;
  std::vector<TrajectorySample> samples;
  std::vector<GraphState> snapshots;
  StopReason stop_reason = StopReason::Horizon;
  RunStats stats;

  const TrajectorySample& initial() const { return samples.front(); }
  const TrajectorySample& final() const { return samples.back(); }
};

// Bound on dt_{k+1}/dt_k; variable-step BDF2 is zero-stable below 1 + sqrt(2).
inline constexpr double kMaxStepRatio = 2.0;

inline bool boundary_is_argmax(const CurvatureField& f, double rel_tol) {
  return f.A2_boundary() >= f.sup_A2 * (1.0 - rel_tol);
}

/// Integrates until a stop criterion fires. Rejected steps are retried with
/// half the step; when the step falls below dt_min the run ends with StepFloor.
inline Trajectory run(const ProfileCurve& profile, const GraphState& initial, const SolverConfig& cfg) {
  cfg.validate();
  if (initial.N() != cfg.N) throw ArgumentError("run: initial grid size differs from solver.N");
  const InvariantReport inv0 = check_invariants(initial, profile);
  if (!inv0.consistent()) throw ArgumentError("run: initial state violates the state invariants");

  Trajectory traj;
  traj.profile_label = profile.label();
  traj.n = initial.n;
  traj.N = initial.N();
  for (double w : profile.pinch_points()) {
    if (!traj.pinch_height || std::abs(w - initial.height) < std::abs(*traj.pinch_height - initial.height)) {
      traj.pinch_height = w;
    }
  }

  GraphState state = initial;
  CurvatureField field = curvature(state);
  const double r_stop = cfg.r_stop_fraction * initial.r;
  const double dxi2 = state.dxi() * state.dxi();

  auto push_sample = [&](double dt) {
    traj.samples.push_back(TrajectorySample{state.t, state.r, state.height, field.sup_A2, field.H_boundary(), dt,
                                            boundary_is_argmax(field, cfg.argmax_tol_factor * dxi2)});
    const double slope = std::abs(grid_derivatives(state).w1.back());
    traj.stats.max_boundary_slope = std::max(traj.stats.max_boundary_slope, slope);
  };
  push_sample(0.0);
  traj.snapshots.push_back(state);
  traj.stats.max_neumann_C = check_invariants(state, profile).neumann_residual / dxi2;
  double last_snapshot_r = state.r;
  double last_snapshot_t = state.t;

  bool first = true;
  std::optional<GraphState> previous;
  double dt_prev = 0.0;
  while (true) {
    if (state.r < r_stop) { traj.stop_reason = StopReason::RadiusFloor; break; }
    if (field.sup_A2 > cfg.A2_stop) { traj.stop_reason = StopReason::CurvatureCap; break; }
    if (state.t >= cfg.t_stop || cfg.t_stop - state.t < cfg.dt_min) { traj.stop_reason = StopReason::Horizon; break; }
    if (traj.stats.accepted >= cfg.max_steps) { traj.stop_reason = StopReason::StepFloor; break; }

    double dt = adapt_dt(state, field, cfg);
    if (first) dt = std::min(dt, cfg.dt_init);
    if (previous) dt = std::min(dt, kMaxStepRatio * dt_prev);
    dt = std::min(dt, cfg.t_stop - state.t);

    StepResult res;
    bool floor_hit = false;
    while (true) {
      res = step(state, dt, profile, cfg, previous ? &*previous : nullptr);
      if (res.accepted()) break;
      ++traj.stats.rejected;
      dt *= 0.5;
      if (dt < cfg.dt_min) { floor_hit = true; break; }
    }
    if (floor_hit) { traj.stop_reason = StopReason::StepFloor; break; }
    first = false;

    const double r_old = state.r;
    previous = std::move(state);
    dt_prev = dt;
    state = std::move(res.state);
    field = curvature(state);

    const InvariantReport inv = check_invariants(state, profile);
    if (!inv.consistent()) {
      throw InternalConsistencyFault("run: accepted state violates invariants at t = " +
                                     detail::format_double(state.t), state.dump());
    }
    auto& st = traj.stats;
    ++st.accepted;
    st.max_picard_iterations = std::max(st.max_picard_iterations, res.iterations);
    st.max_neumann_C = std::max(st.max_neumann_C, inv.neumann_residual / dxi2);
    st.min_dt = std::min(st.min_dt, dt);
    st.max_dt = std::max(st.max_dt, dt);
    const double slope_sigma = profile.deriv_at(state.height);
    const double rv = radius_velocity(field.H_boundary(), slope_sigma);
    const double fd = (state.r - r_old) / dt;
    // The first step projects the initial data onto the discrete Neumann
    // closure, so its difference quotient is not a rate.
    if (st.accepted > 1 && std::abs(rv) > 0.0) st.max_rprime_rel_error = std::max(st.max_rprime_rel_error, std::abs(fd - rv) / std::abs(rv));

    push_sample(dt);
    const bool take = cfg.snapshot_schedule == SnapshotSchedule::Dyadic
                          ? state.r <= 0.5 * last_snapshot_r
                          : state.t - last_snapshot_t >= cfg.snapshot_interval;
    if (take) {
      traj.snapshots.push_back(state);
      last_snapshot_r = state.r;
      last_snapshot_t = state.t;
    }
  }
  if (traj.snapshots.back().t != state.t) traj.snapshots.push_back(state);
  return traj;
}

}  // namespace pinchflow
