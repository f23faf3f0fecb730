#pragma once

// Exact and synthetic reference data.
//
// Shrinking sphere: omega(y, t) = sqrt(R(t)^2 - y^2) gives omega_t = -R R'/omega
// and omega''/(1+omega'^2) + (n-1) omega'/y = -n/omega, hence R R' = -n and
// R(t) = sqrt(R0^2 - 2 n t). An origin-centred sphere meets every cone through
// the origin orthogonally, so it solves the free-boundary problem on a cone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pinchflow/errors.hpp"
#include "pinchflow/geometry.hpp"
#include "pinchflow/graph_state.hpp"
#include "pinchflow/solver.hpp"

namespace pinchflow {

struct SphereSolution {
  double R0 = 2.0;
  int n = 2;
  double cone_slope = 1.0;

  SphereSolution(double R0_, int n_, double cone_slope_ = 1.0) : R0(R0_), n(n_), cone_slope(cone_slope_) {
    if (!(R0 > 0.0)) throw ArgumentError("SphereSolution: R0 must be positive");
    if (n < 2) throw ArgumentError("SphereSolution: n must be >= 2");
    if (!(cone_slope > 0.0)) throw ArgumentError("SphereSolution: cone slope must be positive");
  }

  double T() const { return R0 * R0 / (2.0 * n); }

  double R(double t) const {
    if (!(t < T())) throw DomainError("SphereSolution: t must be below " + detail::format_double(T()));
    return std::sqrt(R0 * R0 - 2.0 * n * t);
  }
  double r(double t) const { return R(t) * cone_slope / std::sqrt(1.0 + cone_slope * cone_slope); }
  double boundary_height(double t) const { return R(t) / std::sqrt(1.0 + cone_slope * cone_slope); }
  double A2(double t) const { return n / (R(t) * R(t)); }
  double H(double t) const { return n / R(t); }
};

/// Exact state at time t on the grid xi_i = i/N. The offsets use
/// omega - h = r^2 (1 - xi^2)/(omega + h), free of cancellation.
inline GraphState sphere_state(double R0, int n, double t, double cone_slope, std::size_t N) {
  if (N < 3) throw ArgumentError("sphere_state: N must be >= 3");
  const SphereSolution sph(R0, n, cone_slope);
  const double R = sph.R(t);
  GraphState s;
  s.t = t;
  s.n = n;
  s.r = sph.r(t);
  s.height = sph.boundary_height(t);
  s.r_dot = -static_cast<double>(n) * cone_slope / (std::sqrt(1.0 + cone_slope * cone_slope) * R);
  s.offset.resize(N + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    const double xi = static_cast<double>(i) / static_cast<double>(N);
    const double y = xi * s.r;
    const double w = std::sqrt(R * R - y * y);
    s.offset[i] = s.r * (1.0 - xi * xi) / (w + s.height);
  }
  s.offset[N] = 0.0;
  return s;
}

/// Analytic derivatives of the sphere graph at the grid nodes of `s`.
inline GridDerivatives sphere_derivatives(const GraphState& s, double R) {
  GridDerivatives d;
  const std::size_t M = s.offset.size();
  d.y.resize(M);
  d.w1.resize(M);
  d.w2.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double y = s.y(i);
    const double w = std::sqrt(R * R - y * y);
    d.y[i] = y;
    d.w1[i] = -y / w;
    d.w2[i] = -R * R / (w * w * w);
  }
  return d;
}

/// Finite-difference substitution check of the sphere closed form into the
/// graph PDE at (y, t): returns max of |omega_t - rhs| and |rhs + n/omega|,
/// with omega_t and the y-derivatives taken by central differences of step h.
inline double sphere_substitution_residual(const SphereSolution& sph, double y, double t, double h = 1e-4) {
  auto omega = [&](double yy, double tt) { return std::sqrt(sph.R(tt) * sph.R(tt) - yy * yy); };
  const double w = omega(y, t);
  const double wt = (omega(y, t + h) - omega(y, t - h)) / (2.0 * h);
  const double wy = (omega(y + h, t) - omega(y - h, t)) / (2.0 * h);
  const double wyy = (omega(y + h, t) - 2.0 * w + omega(y - h, t)) / (h * h);
  const double rhs = wyy / (1.0 + wy * wy) + (sph.n - 1) * wy / y;
  return std::max(std::abs(wt - rhs), std::abs(rhs + sph.n / w));
}

/// Truncation probe between consecutive states: max over interior nodes of
/// |du/dt - rhs(midpoint)| normalised by max(1, sup|rhs|).
inline double pde_residual(const GraphState& a, const GraphState& b) {
  if (a.N() != b.N() || a.N() < 3) throw ArgumentError("pde_residual: grids differ or are too small");
  const double dt = b.t - a.t;
  if (!(dt > 0.0)) throw ArgumentError("pde_residual: states must be in increasing time");
  GraphState mid;
  mid.t = 0.5 * (a.t + b.t);
  mid.n = a.n;
  mid.r = 0.5 * (a.r + b.r);
  mid.height = 0.5 * (a.height + b.height);
  mid.offset.resize(a.offset.size());
  for (std::size_t i = 0; i < a.offset.size(); ++i) {
    mid.offset[i] = (a.r * a.offset[i] + b.r * b.offset[i]) / (2.0 * mid.r);
  }
  const double r_dot = (b.r - a.r) / dt;
  const std::vector<double> rhs = rescaled_rhs(mid, r_dot);
  double worst = 0.0, scale = 1.0;
  for (std::size_t i = 1; i < a.N(); ++i) {
    const double dudt = ((b.height - a.height) + (b.r * b.offset[i] - a.r * a.offset[i])) / dt;
    worst = std::max(worst, std::abs(dudt - rhs[i]));
    scale = std::max(scale, std::abs(rhs[i]));
  }
  return worst / scale;
}

/// Power-law test trajectory: sup|A|^2 = (T-t)^-p (1+eta), r = (T-t)^(1/2),
/// eta uniform in [-noise, noise]. Times are geometric in T - t from T down
/// to T * 10^-decades; the boundary height equals r above a pinch at 0.
inline Trajectory synthetic_trajectory(double p, double T, double noise, std::size_t samples,
                                       std::uint64_t seed = 20240601, double decades = 8.0) {
  if (!(p > 0.0) || !(T > 0.0)) throw ArgumentError("synthetic_trajectory: p and T must be positive");
  if (samples < 2) throw ArgumentError("synthetic_trajectory: need at least two samples");
  if (!(noise >= 0.0 && noise < 1.0)) throw ArgumentError("synthetic_trajectory: noise must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eta(-noise, noise);
  Trajectory traj;
  traj.profile_label = "synthetic";
  traj.pinch_height = 0.0;
  traj.stop_reason = StopReason::RadiusFloor;
  double prev_t = 0.0;
  for (std::size_t j = 0; j < samples; ++j) {
    const double frac = static_cast<double>(j) / static_cast<double>(samples - 1);
    const double tau = T * std::pow(10.0, -decades * frac);
    TrajectorySample s;
    s.t = j == 0 ? 0.0 : T - tau;
    s.r = std::sqrt(tau);
    s.u_boundary = s.r;
    s.sup_A2 = std::pow(tau, -p) * (1.0 + (noise > 0.0 ? eta(rng) : 0.0));
    s.dt = s.t - prev_t;
    s.argmax_at_boundary = true;
    prev_t = s.t;
    traj.samples.push_back(s);
  }
  return traj;
}

/// Bounded-curvature counterpart for the not-Type-0 check: sup|A|^2 saturates
/// at `level` while r still decays.
inline Trajectory synthetic_bounded_trajectory(double level, double T, std::size_t samples) {
  Trajectory traj = synthetic_trajectory(1.0, T, 0.0, samples);
  for (auto& s : traj.samples) s.sup_A2 = level * (1.0 - 0.5 * std::exp(-(s.t / T) * 10.0));
  return traj;
}

}  // namespace pinchflow
