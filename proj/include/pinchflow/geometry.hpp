#pragma once

// Curvature and boundary relations for rotationally symmetric graphs.
//
// Sign convention: the graph normal is (-omega', 1)/v with v = sqrt(1 + omega'^2),
// and H > 0 on a sphere. The rotational principal curvature -omega'/(v y)
// carries multiplicity n - 1, so that omega_t = -H v reproduces the graph PDE.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pinchflow/errors.hpp"
#include "pinchflow/graph_state.hpp"
#include "pinchflow/profiles.hpp"

namespace pinchflow {

struct CurvaturePoint {
  double H = 0.0;
  double A2 = 0.0;
};

/// H and |A|^2 from physical derivatives at radius y. At y == 0 the rotational
/// curvature takes its axis limit omega'/y -> omega''(0) and `w1` is ignored.
inline CurvaturePoint curvature_at(double y, double w1, double w2, int n) {
  const double m = static_cast<double>(n - 1);
  if (y == 0.0) {
    return CurvaturePoint{-static_cast<double>(n) * w2, static_cast<double>(n) * w2 * w2};
  }
  const double v2 = 1.0 + w1 * w1;
  const double v = std::sqrt(v2);
  const double k_profile = -w2 / (v2 * v);
  const double k_rot = -w1 / (v * y);
  return CurvaturePoint{k_profile + m * k_rot, k_profile * k_profile + m * k_rot * k_rot};
}

/// Per-node mean curvature and squared second fundamental form.
struct CurvatureField {
  std::vector<double> H;
  std::vector<double> A2;
  double sup_A2 = 0.0;
  std::size_t argmax_index = 0;

  std::size_t size() const { return A2.size(); }
  double H_boundary() const { return H.back(); }
  double A2_boundary() const { return A2.back(); }
};

/// Curvature from derivatives supplied node by node (e.g. analytically).
inline CurvatureField curvature_from_derivatives(std::span<const double> y, std::span<const double> w1,
                                                 std::span<const double> w2, int n) {
  if (y.size() != w1.size() || y.size() != w2.size()) throw ArgumentError("curvature: size mismatch");
  CurvatureField f;
  f.H.resize(y.size());
  f.A2.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const CurvaturePoint c = curvature_at(y[i], w1[i], w2[i], n);
    f.H[i] = c.H;
    f.A2[i] = c.A2;
    if (c.A2 > f.sup_A2 || i == 0) {
      f.sup_A2 = c.A2;
      f.argmax_index = i;
    }
  }
  return f;
}

/// Physical first and second derivatives of a state on its grid: central
/// differences inside, the symmetry ghost node at the axis and second-order
/// one-sided stencils at the boundary.
struct GridDerivatives {
  std::vector<double> y, w1, w2;
};

inline GridDerivatives grid_derivatives(const GraphState& s) {
  const std::size_t N = s.N();
  if (N < 3) throw ArgumentError("curvature: grid needs at least 4 nodes");
  if (!(s.r > 0.0)) throw DegenerateState("curvature: r must be positive");
  const double h = s.dxi();
  const double h2 = h * h;
  const auto& f = s.offset;
  GridDerivatives d;
  d.y.resize(N + 1);
  d.w1.resize(N + 1);
  d.w2.resize(N + 1);
  for (std::size_t i = 0; i <= N; ++i) d.y[i] = s.y(i);
  d.w1[0] = 0.0;
  d.w2[0] = 2.0 * (f[1] - f[0]) / (h2 * s.r);
  for (std::size_t i = 1; i < N; ++i) {
    d.w1[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d.w2[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h2 * s.r);
  }
  d.w1[N] = (3.0 * f[N] - 4.0 * f[N - 1] + f[N - 2]) / (2.0 * h);
  d.w2[N] = (2.0 * f[N] - 5.0 * f[N - 1] + 4.0 * f[N - 2] - f[N - 3]) / (h2 * s.r);
  return d;
}

inline CurvatureField curvature(const GraphState& s) {
  const GridDerivatives d = grid_derivatives(s);
  return curvature_from_derivatives(d.y, d.w1, d.w2, s.n);
}

/// Slope the graph must take at the boundary: omega'(r) = -omega_Sigma'(u_N).
inline double neumann_slope(const ProfileCurve& profile, double boundary_height) {
  return -profile.deriv_at(boundary_height);
}

struct SlopeBound {
  double C_sigma = 1.0;
  double bound = 0.0;
};

/// |omega'(r)| <= sqrt(1/C_sigma - 1) for a support with graph floor C_sigma.
inline SlopeBound boundary_gradient_bound(double C_sigma) {
  if (!(C_sigma > 0.0 && C_sigma <= 1.0)) throw ArgumentError("boundary_gradient_bound: C_sigma must lie in (0, 1]");
  return SlopeBound{C_sigma, C_sigma == 1.0 ? 0.0 : std::sqrt(1.0 / C_sigma - 1.0)};
}

/// dr/dt = -(H/v) omega_Sigma' with v = sqrt(1 + omega_Sigma'^2).
inline double radius_velocity(double H_boundary, double slope_sigma) {
  return -H_boundary * slope_sigma / std::sqrt(1.0 + slope_sigma * slope_sigma);
}

/// Rate of the boundary height along the moving boundary, -H/v.
inline double boundary_height_velocity(const GraphState& s) {
  const CurvatureField f = curvature(s);
  const GridDerivatives d = grid_derivatives(s);
  const double w1 = d.w1.back();
  return -f.H_boundary() / std::sqrt(1.0 + w1 * w1);
}

}  // namespace pinchflow
