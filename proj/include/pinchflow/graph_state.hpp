#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "pinchflow/errors.hpp"
#include "pinchflow/profiles.hpp"

namespace pinchflow {

/// Rotationally symmetric graph omega(y, t) on the moving domain (0, r(t)),
/// sampled on the fixed grid xi_i = i/N with y = xi * r.
///
/// Heights are stored as the boundary height plus an offset normalised by the
/// radius, u_i = height + r * offset[i] with offset[N] = 0. Near a flat pinch
/// the interior height variation is many orders below the height itself, and
/// this split keeps it at full relative precision.
struct GraphState {
  double t = 0.0;
  int n = 2;
  double r = 1.0;
  double height = 0.0;
  double r_dot = 0.0;  // rate of the last accepted step
  std::vector<double> offset;

  std::size_t N() const { return offset.empty() ? 0 : offset.size() - 1; }
  double dxi() const { return 1.0 / static_cast<double>(N()); }
  double xi(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(N()); }
  double y(std::size_t i) const { return xi(i) * r; }
  double u(std::size_t i) const { return height + r * offset[i]; }
  double u_boundary() const { return height; }

  std::vector<double> heights() const {
    std::vector<double> out(offset.size());
    for (std::size_t i = 0; i < offset.size(); ++i) out[i] = u(i);
    return out;
  }

  /// Builds a state from physical heights u_i on the grid.
  static GraphState from_heights(double t, int n, double r, const std::vector<double>& u) {
    if (u.size() < 2) throw ArgumentError("GraphState: need at least two nodes");
    if (!(r > 0.0)) throw DegenerateState("GraphState: r must be positive");
    GraphState s;
    s.t = t;
    s.n = n;
    s.r = r;
    s.height = u.back();
    s.offset.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) s.offset[i] = (u[i] - s.height) / r;
    s.offset.back() = 0.0;
    return s;
  }

  std::string dump() const {
    std::ostringstream os;
    os.precision(17);
    os << "t=" << t << " n=" << n << " r=" << r << " height=" << height << " r_dot=" << r_dot << " N=" << N()
       << "\nxi,y,u,offset\n";
    for (std::size_t i = 0; i < offset.size(); ++i) {
      os << xi(i) << ',' << y(i) << ',' << u(i) << ',' << offset[i] << '\n';
    }
    return os.str();
  }
};

/// Residuals of the state invariants with respect to a support profile.
struct InvariantReport {
  double boundary_consistency = 0.0;  // |r - omega_Sigma(u_N)|
  double neumann_residual = 0.0;      // |u_xi(1)/r + omega_Sigma'(u_N)| (one-sided)
  double axis_slope = 0.0;            // |u_xi(0)/r| (one-sided)
  double min_height = 0.0;
  bool finite = true;

  double r = 0.0;

  /// Boundary consistency, positivity and finiteness; the Neumann residual is
  /// judged against the grid spacing by the caller.
  bool consistent() const {
    return finite && boundary_consistency <= 1e-10 * (1.0 + r) && min_height > 0.0;
  }
};

inline InvariantReport check_invariants(const GraphState& s, const ProfileCurve& profile) {
  InvariantReport rep;
  const std::size_t N = s.N();
  if (N < 3) throw ArgumentError("check_invariants: grid too small");
  const double h = s.dxi();
  for (double v : s.offset) rep.finite = rep.finite && std::isfinite(v);
  rep.finite = rep.finite && std::isfinite(s.r) && std::isfinite(s.height) && std::isfinite(s.t);
  rep.boundary_consistency = std::abs(s.r - profile.value_at(s.height));
  rep.r = s.r;
  const auto& f = s.offset;
  const double slope_b = (3.0 * f[N] - 4.0 * f[N - 1] + f[N - 2]) / (2.0 * h);
  if (profile.in_domain(s.height)) {
    rep.neumann_residual = std::abs(slope_b + profile.deriv_at(s.height));
  } else {
    rep.neumann_residual = std::numeric_limits<double>::infinity();
  }
  rep.axis_slope = std::abs((-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h));
  rep.min_height = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= N; ++i) rep.min_height = std::min(rep.min_height, s.u(i));
  return rep;
}

}  // namespace pinchflow
