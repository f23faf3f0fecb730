#include <gtest/gtest.h>

#include <cmath>

#include "pinchflow/analysis.hpp"
#include "pinchflow/oracle.hpp"

using namespace pinchflow;

// The closed form is checked by substitution before anything relies on it.
TEST(SphereOracle, SubstitutionIntoPde) {
  for (int n : {2, 3, 4}) {
    const SphereSolution sph(2.0, n, 1.0);
    for (double frac : {0.0, 0.25, 0.5, 0.8}) {
      const double t = frac * sph.T();
      for (double y : {0.05, 0.3, 0.7, 1.0}) {
        EXPECT_LT(sphere_substitution_residual(sph, y * sph.r(t), t), 1e-5) << n << " " << t << " " << y;
      }
    }
  }
}

TEST(SphereOracle, ClosedForm) {
  const SphereSolution sph(2.0, 2, 1.0);
  EXPECT_DOUBLE_EQ(sph.T(), 1.0);
  EXPECT_DOUBLE_EQ(sph.R(0.75), 1.0);
  EXPECT_NEAR(sph.r(0.75), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(sph.R(1.0), DomainError);
  EXPECT_DOUBLE_EQ(SphereSolution(2.0, 3, 1.0).T(), 4.0 / 6.0);
}

TEST(SphereOracle, StateAtStart) {
  const GraphState s = sphere_state(2.0, 2, 0.0, 1.0, 64);
  EXPECT_NEAR(s.r, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.u_boundary(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.u(0), 2.0, 1e-15);
  EXPECT_THROW(sphere_state(2.0, 2, 1.0, 1.0, 64), DomainError);
}

TEST(SphereOracle, OrthogonalToCone) {
  for (double c : {0.5, 1.0, 3.0}) {
    const auto cone = profiles::cone(c);
    const GraphState s = sphere_state(2.0, 2, 0.3, c, 200);
    const auto rep = check_invariants(s, cone);
    EXPECT_LT(rep.boundary_consistency, 1e-14);
    const GridDerivatives d = sphere_derivatives(s, SphereSolution(2.0, 2, c).R(0.3));
    EXPECT_NEAR(d.w1.back(), neumann_slope(cone, s.height), 1e-12);
  }
}

TEST(SphereOracle, CurvatureOfExactState) {
  for (int n : {2, 3, 4}) {
    const SphereSolution sph(1.5, n, 1.0);
    const double t = 0.4 * sph.T();
    const GraphState s = sphere_state(1.5, n, t, 1.0, 80);
    const double R = sph.R(t);
    const GridDerivatives d = sphere_derivatives(s, R);
    const CurvatureField f = curvature_from_derivatives(d.y, d.w1, d.w2, n);
    for (double a : f.A2) EXPECT_NEAR(a, n / (R * R), 1e-8 * n / (R * R));
    EXPECT_NEAR(sph.A2(t), n / (R * R), 1e-14);
  }
}

TEST(PdeResidual, FlatDiskIsZero) {
  const GraphState a = make_initial_cap(profiles::cylinder(1.0), 1.0, 2, 32);
  GraphState b = a;
  b.t = 0.1;
  EXPECT_EQ(pde_residual(a, b), 0.0);
}

TEST(PdeResidual, SphereSecondOrder) {
  const double r1 = pde_residual(sphere_state(2.0, 2, 0.1, 1.0, 400), sphere_state(2.0, 2, 0.1 + 1e-5, 1.0, 400));
  EXPECT_LE(r1, 1e-3);
  const double c = pde_residual(sphere_state(2.0, 2, 0.1, 1.0, 50), sphere_state(2.0, 2, 0.1 + 4e-4, 1.0, 50));
  const double f = pde_residual(sphere_state(2.0, 2, 0.1, 1.0, 100), sphere_state(2.0, 2, 0.1 + 1e-4, 1.0, 100));
  EXPECT_GE(c / f, 3.5) << c << " " << f;
}

TEST(PdeResidual, RejectsBadPairs) {
  const GraphState a = sphere_state(2.0, 2, 0.1, 1.0, 50);
  EXPECT_THROW(pde_residual(a, a), ArgumentError);
  EXPECT_THROW(pde_residual(a, sphere_state(2.0, 2, 0.2, 1.0, 60)), ArgumentError);
}

TEST(Synthetic, ExactDataFits) {
  const Trajectory tr = synthetic_trajectory(1.0, 1.0, 0.0, 64);
  const TEstimate T = estimate_T(tr);
  EXPECT_NEAR(T.T, 1.0, 1e-6);
  EXPECT_NEAR(fit_exponent(tr, T.T).p, 1.0, 1e-6);
}

TEST(Synthetic, SqrtRadiusGivesT) {
  const Trajectory tr = synthetic_trajectory(1.5, 0.5, 0.0, 64);
  EXPECT_NEAR(estimate_T(tr).T, 0.5, 1e-6);
}

TEST(Synthetic, Deterministic) {
  const Trajectory a = synthetic_trajectory(4.0 / 3.0, 0.5, 0.01, 64);
  const Trajectory b = synthetic_trajectory(4.0 / 3.0, 0.5, 0.01, 64);
  for (std::size_t j = 0; j < a.samples.size(); ++j) EXPECT_EQ(a.samples[j].sup_A2, b.samples[j].sup_A2);
  EXPECT_THROW(synthetic_trajectory(0.0, 1.0, 0.0, 64), ArgumentError);
}
