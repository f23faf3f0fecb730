#include <gtest/gtest.h>

#include <cmath>

#include "pinchflow/oracle.hpp"
#include "pinchflow/solver.hpp"

using namespace pinchflow;

namespace {

GraphState flat_disk(double height, std::size_t N) {
  return make_initial_cap(profiles::cylinder(1.0), height, 2, N);
}

SolverConfig sphere_config(std::size_t N) {
  SolverConfig cfg;
  cfg.N = N;
  cfg.diffusive_factor = 64.0;
  cfg.r_stop_fraction = 1e-3;
  return cfg;
}

}  // namespace

TEST(Config, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.N = 8;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.dt_init = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.cfl_safety = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(InitialCap, UnitConeGivesSphere) {
  const GraphState s = make_initial_cap(profiles::cone(1.0), std::sqrt(2.0), 2, 64);
  EXPECT_NEAR(s.r, std::sqrt(2.0), 1e-15);
  for (std::size_t i = 0; i <= s.N(); ++i) EXPECT_NEAR(std::hypot(s.y(i), s.u(i)), 2.0, 1e-14) << i;
}

TEST(InitialCap, CylinderGivesFlatDisk) {
  const GraphState s = flat_disk(3.0, 32);
  for (std::size_t i = 0; i <= s.N(); ++i) EXPECT_EQ(s.u(i), 3.0);
}

TEST(InitialCap, ExpinvBoundarySlope) {
  const GraphState s = make_initial_cap(profiles::expinv(1.0), 1.0, 2, 400);
  EXPECT_NEAR(s.r, 0.36787944117144232, 1e-15);
  const auto rep = check_invariants(s, profiles::expinv(1.0));
  EXPECT_TRUE(rep.consistent());
  EXPECT_LT(rep.neumann_residual, 1e-4);
}

TEST(InitialCap, RejectsPinchHeight) {
  EXPECT_THROW(make_initial_cap(profiles::cone(1.0), 0.0, 2, 32), DomainError);
  EXPECT_THROW(make_initial_cap(profiles::cone(1.0), 1.0, 2, 8), ArgumentError);
}

TEST(RescaledRhs, FlatDiskIsStationary) {
  for (double v : rescaled_rhs(flat_disk(1.0, 32), 0.0)) EXPECT_EQ(v, 0.0);
}

TEST(RescaledRhs, SphereAxis) {
  const GraphState s = sphere_state(2.0, 2, 0.0, 1.0, 400);
  const auto rhs = rescaled_rhs(s, s.r_dot);
  EXPECT_NEAR(rhs[0], -2.0 / s.u(0), 1e-5);
  // omega_t = -n/omega plus the front-fixing advection xi r_dot omega_y.
  for (std::size_t i = 1; i < s.N(); i += 37) {
    const double expected = -2.0 / s.u(i) + s.xi(i) * s.r_dot * (-s.y(i) / s.u(i));
    EXPECT_NEAR(rhs[i], expected, 1e-4) << i;
  }
}

TEST(RescaledRhs, AdvectionOfLinearProfile) {
  // u = 1 - xi has u_xixi = 0; subtract the rotational term to isolate advection.
  GraphState s = GraphState::from_heights(0.0, 2, 2.0, [] {
    std::vector<double> u(33);
    for (std::size_t i = 0; i <= 32; ++i) u[i] = 1.0 - i / 32.0;
    return u;
  }());
  const double r_dot = -0.7;
  const auto a = rescaled_rhs(s, r_dot);
  const auto b = rescaled_rhs(s, 0.0);
  for (std::size_t i = 1; i < 32; ++i) {
    const double xi = s.xi(i);
    EXPECT_NEAR(a[i] - b[i], xi * r_dot * (-1.0 / s.r), 1e-14) << i;
  }
}

TEST(Step, FlatDiskUnchanged) {
  const auto cyl = profiles::cylinder(1.0);
  const GraphState s = flat_disk(2.0, 64);
  for (double dt : {1e-6, 1e-2, 1.0, 100.0}) {
    const StepResult res = step(s, dt, cyl);
    ASSERT_TRUE(res.accepted()) << to_string(res.status);
    EXPECT_NEAR(res.state.r, 1.0, 1e-12);
    for (std::size_t i = 0; i <= s.N(); ++i) EXPECT_NEAR(res.state.u(i), 2.0, 1e-12);
  }
}

TEST(Step, OneSphereStep) {
  const SphereSolution sph(2.0, 2, 1.0);
  const GraphState s = sphere_state(2.0, 2, 0.0, 1.0, 400);
  const double dt = 1e-5;
  const StepResult res = step(s, dt, profiles::cone(1.0));
  ASSERT_TRUE(res.accepted());
  EXPECT_LT(res.state.r, s.r);
  EXPECT_LE(std::abs(res.state.r - sph.r(dt)), 1e-6);
  EXPECT_DOUBLE_EQ(res.state.t, dt);
}

TEST(Step, HugeStepRejected) {
  const GraphState s = sphere_state(2.0, 2, 0.9, 1.0, 100);
  const StepResult res = step(s, 1.0, profiles::cone(1.0));
  EXPECT_FALSE(res.accepted());
}

TEST(AdaptDt, Examples) {
  SolverConfig cfg;
  cfg.diffusive_factor = 0.0;
  const GraphState flat = flat_disk(1.0, 32);
  EXPECT_EQ(adapt_dt(flat, curvature(flat), cfg), cfg.dt_max);

  cfg.cfl_safety = 0.2;
  CurvatureField f;
  f.sup_A2 = 1e6;
  EXPECT_LE(adapt_dt(flat, f, cfg), 2e-7 * (1 + 1e-15));

  cfg = SolverConfig{};
  cfg.dt_min = 1e-3;
  cfg.dt_init = 1e-3;
  EXPECT_EQ(adapt_dt(flat, f, cfg), 1e-3);
}

TEST(Run, FlatDiskHorizon) {
  SolverConfig cfg;
  cfg.N = 32;
  cfg.t_stop = 1.0;
  cfg.dt_max = 0.05;
  const GraphState s = flat_disk(1.5, 32);
  const Trajectory tr = run(profiles::cylinder(1.0), s, cfg);
  EXPECT_EQ(tr.stop_reason, StopReason::Horizon);
  EXPECT_GE(tr.samples.back().t, 1.0);
  const GraphState& last = tr.snapshots.back();
  for (std::size_t i = 0; i <= last.N(); ++i) EXPECT_NEAR(last.u(i), 1.5, 1e-12);
}

TEST(Run, SphereStopsNearT) {
  const Trajectory tr = run(profiles::cone(1.0), sphere_state(2.0, 2, 0.0, 1.0, 100), sphere_config(100));
  EXPECT_TRUE(tr.stop_reason == StopReason::RadiusFloor || tr.stop_reason == StopReason::CurvatureCap);
  EXPECT_NEAR(tr.samples.back().t, 1.0, 1e-3);
  for (std::size_t j = 1; j < tr.samples.size(); ++j) EXPECT_GT(tr.samples[j].t, tr.samples[j - 1].t);
  EXPECT_LE(tr.stats.max_rprime_rel_error, 5.0 / 100);
}

TEST(Run, SphereDtDecreasesLate) {
  const SphereSolution sph(2.0, 2, 1.0);
  const Trajectory tr = run(profiles::cone(1.0), sphere_state(2.0, 2, 0.0, 1.0, 100), sphere_config(100));
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& s : tr.samples) {
    if (s.dt == 0.0 || s.t >= sph.T() || sph.R(s.t) >= 0.5) continue;
    EXPECT_LE(s.dt, prev * (1 + 1e-12)) << s.t;
    prev = s.dt;
  }
}

TEST(Run, SnapshotsSatisfyInvariants) {
  const auto cone = profiles::cone(1.0);
  const Trajectory tr = run(cone, sphere_state(2.0, 2, 0.0, 1.0, 100), sphere_config(100));
  ASSERT_GE(tr.snapshots.size(), 3u);
  for (const auto& s : tr.snapshots) {
    const auto rep = check_invariants(s, cone);
    EXPECT_TRUE(rep.consistent()) << s.t;
    EXPECT_LE(rep.neumann_residual, tr.stats.max_neumann_C * s.dxi() * s.dxi() * (1 + 1e-9) + 1e-15);
  }
}

TEST(Run, ArgmaxAtBoundaryLate) {
  struct Case {
    ProfileCurve profile;
    double h0, perturbation, r_stop;
  };
  for (const Case& c : {Case{profiles::cone(1.0), std::sqrt(2.0), 0.3, 1e-4},
                        Case{profiles::expinv(1.0), 4.0, 0.0, 1e-40}}) {
    SolverConfig cfg;
    cfg.N = 100;
    cfg.dt_max = 1.0;
    cfg.t_stop = 1e6;
    cfg.r_stop_fraction = c.r_stop;
    cfg.A2_stop = 1e12;
    cfg.diffusive_factor = c.perturbation != 0.0 ? 64.0 : 0.0;
    GraphState s = make_initial_cap(c.profile, c.h0, 2, cfg.N);
    if (c.perturbation != 0.0) s = perturb_cap(s, c.perturbation);
    const Trajectory tr = run(c.profile, s, cfg);
    // Final 10% of accepted steps. For expinv the axis leads by up to 5% while
    // the boundary passes the slope maximum at z = 1/2, well before that.
    const auto& S = tr.samples;
    ASSERT_GT(S.size(), 100u);
    for (std::size_t j = S.size() - S.size() / 10; j < S.size(); ++j) {
      EXPECT_TRUE(S[j].argmax_at_boundary) << c.profile.label() << " t=" << S[j].t;
    }
  }
}

TEST(Run, Deterministic) {
  const auto cone = profiles::cone(1.0);
  const GraphState s = perturb_cap(make_initial_cap(cone, std::sqrt(2.0), 2, 64), 0.2);
  SolverConfig cfg;
  cfg.N = 64;
  const Trajectory a = run(cone, s, cfg);
  const Trajectory b = run(cone, s, cfg);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t j = 0; j < a.samples.size(); ++j) {
    EXPECT_EQ(a.samples[j].t, b.samples[j].t);
    EXPECT_EQ(a.samples[j].r, b.samples[j].r);
    EXPECT_EQ(a.samples[j].sup_A2, b.samples[j].sup_A2);
  }
}
