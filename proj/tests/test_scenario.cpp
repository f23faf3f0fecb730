#include <gtest/gtest.h>

#include <filesystem>

#include "pinchflow/scenario.hpp"

using namespace pinchflow;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)ScenarioConfig::parse(text).resolve();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ScenarioConfig, ParsesAndOverrides) {
  const auto cfg = ScenarioConfig::parse(
      "# comment\nprofile.key = expinv\nprofile.k = 2   # trailing\ninitial.boundary_height = 40\n"
      "solver.N = 64\nsolver.N = 128\nsolver.snapshot_schedule = uniform\noutput.name = x\n");
  const Scenario sc = cfg.resolve();
  EXPECT_EQ(sc.profile_key, "expinv");
  EXPECT_EQ(sc.profile_params.at("k"), 2.0);
  EXPECT_EQ(sc.solver.N, 128u);
  EXPECT_EQ(sc.solver.snapshot_schedule, SnapshotSchedule::Uniform);
  EXPECT_EQ(sc.name, "x");
  const auto* cert = std::get_if<Type2Certificate>(&sc.certificate);
  ASSERT_NE(cert, nullptr);
  EXPECT_DOUBLE_EQ(cert->predicted_exponent(), 1.5);
}

TEST(ScenarioConfig, Diagnostics) {
  const std::string base = "profile.key = cone\ninitial.boundary_height = 1\n";
  EXPECT_NE(error_of(base + "solver.N = 8\n").find("N must be >= 16"), std::string::npos);
  EXPECT_NE(error_of(base + "solver.cfl = 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of(base + "solver.N = abc\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of(base + "solver.N = 20.5\n").find("integer"), std::string::npos);
  EXPECT_NE(error_of("initial.boundary_height = 1\n").find("profile.key"), std::string::npos);
  EXPECT_NE(error_of("profile.key = nope\ninitial.boundary_height = 1\n").find("unknown profile"), std::string::npos);
  EXPECT_NE(error_of(base + "cert.type = type2\ncert.c1 = 1\n").find("cert.c2"), std::string::npos);
  EXPECT_NE(error_of(base + "cert.type = type1\ncert.sigma = 1\ncert.c1 = 1\ncert.c2 = 1\ncert.z_check_max = 1\n")
                .find("certificate"),
            std::string::npos);
  EXPECT_THROW(ScenarioConfig::parse("no equals sign\n"), ConfigError);
  EXPECT_EQ(error_of(base), "");
}

TEST(ScenarioConfig, ExplicitCertificates) {
  const auto sc = ScenarioConfig::parse(
                      "profile.key = cone\ninitial.boundary_height = 1\ncert.type = type1\ncert.sigma = 0\n"
                      "cert.c1 = 1\ncert.c2 = 1\ncert.z_check_max = 2\n")
                      .resolve();
  ASSERT_TRUE(std::holds_alternative<Type1Certificate>(sc.certificate));
  const auto none =
      ScenarioConfig::parse("profile.key = cone\ninitial.boundary_height = 1\ncert.type = none\n").resolve();
  EXPECT_TRUE(std::holds_alternative<std::monostate>(none.certificate));
}

TEST(ScenarioConfig, TextRoundTrip) {
  const auto a = ScenarioConfig::parse("profile.key = cone\nprofile.c = 2\ninitial.boundary_height = 1\n");
  const auto b = ScenarioConfig::parse(a.to_text());
  EXPECT_EQ(a.to_text(), b.to_text());
}

TEST(ScenarioConfig, ShippedScenariosResolve) {
  for (const auto& e : std::filesystem::directory_iterator(PINCHFLOW_SCENARIO_DIR)) {
    if (e.path().extension() != ".cfg") continue;
    EXPECT_NO_THROW((void)ScenarioConfig::load(e.path().string()).resolve()) << e.path();
  }
}

TEST(SweepKey, KnownParameters) {
  EXPECT_EQ(sweep_key("k"), "profile.k");
  EXPECT_EQ(sweep_key("slope"), "profile.c");
  EXPECT_EQ(sweep_key("N"), "solver.N");
  EXPECT_THROW(sweep_key("radius"), ConfigError);
}

TEST(InitialState, PerturbationKeepsBoundary) {
  const Scenario sc =
      ScenarioConfig::parse("profile.key = cone\ninitial.boundary_height = 1.5\ninitial.perturbation = 0.2\n")
          .resolve();
  const GraphState s = initial_state(sc, make_profile(sc.profile_key, sc.profile_params));
  EXPECT_DOUBLE_EQ(s.r, 1.5);
  EXPECT_DOUBLE_EQ(s.u_boundary(), 1.5);
}
