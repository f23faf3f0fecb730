// The acceptance criteria must notice deliberately broken inputs.

#include <gtest/gtest.h>

#include "pinchflow/acceptance.hpp"

using namespace pinchflow;

namespace {

acceptance::Result only(int id, acceptance::Options opt) {
  opt.scenario_dir = PINCHFLOW_SCENARIO_DIR;
  opt.only = {id};
  const auto results = acceptance::run_all(opt);
  EXPECT_EQ(results.size(), 1u);
  return results.front();
}

}  // namespace

TEST(Mutation, CurvatureWithoutMultiplicityFailsSphereOracle) {
  acceptance::Options opt;
  opt.curvature = acceptance::curvature_without_multiplicity;
  const auto r = only(1, opt);
  EXPECT_FALSE(r.pass) << r.detail;
  EXPECT_FALSE(r.known_failure.has_value());
}

TEST(Mutation, MutantAgreesForSurfacesInR3) {
  const CurvaturePoint a = curvature_at(0.3, 0.7, -1.1, 2);
  const CurvaturePoint b = acceptance::curvature_without_multiplicity(0.3, 0.7, -1.1, 2);
  EXPECT_EQ(a.H, b.H);
  EXPECT_EQ(a.A2, b.A2);
}

TEST(Mutation, LastHalfDecadeWindowFailsSelfTest) {
  acceptance::Options opt;
  AnalysisConfig a;
  a.fit_skip_decades = 0.0;
  a.fit_span_decades = 0.5;
  opt.synthetic_analysis = a;
  const auto r = only(10, opt);
  EXPECT_FALSE(r.pass) << r.detail;
}

TEST(Mutation, UnmutatedSelfTestPasses) {
  const auto r = only(10, {});
  EXPECT_TRUE(r.pass) << r.detail;
}
