#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pinchflow/profiles.hpp"

using namespace pinchflow;

namespace {

// Values below were computed independently with mpmath at 30 digits.
constexpr double kExpinv1SupSlope = 0.54134113294645076758;  // 4 e^-2 at z = 1/2
constexpr double kExpinv1Floor = 0.87941182968548947123;
constexpr double kExpinv2SupSlope = 0.81983255788372007678;  // 2 (3/2)^(3/2) e^(-3/2)
constexpr double kExpinv2Floor = 0.77333127642210391863;
constexpr double kInvE = 0.36787944117144232160;

}  // namespace

TEST(Profiles, ConeJet) {
  const auto j = profiles::cone(1.0).jet(2.0);
  EXPECT_DOUBLE_EQ(j.value, 2.0);
  EXPECT_DOUBLE_EQ(j.deriv, 1.0);
  EXPECT_DOUBLE_EQ(j.second_deriv, 0.0);
}

TEST(Profiles, ExpinvJetAtOne) {
  const auto j = profiles::expinv(1.0).jet(1.0);
  EXPECT_NEAR(j.value, kInvE, 1e-15);
  EXPECT_NEAR(j.deriv, kInvE, 1e-15);
  EXPECT_NEAR(j.second_deriv, -kInvE, 1e-15);
}

TEST(Profiles, PolypinchJetAtPinch) {
  const auto j = profiles::polypinch().jet(2.0);
  EXPECT_EQ(j.value, 0.0);
  EXPECT_EQ(j.deriv, 0.0);
  EXPECT_EQ(j.second_deriv, 32.0);
}

TEST(Profiles, RecipMollifiedMatchesBothPiecesAndMidpoint) {
  const auto p = profiles::recip_mollified();
  EXPECT_DOUBLE_EQ(p.value_at(0.5), 1.5);
  EXPECT_DOUBLE_EQ(p.value_at(2.0), 0.5);
  const auto mid = p.jet(1.0);  // both pieces equal 1 with slope -1 at z = 1
  EXPECT_NEAR(mid.value, 1.0, 1e-15);
  EXPECT_NEAR(mid.deriv, -1.0, 1e-14);
  EXPECT_NEAR(mid.second_deriv, 1.0, 1e-12);
  for (double z = 0.85; z < 1.15; z += 1e-3) EXPECT_LT(p.deriv_at(z), 0.0) << z;
}

TEST(Profiles, OutsideSmoothDomainThrows) {
  EXPECT_THROW(profiles::cone(1.0).jet(0.0), DomainError);
  EXPECT_THROW(profiles::expinv(1.0).jet(0.0), DomainError);
}

TEST(Profiles, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  const std::vector<std::pair<ProfileCurve, std::pair<double, double>>> cases = {
      {profiles::cone(1.5), {0.05, 5.0}},        {profiles::power(2.5), {0.05, 5.0}},
      {profiles::expinv(1.0), {0.1, 5.0}},       {profiles::expinv(2.0), {0.2, 5.0}},
      {profiles::polypinch(), {-5.0, 5.0}},      {profiles::expdecay(), {-3.0, 10.0}},
      {profiles::recip_mollified(), {0.1, 5.0}}, {profiles::cylinder(2.0), {-5.0, 5.0}},
  };
  for (const auto& [p, range] : cases) {
    std::uniform_real_distribution<double> U(range.first, range.second);
    for (int i = 0; i < 100; ++i) {
      const double z = U(rng);
      if (std::abs(z) < 1e-3) continue;
      const double h = 1e-6 * std::max(1.0, std::abs(z));
      const double d = (p.value_at(z + h) - p.value_at(z - h)) / (2 * h);
      const double j = p.deriv_at(z);
      EXPECT_NEAR(j, d, 1e-6 * (1 + std::abs(j))) << p.label() << " z=" << z;
      const double h2 = 1e-4 * std::max(1.0, std::abs(z));
      const double d2 = (p.deriv_at(z + h2) - p.deriv_at(z - h2)) / (2 * h2);
      const double j2 = p.second_deriv_at(z);
      EXPECT_NEAR(j2, d2, 1e-4 * (1 + std::abs(j2))) << p.label() << " z=" << z;
    }
  }
}

TEST(GraphFloor, FrozenValues) {
  EXPECT_NEAR(graph_floor(profiles::cone(1.0), 0.1, 10.0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(graph_floor(profiles::cylinder(1.0), -3.0, 3.0), 1.0);
  EXPECT_NEAR(graph_floor(profiles::expinv(1.0), 0.0, 10.0), kExpinv1Floor, 1e-10);
  EXPECT_NEAR(graph_floor(profiles::expinv(2.0), 0.0, 10.0), kExpinv2Floor, 1e-10);
  EXPECT_NEAR(expinv_sup_slope(1.0), kExpinv1SupSlope, 1e-10);
  EXPECT_NEAR(expinv_sup_slope(2.0), kExpinv2SupSlope, 1e-10);
}

TEST(GraphFloor, MonotoneInInterval) {
  const auto p = profiles::expinv(1.0);
  double prev = 1.0;
  for (double hi : {0.2, 0.4, 0.6, 1.0, 3.0, 10.0}) {
    const double c = graph_floor(p, 0.1, hi);
    EXPECT_LE(c, prev + 1e-15) << hi;
    EXPECT_LE(c, 1.0);
    prev = c;
  }
}

TEST(GraphFloor, RejectsBadInterval) {
  EXPECT_THROW(graph_floor(profiles::cone(1.0), 1.0, 0.5), ArgumentError);
  EXPECT_THROW(graph_floor(profiles::cone(1.0), 0.5, 1.0, 1), ArgumentError);
}

TEST(PinchingCylinder, Verdicts) {
  EXPECT_TRUE(check_pinching_cylinder(profiles::cone(1.0), 5.0).pass);
  EXPECT_TRUE(check_pinching_cylinder(profiles::expinv(1.0), 5.0).pass);
  const ProfileCurve bump("1+z^2", [](double z) { return 1 + z * z; },
                          [](double z) { return ProfileJet{1 + z * z, 2 * z, 2.0}; }, {}, profiles::whole_line());
  const Verdict none = check_pinching_cylinder(bump, 5.0);
  EXPECT_FALSE(none.pass);
  EXPECT_EQ(none.detail, "no pinch point");
  EXPECT_THROW(check_pinching_cylinder(profiles::polypinch(), 5.0), UnsupportedConfiguration);
}

TEST(Certificates, InvariantsEnforced) {
  EXPECT_THROW(Type2Certificate(1, 1, 1, 1, 1, 1), ArgumentError);  // 2 delta/(alpha+1) = 1
  EXPECT_THROW(Type1Certificate(1.0, 1, 1, 1), ArgumentError);
  EXPECT_THROW(Type0Certificate(0.0, 1, 1), ArgumentError);
  EXPECT_NO_THROW(Type2Certificate(1, 1, 1, 2, 2, 1));
}

TEST(Certificates, Type2ExpinvFamilyPasses) {
  for (double k : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const Type2Certificate cert(k, k, expinv_sup_slope(k), k + 1, k + 1, 1.0);
    const Verdict v = verify_type2(profiles::expinv(k), cert);
    EXPECT_TRUE(v.pass) << "k=" << k << " " << v.detail;
    EXPECT_FALSE(v.witness_z.has_value());
  }
}

TEST(Certificates, Type2WrongExponentFailsNearCheckMax) {
  // ratio 1/z^2 against C2/z^2.9: the upper bound fails once z > 1.
  const Type2Certificate cert(1, 1, 1, 2.9, 2, 2.0);
  const Verdict v = verify_type2(profiles::expinv(1.0), cert);
  EXPECT_FALSE(v.pass);
  ASSERT_TRUE(v.witness_z.has_value());
  EXPECT_GT(*v.witness_z, 1.0);
}

TEST(Certificates, Type1) {
  EXPECT_TRUE(verify_type1(profiles::power(3.0), Type1Certificate(1 - 1.0 / 3, 3, 3, 1.0)).pass);
  EXPECT_TRUE(verify_type1(profiles::cone(2.0), Type1Certificate(0, 2, 2, 1.0)).pass);
  EXPECT_FALSE(verify_type1(profiles::cone(2.0), Type1Certificate(0, 2.5, 3, 1.0)).pass);
}

TEST(Certificates, Type0) {
  EXPECT_TRUE(verify_type0(profiles::recip_mollified(), Type0Certificate(1, 1, 1.1)).pass);
  EXPECT_FALSE(verify_type0(profiles::expdecay(), Type0Certificate(0.5, 1, 1.0)).pass);
  EXPECT_TRUE(verify_type0(profiles::recip_mollified(), Type0Certificate(1e-3, 1e6, 1.1)).pass);
}

TEST(Certificates, DefaultExpinvCertificate) {
  const Certificate c = default_certificate("expinv", {{"k", 2.0}});
  const auto* t2 = std::get_if<Type2Certificate>(&c);
  ASSERT_NE(t2, nullptr);
  EXPECT_DOUBLE_EQ(t2->predicted_exponent(), 1.5);
  EXPECT_EQ(t2->profile_label, profiles::expinv(2.0).label());
}

TEST(Registry, KeysAndErrors) {
  for (const auto& info : profile_registry()) EXPECT_NO_THROW(make_profile(info.key)) << info.key;
  EXPECT_THROW(make_profile("nope"), ArgumentError);
  EXPECT_EQ(make_profile("cone", {{"c", 2.0}}).deriv_at(1.0), 2.0);
}
