#pragma once

// Support-hypersurface profiles and checks for the hypotheses of the
// pinch-off classification results.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "pinchflow/errors.hpp"

namespace pinchflow {

/// Value and first two derivatives of a profile at one axial coordinate.
struct ProfileJet {
  double value = 0.0;
  double deriv = 0.0;
  double second_deriv = 0.0;
};

/// Open axial interval (lo, hi).
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double z) const { return z > lo && z < hi; }
};

namespace detail {

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string format_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

inline double sign(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

// Points lo..hi spaced evenly in log10, `per_decade` per decade, endpoints included.
inline std::vector<double> log_samples(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi > lo)) throw ArgumentError("log_samples: need 0 < lo < hi");
  const double decades = std::log10(hi / lo);
  const auto count = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.back() = hi;
  return out;
}

}  // namespace detail

/// Generating curve z -> omega_Sigma(z) of a rotationally symmetric support.
///
/// `value_at` is the continuous profile and is defined on the whole axis,
/// including the pinch points. The jet (derivatives) is only available on the
/// smooth domain, a union of open intervals.
class ProfileCurve {
 public:
  using ValueFn = std::function<double(double)>;
  using JetFn = std::function<ProfileJet(double)>;

  ProfileCurve(std::string label, ValueFn value, JetFn jet, std::vector<double> pinch_points,
               std::vector<Interval> smooth_domain)
      : label_(std::move(label)),
        value_(std::move(value)),
        jet_(std::move(jet)),
        pinch_points_(std::move(pinch_points)),
        smooth_domain_(std::move(smooth_domain)) {
    for (double w : pinch_points_) {
      const double v = value_(w);
      if (!(std::abs(v) <= 1e-12)) {
        throw ArgumentError("profile " + label_ + ": value at pinch point " + detail::format_double(w) +
                            " is " + detail::format_double(v) + ", not 0");
      }
    }
  }

  const std::string& label() const { return label_; }
  const std::vector<double>& pinch_points() const { return pinch_points_; }
  const std::vector<Interval>& smooth_domain() const { return smooth_domain_; }

  bool in_domain(double z) const {
    return std::any_of(smooth_domain_.begin(), smooth_domain_.end(),
                       [z](const Interval& iv) { return iv.contains(z); });
  }

  double value_at(double z) const { return value_(z); }

  ProfileJet jet(double z) const {
    if (!in_domain(z)) {
      throw DomainError("profile " + label_ + ": z = " + detail::format_double(z) +
                        " is outside the smooth domain");
    }
    return jet_(z);
  }

  double deriv_at(double z) const { return jet(z).deriv; }
  double second_deriv_at(double z) const { return jet(z).second_deriv; }

 private:
  std::string label_;
  ValueFn value_;
  JetFn jet_;
  std::vector<double> pinch_points_;
  std::vector<Interval> smooth_domain_;
};

/// Closed-form (value, slope, second derivative) at z; throws DomainError
/// outside the smooth domain.
inline ProfileJet eval_profile(const ProfileCurve& profile, double z) { return profile.jet(z); }

// ---------------------------------------------------------------------------
// Built-in families

namespace profiles {

inline std::vector<Interval> punctured_line() {
  return {Interval{-std::numeric_limits<double>::infinity(), 0.0},
          Interval{0.0, std::numeric_limits<double>::infinity()}};
}

inline std::vector<Interval> whole_line() { return {Interval{}}; }

/// omega(z) = c |z|.
inline ProfileCurve cone(double c = 1.0) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("cone: slope c must be positive and finite");
  return ProfileCurve(
      "cone(c=" + detail::format_short(c) + ")", [c](double z) { return c * std::abs(z); },
      [c](double z) { return ProfileJet{c * std::abs(z), c * detail::sign(z), 0.0}; }, {0.0},
      punctured_line());
}

/// omega(z) = |z|^a.
inline ProfileCurve power(double a = 2.0) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("power: exponent a must be positive and finite");
  return ProfileCurve(
      "power(a=" + detail::format_short(a) + ")", [a](double z) { return std::pow(std::abs(z), a); },
      [a](double z) {
        const double x = std::abs(z);
        return ProfileJet{std::pow(x, a), a * detail::sign(z) * std::pow(x, a - 1.0),
                          a * (a - 1.0) * std::pow(x, a - 2.0)};
      },
      {0.0}, punctured_line());
}

/// omega(z) = exp(-1/|z|^k), extended evenly to z < 0.
inline ProfileCurve expinv(double k = 1.0) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ArgumentError("expinv: k must be positive and finite");
  return ProfileCurve(
      "expinv(k=" + detail::format_short(k) + ")",
      [k](double z) { return z == 0.0 ? 0.0 : std::exp(-std::pow(std::abs(z), -k)); },
      [k](double z) {
        const double x = std::abs(z);
        const double xk = std::pow(x, -k);  // |z|^-k
        const double w = std::exp(-xk);
        const double ratio = k * xk / x;  // |omega'/omega| = k |z|^{-k-1}
        return ProfileJet{w, detail::sign(z) * ratio * w, w * (ratio * ratio - (k + 1.0) * ratio / x)};
      },
      {0.0}, punctured_line());
}

/// omega(z) = (z-2)^2 (z+2)^2, smooth everywhere with two pinch points.
inline ProfileCurve polypinch() {
  return ProfileCurve(
      "polypinch()",
      [](double z) {
        const double q = z * z - 4.0;
        return q * q;
      },
      [](double z) {
        const double q = z * z - 4.0;
        return ProfileJet{q * q, 4.0 * z * q, 12.0 * z * z - 16.0};
      },
      {-2.0, 2.0}, whole_line());
}

/// omega(z) = exp(-z).
inline ProfileCurve expdecay() {
  return ProfileCurve(
      "expdecay()", [](double z) { return std::exp(-z); },
      [](double z) {
        const double w = std::exp(-z);
        return ProfileJet{w, -w, w};
      },
      {}, whole_line());
}

/// Monotone C^2 mollification of 2 - z (z <= 0.9) and 1/z (z >= 1.1),
/// blended on [0.9, 1.1] with the quintic smoothstep weight.
inline ProfileCurve recip_mollified() {
  constexpr double lo = 0.9;
  constexpr double hi = 1.1;
  auto jet = [](double z) -> ProfileJet {
    if (z <= lo) return ProfileJet{2.0 - z, -1.0, 0.0};
    if (z >= hi) return ProfileJet{1.0 / z, -1.0 / (z * z), 2.0 / (z * z * z)};
    const double width = hi - lo;
    const double s = (z - lo) / width;
    const double S = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    const double dS = 30.0 * s * s * (1.0 - s) * (1.0 - s) / width;
    const double d2S = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (width * width);
    const double f1 = 2.0 - z, df1 = -1.0;
    const double f2 = 1.0 / z, df2 = -1.0 / (z * z), d2f2 = 2.0 / (z * z * z);
    return ProfileJet{(1.0 - S) * f1 + S * f2, (1.0 - S) * df1 + S * df2 + dS * (f2 - f1),
                      S * d2f2 + 2.0 * dS * (df2 - df1) + d2S * (f2 - f1)};
  };
  return ProfileCurve(
      "recip_mollified()", [jet](double z) { return jet(z).value; }, jet, {}, whole_line());
}

/// omega(z) = radius (a straight cylinder).
inline ProfileCurve cylinder(double radius = 1.0) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ArgumentError("cylinder: radius must be positive");
  return ProfileCurve(
      "cylinder(radius=" + detail::format_short(radius) + ")", [radius](double) { return radius; },
      [radius](double) { return ProfileJet{radius, 0.0, 0.0}; }, {}, whole_line());
}

}  // namespace profiles

// ---------------------------------------------------------------------------
// Certificates

/// Constants for the Type 2 lower-bound hypothesis
/// C1/z^delta <= |omega'/omega| <= C2/z^alpha, |omega'| <= C3 near z = 0.
struct Type2Certificate {
  double c1, c2, c3, alpha, delta, z_check_max;
  std::string profile_label;

  Type2Certificate(double c1_, double c2_, double c3_, double alpha_, double delta_, double z_check_max_,
                   std::string label = {})
      : c1(c1_), c2(c2_), c3(c3_), alpha(alpha_), delta(delta_), z_check_max(z_check_max_),
        profile_label(std::move(label)) {
    // C1 == C2 is admitted: the exp(-1/z^k) family attains both bounds exactly.
    if (!(c1 > 0.0 && c2 >= c1 && std::isfinite(c2))) throw ArgumentError("Type2Certificate: need 0 < C1 <= C2 < inf");
    if (!(c3 > 0.0 && std::isfinite(c3))) throw ArgumentError("Type2Certificate: need 0 < C3 < inf");
    if (!(alpha > 0.0 && delta > 0.0 && std::isfinite(alpha) && std::isfinite(delta)))
      throw ArgumentError("Type2Certificate: alpha and delta must be positive");
    if (!(2.0 * delta / (alpha + 1.0) > 1.0)) throw ArgumentError("Type2Certificate: need 2 delta/(alpha+1) > 1");
    if (!(z_check_max > 0.0)) throw ArgumentError("Type2Certificate: z_check_max must be positive");
  }

  /// Exponent of the guaranteed curvature blow-up rate, 2 delta / (alpha + 1).
  double predicted_exponent() const { return 2.0 * delta / (alpha + 1.0); }

  std::string describe() const {
    return "type2(C1=" + detail::format_double(c1) + ",C2=" + detail::format_double(c2) +
           ",C3=" + detail::format_double(c3) + ",alpha=" + detail::format_double(alpha) +
           ",delta=" + detail::format_double(delta) + ",z_check_max=" + detail::format_double(z_check_max) + ")";
  }
};

/// Constants for the polynomial pinch-off hypothesis
/// C1 omega^sigma <= |omega'| <= C2 omega^sigma near the pinch point.
struct Type1Certificate {
  double sigma, c1, c2, z_check_max;
  std::string profile_label;

  Type1Certificate(double sigma_, double c1_, double c2_, double z_check_max_, std::string label = {})
      : sigma(sigma_), c1(c1_), c2(c2_), z_check_max(z_check_max_), profile_label(std::move(label)) {
    if (!(sigma < 1.0)) throw ArgumentError("Type1Certificate: need sigma < 1");
    if (!(c1 > 0.0 && c2 >= c1 && std::isfinite(c2))) throw ArgumentError("Type1Certificate: need 0 < C1 <= C2 < inf");
    if (!(z_check_max > 0.0)) throw ArgumentError("Type1Certificate: z_check_max must be positive");
  }

  std::string describe() const {
    return "type1(sigma=" + detail::format_double(sigma) + ",C1=" + detail::format_double(c1) +
           ",C2=" + detail::format_double(c2) + ",z_check_max=" + detail::format_double(z_check_max) + ")";
  }
};

/// Constants for the infinite-time hypothesis |omega'| <= C omega^{1+sigma} on the tail.
struct Type0Certificate {
  double sigma, c, z_check_min;
  std::string profile_label;

  Type0Certificate(double sigma_, double c_, double z_check_min_, std::string label = {})
      : sigma(sigma_), c(c_), z_check_min(z_check_min_), profile_label(std::move(label)) {
    if (!(sigma > 0.0)) throw ArgumentError("Type0Certificate: need sigma > 0");
    if (!(c > 0.0)) throw ArgumentError("Type0Certificate: need C > 0");
    if (!(z_check_min > 0.0)) throw ArgumentError("Type0Certificate: z_check_min must be positive");
  }

  std::string describe() const {
    return "type0(sigma=" + detail::format_double(sigma) + ",C=" + detail::format_double(c) +
           ",z_check_min=" + detail::format_double(z_check_min) + ")";
  }
};

using Certificate = std::variant<std::monostate, Type0Certificate, Type1Certificate, Type2Certificate>;

inline std::string describe(const Certificate& cert) {
  return std::visit(
      [](const auto& c) -> std::string {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, std::monostate>) {
          return "none";
        } else {
          return c.describe();
        }
      },
      cert);
}

// ---------------------------------------------------------------------------
// Checks

/// Outcome of a sampled condition check.
struct Verdict {
  bool pass = false;
  std::size_t samples = 0;
  double extreme = 0.0;  // check-specific sampled extreme (e.g. min of z omega')
  std::optional<double> witness_z;
  std::optional<double> witness_value;
  std::string detail;
};

constexpr int kSamplesPerDecade = 512;

/// Sampled infimum of <nu_Sigma, e_1> = 1/sqrt(1 + omega'^2) over [z_lo, z_hi].
///
/// Samples are uniform; every sampled local maximum of |omega'| is then refined
/// with Brent's method so the returned floor is the true local extremum.
/// Endpoints or samples sitting on a non-smooth point are replaced by one-sided
/// limits just inside the smooth domain.
inline double graph_floor(const ProfileCurve& profile, double z_lo, double z_hi, std::size_t samples = 4096) {
  if (!(z_lo < z_hi)) throw ArgumentError("graph_floor: need z_lo < z_hi");
  if (samples < 2) throw ArgumentError("graph_floor: need at least 2 samples");
  const double nudge = 1e-9 * (z_hi - z_lo);

  auto slope = [&](double z) -> std::optional<double> {
    if (profile.in_domain(z)) return std::abs(profile.deriv_at(z));
    return std::nullopt;
  };

  std::vector<double> zs;
  std::vector<double> slopes;
  auto record = [&](double z) {
    auto s = slope(z);
    if (!s) return;
    if (!std::isfinite(*s) || *s > 1e150) {
      throw SamplingError("graph condition violated: unbounded slope at z = " + detail::format_double(z));
    }
    zs.push_back(z);
    slopes.push_back(*s);
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const double z = z_lo + (z_hi - z_lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    if (profile.in_domain(z)) {
      record(z);
    } else {
      if (z - nudge >= z_lo) record(z - nudge);
      if (z + nudge <= z_hi) record(z + nudge);
    }
  }
  if (zs.empty()) throw SamplingError("graph_floor: interval has no smooth points");

  double max_slope = *std::max_element(slopes.begin(), slopes.end());
  for (std::size_t i = 1; i + 1 < zs.size(); ++i) {
    if (slopes[i] >= slopes[i - 1] && slopes[i] >= slopes[i + 1] && slopes[i] > 0.0) {
      double a = zs[i - 1];
      double b = zs[i + 1];
      // Stay inside one smooth interval.
      bool ok = true;
      for (double w : profile.pinch_points()) {
        if (w > a && w < b) ok = false;
      }
      if (!ok) continue;
      auto neg = [&](double z) { return profile.in_domain(z) ? -std::abs(profile.deriv_at(z)) : 0.0; };
      auto best = boost::math::tools::brent_find_minima(neg, a, b, 50);
      max_slope = std::max(max_slope, -best.second);
    }
  }
  return 1.0 / std::sqrt(1.0 + max_slope * max_slope);
}

/// Checks z omega'(z) > 0 away from the single pinch point at 0, sampled
/// log-spaced on both sides out to 100x compact_set_bound.
namespace detail {

// Smallest z in [lo, hi] (bisection in log z) at which the profile is still a
// normal double comfortably above underflow.
inline double representable_floor(const ProfileCurve& profile, double lo, double hi) {
  constexpr double kTiny = 1e-280;
  if (profile.value_at(lo) >= kTiny) return lo;
  if (profile.value_at(hi) < kTiny) return hi;
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if (profile.value_at(std::exp(m)) >= kTiny) b = m; else a = m;
  }
  return std::exp(b);
}

}  // namespace detail

inline Verdict check_pinching_cylinder(const ProfileCurve& profile, double compact_set_bound) {
  if (!(compact_set_bound > 0.0)) throw ArgumentError("check_pinching_cylinder: compact_set_bound must be positive");
  const auto& pinch = profile.pinch_points();
  Verdict v;
  if (pinch.empty()) {
    v.pass = false;
    v.detail = "no pinch point";
    return v;
  }
  if (pinch.size() != 1) {
    throw UnsupportedConfiguration("check_pinching_cylinder: profile " + profile.label() + " has " +
                                   std::to_string(pinch.size()) + " pinch points; exactly one is supported");
  }
  if (pinch.front() != 0.0) {
    throw UnsupportedConfiguration("check_pinching_cylinder: pinch point must sit at z = 0");
  }
  const auto grid = detail::log_samples(compact_set_bound * 1e-6, compact_set_bound * 1e2, kSamplesPerDecade);
  v.extreme = std::numeric_limits<double>::infinity();
  // Samples where omega underflows carry no sign information and are skipped.
  const double floor = detail::representable_floor(profile, grid.front(), grid.back());
  for (double side : {1.0, -1.0}) {
    for (double x : grid) {
      if (x < floor) continue;
      const double z = side * x;
      const double val = z * profile.deriv_at(z);
      ++v.samples;
      if (val < v.extreme) v.extreme = val;
      if (!(val > 0.0) && !v.witness_z) {
        v.witness_z = z;
        v.witness_value = val;
      }
    }
  }
  v.pass = !v.witness_z.has_value();
  v.detail = v.pass ? "z*omega' > 0 on all samples" : "z*omega' <= 0 at witness";
  return v;
}

namespace detail {

constexpr double kCheckRelTol = 1e-12;

inline void require_pinching(const ProfileCurve& profile, double bound, const char* who) {
  const Verdict pc = check_pinching_cylinder(profile, bound);
  if (!pc.pass) {
    throw ArgumentError(std::string(who) + ": profile " + profile.label() + " is not a pinching cylinder (" +
                        pc.detail + ")");
  }
}

}  // namespace detail

/// Samples the Type 2 hypothesis on a log grid descending from z_check_max over
/// `decades` decades (clipped where omega underflows).
inline Verdict verify_type2(const ProfileCurve& profile, const Type2Certificate& cert, double decades = 3.0) {
  detail::require_pinching(profile, cert.z_check_max, "verify_type2");
  const double lo = detail::representable_floor(profile, cert.z_check_max * std::pow(10.0, -decades), cert.z_check_max);
  if (!(lo < cert.z_check_max)) throw SamplingError("verify_type2: profile underflows on the whole check interval");
  auto grid = detail::log_samples(lo, cert.z_check_max, kSamplesPerDecade);
  std::reverse(grid.begin(), grid.end());
  Verdict v;
  v.extreme = std::numeric_limits<double>::infinity();
  for (double z : grid) {
    const ProfileJet j = profile.jet(z);
    if (j.value == 0.0) throw SamplingError("verify_type2: omega vanishes at sample z = " + detail::format_double(z));
    const double ratio = std::abs(j.deriv / j.value);
    const double lower = cert.c1 * std::pow(z, -cert.delta);
    const double upper = cert.c2 * std::pow(z, -cert.alpha);
    ++v.samples;
    v.extreme = std::min(v.extreme, ratio * std::pow(z, cert.delta));
    const bool ok = ratio >= lower * (1.0 - detail::kCheckRelTol) && ratio <= upper * (1.0 + detail::kCheckRelTol) &&
                    std::abs(j.deriv) <= cert.c3 * (1.0 + detail::kCheckRelTol);
    if (!ok && !v.witness_z) {
      v.witness_z = z;
      v.witness_value = ratio;
      v.detail = ratio < lower * (1.0 - detail::kCheckRelTol)   ? "ratio below C1/z^delta"
                 : ratio > upper * (1.0 + detail::kCheckRelTol) ? "ratio above C2/z^alpha"
                                                                : "slope above C3";
    }
  }
  v.pass = !v.witness_z.has_value();
  if (v.pass) v.detail = "all samples satisfy the Type 2 bounds";
  return v;
}

/// Two-sided sampled check of C1 omega^sigma <= |omega'| <= C2 omega^sigma.
inline Verdict verify_type1(const ProfileCurve& profile, const Type1Certificate& cert, double decades = 6.0) {
  detail::require_pinching(profile, cert.z_check_max, "verify_type1");
  const double lo = detail::representable_floor(profile, cert.z_check_max * std::pow(10.0, -decades), cert.z_check_max);
  auto grid = detail::log_samples(lo, cert.z_check_max, kSamplesPerDecade);
  std::reverse(grid.begin(), grid.end());
  Verdict v;
  v.extreme = std::numeric_limits<double>::infinity();
  // Samples where omega underflows carry no sign information and are skipped.
  const double floor = detail::representable_floor(profile, grid.front(), grid.back());
  for (double side : {1.0, -1.0}) {
    for (double x : grid) {
      if (x < floor) continue;
      const double z = side * x;
      const ProfileJet j = profile.jet(z);
      if (j.value == 0.0) throw SamplingError("verify_type1: omega vanishes at sample z = " + detail::format_double(z));
      const double scale = std::pow(j.value, cert.sigma);
      const double slope = std::abs(j.deriv);
      ++v.samples;
      v.extreme = std::min(v.extreme, slope / scale);
      const bool ok = slope >= cert.c1 * scale * (1.0 - detail::kCheckRelTol) &&
                      slope <= cert.c2 * scale * (1.0 + detail::kCheckRelTol);
      if (!ok && !v.witness_z) {
        v.witness_z = z;
        v.witness_value = slope / scale;
        v.detail = "|omega'|/omega^sigma outside [C1, C2]";
      }
    }
  }
  v.pass = !v.witness_z.has_value();
  if (v.pass) v.detail = "all samples satisfy the polynomial pinch-off bounds";
  return v;
}

/// Sampled check of |omega'| <= C omega^{1+sigma} on [z_check_min, 1000 z_check_min].
inline Verdict verify_type0(const ProfileCurve& profile, const Type0Certificate& cert) {
  const auto grid = detail::log_samples(cert.z_check_min, cert.z_check_min * 1e3, kSamplesPerDecade);
  Verdict v;
  v.extreme = 0.0;
  for (double z : grid) {
    const ProfileJet j = profile.jet(z);
    const double bound = cert.c * std::pow(std::abs(j.value), 1.0 + cert.sigma);
    const double slope = std::abs(j.deriv);
    ++v.samples;
    if (bound > 0.0) v.extreme = std::max(v.extreme, slope / bound);
    if (!(slope <= bound * (1.0 + detail::kCheckRelTol)) && !v.witness_z) {
      v.witness_z = z;
      v.witness_value = slope;
      v.detail = "|omega'| exceeds C omega^(1+sigma)";
    }
  }
  v.pass = !v.witness_z.has_value();
  if (v.pass) v.detail = "all samples satisfy the decay bound";
  return v;
}

// ---------------------------------------------------------------------------
// Registry

struct ProfileParam {
  std::string name;
  double default_value;
};

struct ProfileInfo {
  std::string key;
  std::vector<ProfileParam> params;
  std::string description;
  std::string default_certificate;
};

inline const std::vector<ProfileInfo>& profile_registry() {
  static const std::vector<ProfileInfo> registry = {
      {"cone", {{"c", 1.0}}, "c|z|, conical pinch-off", "type1(sigma=0, C1=C2=c)"},
      {"power", {{"a", 2.0}}, "|z|^a, polynomial pinch-off", "type1(sigma=1-1/a, C1=C2=a) for a>1"},
      {"expinv", {{"k", 1.0}}, "exp(-1/|z|^k), flat pinch-off", "type2(alpha=delta=k+1, C1=C2=k, C3=sup slope)"},
      {"polypinch", {}, "(z-2)^2(z+2)^2, two smooth pinch points", "none"},
      {"expdecay", {}, "exp(-z), decaying tail", "none (fails every sigma>0 decay certificate)"},
      {"recip_mollified", {}, "C^2 blend of 2-z and 1/z on [0.9,1.1]", "type0(sigma=1, C=1, z_check_min=1.1)"},
      {"cylinder", {{"radius", 1.0}}, "constant radius", "none"},
  };
  return registry;
}

inline const ProfileInfo& profile_info(const std::string& key) {
  for (const auto& info : profile_registry()) {
    if (info.key == key) return info;
  }
  throw ArgumentError("unknown profile key '" + key + "'");
}

inline double param_or(const std::map<std::string, double>& params, const std::string& name, double fallback) {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

/// Builds a registered profile; unknown parameter names are rejected.
inline ProfileCurve make_profile(const std::string& key, const std::map<std::string, double>& params = {}) {
  const ProfileInfo& info = profile_info(key);
  for (const auto& [name, value] : params) {
    const bool known = std::any_of(info.params.begin(), info.params.end(),
                                   [&](const ProfileParam& p) { return p.name == name; });
    if (!known) throw ArgumentError("profile '" + key + "' has no parameter '" + name + "'");
  }
  auto get = [&](const std::string& name) {
    for (const auto& p : info.params) {
      if (p.name == name) return param_or(params, name, p.default_value);
    }
    throw ArgumentError("internal: missing parameter " + name);
  };
  if (key == "cone") return profiles::cone(get("c"));
  if (key == "power") return profiles::power(get("a"));
  if (key == "expinv") return profiles::expinv(get("k"));
  if (key == "polypinch") return profiles::polypinch();
  if (key == "expdecay") return profiles::expdecay();
  if (key == "recip_mollified") return profiles::recip_mollified();
  return profiles::cylinder(get("radius"));
}

/// Supremum of |omega'| for exp(-1/z^k), attained at z^-k = (k+1)/k.
inline double expinv_sup_slope(double k) {
  const double w = (k + 1.0) / k;
  return k * std::pow(w, w) * std::exp(-w);
}

/// Certificate the registry advertises for a profile, if any.
inline Certificate default_certificate(const std::string& key, const std::map<std::string, double>& params = {}) {
  const ProfileCurve profile = make_profile(key, params);
  if (key == "cone") {
    const double c = param_or(params, "c", 1.0);
    return Type1Certificate(0.0, c, c, 1.0, profile.label());
  }
  if (key == "power") {
    const double a = param_or(params, "a", 2.0);
    if (a > 1.0 || a < 1.0) return Type1Certificate(1.0 - 1.0 / a, a, a, 1.0, profile.label());
    return Type1Certificate(0.0, 1.0, 1.0, 1.0, profile.label());
  }
  if (key == "expinv") {
    const double k = param_or(params, "k", 1.0);
    return Type2Certificate(k, k, expinv_sup_slope(k), k + 1.0, k + 1.0, 1.0, profile.label());
  }
  if (key == "recip_mollified") return Type0Certificate(1.0, 1.0, 1.1, profile.label());
  return std::monostate{};
}

}  // namespace pinchflow
