#pragma once

// Singular time, blow-up exponent and singularity type from a trajectory.
//
// The singular time is fitted to the decay of the boundary's distance to the
// pinch point, d(t) = |u_N - z_p|, or to r when no pinch point is recorded:
// log d = q log(T - t) + c. Where the support is a cone d is proportional to r;
// for flat pinches (exp(-|z|^-k)) r is not a power of T - t but d still is.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "pinchflow/errors.hpp"
#include "pinchflow/profiles.hpp"
#include "pinchflow/solver.hpp"

namespace pinchflow {

enum class SingularityType { Type0, Type1, Type2, NoFiniteTimeSingularity };

inline const char* to_string(SingularityType t) {
  switch (t) {
    case SingularityType::Type0: return "Type0";
    case SingularityType::Type1: return "Type1";
    case SingularityType::Type2: return "Type2";
    case SingularityType::NoFiniteTimeSingularity: return "NoFiniteTimeSingularity";
  }
  return "?";
}

struct AnalysisConfig {
  double T_window_decades = 2.0;            // final decades of d used for T
  std::vector<double> T_nested = {2.0, 1.5, 1.0};
  double fit_skip_decades = 0.5;            // excluded decades of T - t nearest T
  double fit_span_decades = 2.0;
  std::size_t min_samples = 50;
  std::size_t min_fit_samples = 8;
  double type1_tolerance = 0.1;
  double type0_growth = 2.0;
  double residual_limit = 0.05;
  double type1_band = 10.0;
};

struct TEstimate {
  double T = 0.0;
  double uncertainty = 0.0;
  double q = 0.0;
  double c = 0.0;
  double rms = 0.0;
  std::string coordinate;  // "pinch_distance" or "radius"
};

struct ExponentFit {
  double p = 0.0;
  double residual = 0.0;  // RMS in log space
  double prefactor = 0.0;  // sup|A|^2 ~ prefactor (T - t)^-p
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  std::size_t count = 0;
};

struct BoundVerdict {
  std::string theorem;
  double predicted = 0.0;
  double observed = 0.0;
  bool pass = false;
  std::string detail;
};

struct SingularityReport {
  std::string profile_label;
  std::string stop_reason;
  SingularityType type = SingularityType::NoFiniteTimeSingularity;
  bool low_confidence = false;
  std::optional<TEstimate> T;
  std::optional<ExponentFit> fit;
  double C_hat1 = 0.0;  // min of (T - t) sup|A|^2 over the fit window
  double C_hat2 = 0.0;  // max of the same
  double growth_factor = 0.0;
  std::optional<double> A2_limit;
  std::vector<BoundVerdict> bound_verdicts;
  std::string note;
};

namespace detail {

inline std::vector<double> decay_coordinate(const Trajectory& traj, std::string& name) {
  std::vector<double> d(traj.samples.size());
  if (traj.pinch_height) {
    name = "pinch_distance";
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = std::abs(traj.samples[j].u_boundary - *traj.pinch_height);
  } else {
    name = "radius";
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = traj.samples[j].r;
  }
  return d;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, ssr = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - f.intercept - f.slope * x[i];
    f.ssr += e * e;
  }
  return f;
}

// T fit over the samples whose decay coordinate lies within `decades` of the
// last one. The search variable is s = log(T - t_last).
inline TEstimate fit_T_window(const Trajectory& traj, const std::vector<double>& d, double decades) {
  const auto& S = traj.samples;
  const std::size_t last = S.size() - 1;
  const double d_last = d[last];
  if (!(d_last > 0.0)) throw NoFiniteTimeSingularity("estimate_T: decay coordinate reached zero");
  std::size_t first = last;
  while (first > 0 && d[first - 1] <= d_last * std::pow(10.0, decades)) --first;
  if (last - first + 1 < 5) throw AnalysisError("estimate_T: fewer than 5 samples in the fit window");
  for (std::size_t j = first + 1; j <= last; ++j) {
    if (d[j] > d[j - 1]) throw NoFiniteTimeSingularity("estimate_T: decay coordinate not decreasing over final window");
  }
  if (!(d[first] > d_last)) throw NoFiniteTimeSingularity("estimate_T: decay coordinate constant over final window");

  std::vector<double> lag(last - first + 1), y(last - first + 1), x(last - first + 1);
  for (std::size_t j = first; j <= last; ++j) {
    lag[j - first] = S[last].t - S[j].t;
    y[j - first] = std::log(d[j]);
  }
  auto ssr_at = [&](double s) {
    const double delta = std::exp(s);
    for (std::size_t i = 0; i < lag.size(); ++i) x[i] = std::log(lag[i] + delta);
    return least_squares(x, y).ssr;
  };
  const double span = lag.front();
  const double s_lo = std::log(std::max(span * 1e-12, std::numeric_limits<double>::min() * 1e10));
  const double s_hi = std::log(span * 1e3);
  const int grid = 240;
  double best_s = s_lo, best = std::numeric_limits<double>::infinity();
  std::vector<double> vals(grid + 1);
  for (int g = 0; g <= grid; ++g) {
    const double s = s_lo + (s_hi - s_lo) * g / grid;
    vals[g] = ssr_at(s);
    if (vals[g] < best) {
      best = vals[g];
      best_s = s;
    }
  }
  const double step = (s_hi - s_lo) / grid;
  const double a = std::max(s_lo, best_s - step), b = std::min(s_hi, best_s + step);
  const auto m = boost::math::tools::brent_find_minima(ssr_at, a, b, 52);
  const double s_opt = m.second < best ? m.first : best_s;
  const double delta = std::exp(s_opt);
  for (std::size_t i = 0; i < lag.size(); ++i) x[i] = std::log(lag[i] + delta);
  const LineFit lf = least_squares(x, y);
  TEstimate e;
  e.T = S[last].t + delta;
  e.q = lf.slope;
  e.c = lf.intercept;
  e.rms = std::sqrt(lf.ssr / static_cast<double>(lag.size()));
  if (!(e.q > 0.0)) throw NoFiniteTimeSingularity("estimate_T: fitted decay exponent is not positive");
  return e;
}

}  // namespace detail

/// Singular time with uncertainty = half the spread over the nested windows.
inline TEstimate estimate_T(const Trajectory& traj, const AnalysisConfig& cfg = {}) {
  if (traj.samples.size() < cfg.min_samples) {
    throw AnalysisError("estimate_T: need at least " + std::to_string(cfg.min_samples) + " samples");
  }
  std::string name;
  const std::vector<double> d = detail::decay_coordinate(traj, name);
  TEstimate main = detail::fit_T_window(traj, d, cfg.T_window_decades);
  main.coordinate = name;
  double lo = main.T, hi = main.T;
  for (double w : cfg.T_nested) {
    const TEstimate e = detail::fit_T_window(traj, d, w);
    lo = std::min(lo, e.T);
    hi = std::max(hi, e.T);
  }
  main.uncertainty = 0.5 * (hi - lo);
  return main;
}

/// OLS of log sup|A|^2 against -log(T - t) over
/// T - t in [tau_last 10^skip, tau_last 10^(skip+span)].
inline ExponentFit fit_exponent(const Trajectory& traj, double T_est, const AnalysisConfig& cfg = {}) {
  const auto& S = traj.samples;
  if (S.empty()) throw AnalysisError("fit_exponent: empty trajectory");
  const double tau_last = T_est - S.back().t;
  if (!(tau_last > 0.0)) throw AnalysisError("fit_exponent: T_est must exceed the last sample time");
  const double tau_lo = tau_last * std::pow(10.0, cfg.fit_skip_decades);
  const double tau_hi = tau_lo * std::pow(10.0, cfg.fit_span_decades);
  const double tau_first = T_est - S.front().t;
  if (tau_first < tau_hi) {
    throw AnalysisError("fit_exponent: trajectory spans " +
                        detail::format_short(std::log10(tau_first / tau_last)) + " decades of T - t; need " +
                        detail::format_short(cfg.fit_skip_decades + cfg.fit_span_decades) +
                        ", run deeper into the singularity");
  }
  std::vector<double> x, y;
  for (const auto& s : S) {
    const double tau = (S.back().t - s.t) + tau_last;
    if (tau >= tau_lo && tau <= tau_hi && s.sup_A2 > 0.0) {
      x.push_back(-std::log(tau));
      y.push_back(std::log(s.sup_A2));
    }
  }
  if (x.size() < cfg.min_fit_samples) {
    throw AnalysisError("fit_exponent: only " + std::to_string(x.size()) + " samples in the fit window");
  }
  const detail::LineFit lf = detail::least_squares(x, y);
  ExponentFit f;
  f.p = lf.slope;
  f.residual = std::sqrt(lf.ssr / static_cast<double>(x.size()));
  f.prefactor = std::exp(lf.intercept);
  f.tau_lo = tau_lo;
  f.tau_hi = tau_hi;
  f.count = x.size();
  return f;
}

/// sup|A|^2 at stop exceeds 10x its initial value and still increases over
/// the final decade of the decay coordinate.
struct NotType0Verdict {
  bool pass = false;
  double growth = 0.0;
  double trend = 0.0;  // slope of log sup|A|^2 against log d over the final decade
  std::string detail;
};

inline NotType0Verdict not_type0_check(const Trajectory& traj) {
  NotType0Verdict v;
  const auto& S = traj.samples;
  if (S.size() < 3 || !(S.front().sup_A2 > 0.0)) {
    v.detail = "too few samples or zero initial curvature";
    return v;
  }
  v.growth = S.back().sup_A2 / S.front().sup_A2;
  std::string name;
  const std::vector<double> d = detail::decay_coordinate(traj, name);
  const std::size_t last = S.size() - 1;
  std::size_t first = last;
  while (first > 0 && d[first - 1] <= 10.0 * d[last]) --first;
  std::vector<double> x, y;
  for (std::size_t j = first; j <= last; ++j) {
    if (d[j] > 0.0 && S[j].sup_A2 > 0.0) {
      x.push_back(std::log(d[j]));
      y.push_back(std::log(S[j].sup_A2));
    }
  }
  const bool decade = first > 0 && first < last;  // the run extends past the final decade
  if (x.size() >= 3) v.trend = detail::least_squares(x, y).slope;
  const bool increasing = decade && x.size() >= 3 && v.trend < 0.0 && S.back().sup_A2 > S[first].sup_A2;
  v.pass = v.growth > 10.0 && increasing;
  v.detail = "growth " + detail::format_short(v.growth) + (decade ? "" : ", final decade not reached") +
             (increasing ? ", increasing" : ", not increasing") + " over final decade of " + name;
  return v;
}

namespace detail {

inline void tau_A2_band(const Trajectory& traj, double T, const ExponentFit& fit, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = 0.0;
  const auto& S = traj.samples;
  const double tau_last = T - S.back().t;
  for (const auto& s : S) {
    const double tau = (S.back().t - s.t) + tau_last;
    if (tau >= fit.tau_lo && tau <= fit.tau_hi) {
      lo = std::min(lo, tau * s.sup_A2);
      hi = std::max(hi, tau * s.sup_A2);
    }
  }
}

}  // namespace detail

/// Full classification. Analysis errors (too shallow a run) propagate.
inline SingularityReport classify(const Trajectory& traj, const AnalysisConfig& cfg = {}) {
  SingularityReport rep;
  rep.profile_label = traj.profile_label;
  rep.stop_reason = to_string(traj.stop_reason);
  if (traj.samples.empty()) throw AnalysisError("classify: empty trajectory");

  auto no_singularity = [&](const std::string& why) {
    rep.type = SingularityType::NoFiniteTimeSingularity;
    rep.A2_limit = traj.samples.back().sup_A2;
    const auto& S = traj.samples;
    const double t_half = 0.5 * (S.front().t + S.back().t);
    auto it = std::find_if(S.begin(), S.end(), [&](const TrajectorySample& s) { return s.t >= t_half; });
    rep.growth_factor = (it != S.end() && it->sup_A2 > 0.0) ? S.back().sup_A2 / it->sup_A2 : 1.0;
    rep.note = why;
    return rep;
  };
  if (traj.stop_reason == StopReason::Horizon) return no_singularity("run reached its time horizon");
  try {
    rep.T = estimate_T(traj, cfg);
  } catch (const NoFiniteTimeSingularity& e) {
    return no_singularity(e.what());
  }

  rep.fit = fit_exponent(traj, rep.T->T, cfg);
  const ExponentFit& f = *rep.fit;
  detail::tau_A2_band(traj, rep.T->T, f, rep.C_hat1, rep.C_hat2);
  const auto& S = traj.samples;
  const double tau_last = rep.T->T - S.back().t;
  double a2_start = S.back().sup_A2;
  for (const auto& s : S) {
    if ((S.back().t - s.t) + tau_last <= f.tau_hi) {
      a2_start = s.sup_A2;
      break;
    }
  }
  rep.growth_factor = S.back().sup_A2 / a2_start;
  rep.low_confidence = f.residual > cfg.residual_limit;
  if (rep.growth_factor < cfg.type0_growth) {
    rep.type = SingularityType::Type0;
    rep.A2_limit = S.back().sup_A2;
  } else if (f.p > 1.0 + cfg.type1_tolerance) {
    rep.type = SingularityType::Type2;
  } else {
    rep.type = SingularityType::Type1;
    if (f.p < 1.0 - cfg.type1_tolerance) rep.note = "exponent below the Type 1 rate";
  }
  return rep;
}

/// Theorem-specific bound checks. A certificate carrying a profile label must
/// match the trajectory's profile.
inline BoundVerdict check_bounds(const SingularityReport& rep, const Trajectory& traj, const Certificate& cert,
                                 const AnalysisConfig& cfg = {}) {
  auto check_label = [&](const std::string& label) {
    if (!label.empty() && label != traj.profile_label) {
      throw ArgumentError("check_bounds: certificate for '" + label + "' applied to trajectory of '" +
                          traj.profile_label + "'");
    }
  };
  BoundVerdict v;
  if (const auto* c2 = std::get_if<Type2Certificate>(&cert)) {
    check_label(c2->profile_label);
    v.theorem = "type2_lower_bound";
    v.predicted = c2->predicted_exponent();
    if (!rep.fit) {
      v.detail = "no exponent fit";
      return v;
    }
    v.observed = rep.fit->p;
    v.pass = v.observed >= v.predicted - 0.1;
    v.detail = "p_fit " + detail::format_short(v.observed) + " vs 2delta/(alpha+1) - 0.1 = " +
               detail::format_short(v.predicted - 0.1);
  } else if (const auto* c1 = std::get_if<Type1Certificate>(&cert)) {
    check_label(c1->profile_label);
    v.theorem = "type1_band";
    v.predicted = cfg.type1_band;
    if (!rep.fit || !rep.T) {
      v.detail = "no exponent fit";
      return v;
    }
    double lo = 0.0, hi = 0.0;
    detail::tau_A2_band(traj, rep.T->T, *rep.fit, lo, hi);
    v.observed = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    v.pass = v.observed <= cfg.type1_band;
    v.detail = "(T-t) sup|A|^2 in [" + detail::format_short(lo) + ", " + detail::format_short(hi) + "]";
  } else if (const auto* c0 = std::get_if<Type0Certificate>(&cert)) {
    check_label(c0->profile_label);
    v.theorem = "type0_infinite_time";
    v.predicted = std::numeric_limits<double>::infinity();
    v.observed = rep.T ? rep.T->T : std::numeric_limits<double>::infinity();
    v.pass = rep.type == SingularityType::NoFiniteTimeSingularity;
    v.detail = std::string("classified ") + to_string(rep.type);
  } else {
    v.theorem = "none";
    v.pass = true;
    v.detail = "no certificate";
  }
  return v;
}

}  // namespace pinchflow
