#include "crossprob/gof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crossprob/error.hpp"
#include "crossprob/special.hpp"

namespace crossprob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clip01(double x) {
  if (std::isnan(x)) throw NumericalFailure("threshold inversion produced NaN");
  return std::clamp(x, 0.0, 1.0);
}

// Solves sqrt(n) (p - u) / sqrt(u (1 - u)) = t for u in [0, 1].
double higher_criticism_inverse(std::int64_t i, std::int64_t n, double t) {
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(i) / nn;
  const double t2 = t * t;
  const double disc = std::sqrt(t2 * (4.0 * nn * p * (1.0 - p) + t2));
  // The root on the side of p matching the sign of t.
  const double u = t >= 0.0 ? (2.0 * nn * p + t2 - disc) / (2.0 * (nn + t2))
                            : (2.0 * nn * p + t2 + disc) / (2.0 * (nn + t2));
  return u;
}

}  // namespace

StatisticSpec::StatisticSpec(StatisticKind kind, std::int64_t n) : kind_(kind), n_(n) {
  if (n < 1) throw InvalidArgument("statistic needs n >= 1");
}

StatisticSpec StatisticSpec::from_name(std::string_view name, std::int64_t n) {
  static constexpr std::pair<std::string_view, StatisticKind> kNames[] = {
      {"ks_two_sided", StatisticKind::ks_two_sided},
      {"ks_plus", StatisticKind::ks_plus},
      {"ks_minus", StatisticKind::ks_minus},
      {"berk_jones_two_sided", StatisticKind::berk_jones_two_sided},
      {"berk_jones_one_sided", StatisticKind::berk_jones_one_sided},
      {"higher_criticism", StatisticKind::higher_criticism},
  };
  for (const auto& [key, kind] : kNames) {
    if (key == name) return StatisticSpec(kind, n);
  }
  throw InvalidArgument("unknown statistic '" + std::string(name) + "'");
}

std::string_view StatisticSpec::name() const {
  switch (kind_) {
    case StatisticKind::ks_two_sided: return "ks_two_sided";
    case StatisticKind::ks_plus: return "ks_plus";
    case StatisticKind::ks_minus: return "ks_minus";
    case StatisticKind::berk_jones_two_sided: return "berk_jones_two_sided";
    case StatisticKind::berk_jones_one_sided: return "berk_jones_one_sided";
    case StatisticKind::higher_criticism: return "higher_criticism";
  }
  return "unknown";
}

bool StatisticSpec::bounds_from_above() const {
  return kind_ == StatisticKind::ks_two_sided || kind_ == StatisticKind::ks_minus ||
         kind_ == StatisticKind::berk_jones_two_sided;
}

bool StatisticSpec::bounds_from_below() const { return kind_ != StatisticKind::ks_minus; }

bool StatisticSpec::small_is_extreme() const {
  return kind_ == StatisticKind::berk_jones_two_sided || kind_ == StatisticKind::berk_jones_one_sided;
}

double StatisticSpec::upper_time(std::int64_t i, double t) const {
  const double nn = static_cast<double>(n_);
  switch (kind_) {
    case StatisticKind::ks_two_sided:
    case StatisticKind::ks_minus:
      return clip01(static_cast<double>(i - 1) / nn + t / std::sqrt(nn));
    case StatisticKind::berk_jones_two_sided:
      // P(Beta(i, n-i+1) > x) = t, written through the mirrored distribution.
      return clip01(1.0 - beta_quantile(t, static_cast<double>(n_ - i + 1), static_cast<double>(i)));
    default:
      return 1.0;
  }
}

double StatisticSpec::lower_time(std::int64_t i, double t) const {
  const double nn = static_cast<double>(n_);
  switch (kind_) {
    case StatisticKind::ks_two_sided:
    case StatisticKind::ks_plus:
      return clip01(static_cast<double>(i) / nn - t / std::sqrt(nn));
    case StatisticKind::berk_jones_two_sided:
    case StatisticKind::berk_jones_one_sided:
      return clip01(beta_quantile(t, static_cast<double>(i), static_cast<double>(n_ - i + 1)));
    case StatisticKind::higher_criticism:
      return clip01(higher_criticism_inverse(i, n_, t));
    default:
      return 0.0;
  }
}

std::pair<double, double> StatisticSpec::threshold_bracket() const {
  switch (kind_) {
    case StatisticKind::ks_two_sided:
    case StatisticKind::ks_plus:
    case StatisticKind::ks_minus:
      return {0.0, std::sqrt(static_cast<double>(n_))};
    case StatisticKind::berk_jones_two_sided:
      return {0.0, 0.5};
    case StatisticKind::berk_jones_one_sided:
      return {0.0, 1.0};
    case StatisticKind::higher_criticism:
      return {-1.0, 1.0};
  }
  return {0.0, 1.0};
}

double compute_statistic(const StatisticSpec& spec, std::span<const double> u) {
  const std::int64_t n = spec.n();
  if (static_cast<std::int64_t>(u.size()) != n) {
    std::ostringstream msg;
    msg << "expected " << n << " samples, got " << u.size();
    throw InvalidArgument(msg.str());
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0 && u[i] <= 1.0)) throw InvalidArgument("samples must lie in [0, 1]");
    if (i > 0 && u[i] < u[i - 1]) throw InvalidArgument("samples must be sorted");
  }

  const double nn = static_cast<double>(n);
  const double root_n = std::sqrt(nn);
  double k_minus = -kInf;
  double k_plus = -kInf;
  double bj_lower = kInf;  // min_i P(Beta_i <= u_(i))
  double bj_upper = kInf;  // min_i P(Beta_i >= u_(i))
  double hc = -kInf;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double ui = u[static_cast<std::size_t>(i - 1)];
    const double ii = static_cast<double>(i);
    switch (spec.kind()) {
      case StatisticKind::ks_two_sided:
      case StatisticKind::ks_plus:
      case StatisticKind::ks_minus:
        k_minus = std::max(k_minus, root_n * (ui - (ii - 1.0) / nn));
        k_plus = std::max(k_plus, root_n * (ii / nn - ui));
        break;
      case StatisticKind::berk_jones_two_sided:
      case StatisticKind::berk_jones_one_sided:
        bj_lower = std::min(bj_lower, regularized_incomplete_beta(ui, ii, nn - ii + 1.0));
        bj_upper = std::min(bj_upper, regularized_incomplete_beta_complement(ui, ii, nn - ii + 1.0));
        break;
      case StatisticKind::higher_criticism: {
        double v = 0.0;
        if (ui <= 0.0) {
          v = kInf;
        } else if (ui >= 1.0) {
          v = i == n ? 0.0 : -kInf;
        } else {
          v = root_n * (ii / nn - ui) / std::sqrt(ui * (1.0 - ui));
        }
        hc = std::max(hc, v);
        break;
      }
    }
  }

  switch (spec.kind()) {
    case StatisticKind::ks_two_sided: return std::max(k_minus, k_plus);
    case StatisticKind::ks_plus: return k_plus;
    case StatisticKind::ks_minus: return k_minus;
    case StatisticKind::berk_jones_two_sided: return std::min(bj_lower, bj_upper);
    case StatisticKind::berk_jones_one_sided: return bj_lower;
    case StatisticKind::higher_criticism: return hc;
  }
  return 0.0;
}

BoundaryPair boundaries_from_threshold(const StatisticSpec& spec, double t) {
  if (std::isnan(t)) throw InvalidArgument("threshold is NaN");
  BoundaryPair bp;
  bp.n = spec.n();
  if (spec.bounds_from_above()) {
    bp.lower_crossings.reserve(static_cast<std::size_t>(spec.n()));
    for (std::int64_t i = 1; i <= spec.n(); ++i) bp.lower_crossings.push_back(spec.upper_time(i, t));
    std::sort(bp.lower_crossings.begin(), bp.lower_crossings.end());
  }
  if (spec.bounds_from_below()) {
    bp.upper_initial_cap = 0;
    bp.upper_crossings.reserve(static_cast<std::size_t>(spec.n()));
    for (std::int64_t i = 1; i <= spec.n(); ++i) bp.upper_crossings.push_back(spec.lower_time(i, t));
    std::sort(bp.upper_crossings.begin(), bp.upper_crossings.end());
  } else {
    bp.upper_initial_cap = kUnboundedCap;
  }
  return bp;
}

PValueReport pvalue(const StatisticSpec& spec, double t, const EngineOptions& options) {
  const BoundaryPair bp = boundaries_from_threshold(spec, t);
  const NonCrossingResult r = ecdf_noncrossing(bp, options);

  PValueReport report;
  report.statistic_value = t;
  report.log_noncrossing = r.log_probability;
  report.p_value = std::clamp(-std::expm1(r.log_probability), 0.0, 1.0);
  report.n = spec.n();
  report.lower_count = bp.lower_crossings.size();
  report.upper_count = bp.upper_crossings.size();
  report.checkpoints = r.checkpoints;
  report.method = options.method == Method::fft ? "fft" : "direct";
  if (options.force_full) report.method += "-full";
  return report;
}

double critical_value(const StatisticSpec& spec, double alpha, const EngineOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");

  constexpr double kRelWidth = 1e-10;
  constexpr double kMonotoneSlack = 1e-9;
  constexpr int kMaxWiden = 64;
  constexpr int kMaxBisect = 200;

  const bool ascending = spec.small_is_extreme();  // p-value increases with t
  auto p_at = [&](double t) { return pvalue(spec, t, options).p_value; };
  // True when t lies on the non-rejecting side of the critical value.
  auto below_critical = [&](double p) { return ascending ? p < alpha : p > alpha; };

  auto [lo, hi] = spec.threshold_bracket();
  double p_lo = p_at(lo);
  double p_hi = p_at(hi);
  for (int i = 0; i < kMaxWiden && !below_critical(p_lo); ++i) {
    const double width = hi - lo;
    lo -= 2.0 * width;
    p_lo = p_at(lo);
  }
  for (int i = 0; i < kMaxWiden && below_critical(p_hi); ++i) {
    const double width = hi - lo;
    hi += 2.0 * width;
    p_hi = p_at(hi);
  }
  if (!below_critical(p_lo) || below_critical(p_hi)) {
    throw NumericalFailure("could not bracket the critical value");
  }

  for (int iter = 0; iter < kMaxBisect; ++iter) {
    if (hi - lo <= kRelWidth * std::max(std::fabs(lo), std::fabs(hi))) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double pm = p_at(mid);
    const double low_env = std::min(p_lo, p_hi) - kMonotoneSlack;
    const double high_env = std::max(p_lo, p_hi) + kMonotoneSlack;
    if (pm < low_env || pm > high_env) {
      std::ostringstream msg;
      msg << "p-value is not monotone in the threshold near t = " << mid;
      throw NumericalFailure(msg.str());
    }
    if (pm == alpha) return mid;
    if (below_critical(pm)) {
      lo = mid;
      p_lo = pm;
    } else {
      hi = mid;
      p_hi = pm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace crossprob
