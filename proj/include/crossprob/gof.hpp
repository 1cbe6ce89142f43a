#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "crossprob/boundaries.hpp"
#include "crossprob/engine.hpp"

namespace crossprob {

enum class StatisticKind {
  ks_two_sided,
  ks_plus,
  ks_minus,
  berk_jones_two_sided,
  berk_jones_one_sided,
  higher_criticism,
};

/// A supremum-type statistic over the sorted uniforms u_(1) <= ... <= u_(n).
///
/// The statistic stays below a threshold t exactly when
///   lower_time(i, t) < u_(i) < upper_time(i, t)   for all i,
/// where upper_time inverts the increasing per-index family and lower_time
/// the decreasing one. Kolmogorov-Smirnov and Higher Criticism are maxima
/// (large values are extreme). Berk-Jones statistics are minima of
/// order-statistic tail probabilities (small values are extreme); for them
/// the threshold condition reads "statistic > t" with the same inequalities.
class StatisticSpec {
 public:
  StatisticSpec(StatisticKind kind, std::int64_t n);

  /// Accepts ks_two_sided, ks_plus, ks_minus, berk_jones_two_sided,
  /// berk_jones_one_sided, higher_criticism.
  static StatisticSpec from_name(std::string_view name, std::int64_t n);

  StatisticKind kind() const { return kind_; }
  std::int64_t n() const { return n_; }
  std::string_view name() const;

  bool bounds_from_above() const;  ///< uses the increasing family (lower crossing list)
  bool bounds_from_below() const;  ///< uses the decreasing family (upper crossing list)
  bool small_is_extreme() const;   ///< Berk-Jones

  /// Time bound u_(i) < upper_time(i, t), clipped to [0, 1]. 1-based i.
  double upper_time(std::int64_t i, double t) const;
  /// Time bound u_(i) > lower_time(i, t), clipped to [0, 1]. 1-based i.
  double lower_time(std::int64_t i, double t) const;

  /// Thresholds at which the p-value is 1 and 0 respectively (for Higher
  /// Criticism a starting bracket that critical_value widens as needed).
  std::pair<double, double> threshold_bracket() const;

 private:
  StatisticKind kind_;
  std::int64_t n_;
};

/// Statistic value of a sorted sample of probability-integral-transformed data.
double compute_statistic(const StatisticSpec& spec, std::span<const double> u_sorted);

/// Boundaries whose ECDF non-crossing probability equals P(statistic not beyond t).
BoundaryPair boundaries_from_threshold(const StatisticSpec& spec, double t);

struct PValueReport {
  double statistic_value = 0.0;
  double p_value = 0.0;
  double log_noncrossing = 0.0;
  std::int64_t n = 0;
  std::size_t lower_count = 0;
  std::size_t upper_count = 0;
  std::size_t checkpoints = 0;
  std::string method;
};

/// Exact p-value of the statistic value t under uniform i.i.d. sampling.
PValueReport pvalue(const StatisticSpec& spec, double t, const EngineOptions& options = {});

/// Threshold whose p-value equals alpha, by bisection to relative width 1e-10.
double critical_value(const StatisticSpec& spec, double alpha, const EngineOptions& options = {});

}  // namespace crossprob
