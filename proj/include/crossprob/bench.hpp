#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crossprob/boundaries.hpp"
#include "crossprob/engine.hpp"

namespace crossprob {

struct TimingResult {
  double median_ms = 0.0;
  std::vector<double> samples_ms;
  double probability = 0.0;
  double log_probability = 0.0;
  std::size_t checkpoints = 0;
};

/// Wall-clock median of `repeats` ECDF evaluations after one untimed warm-up.
TimingResult time_method(const BoundaryPair& bp, const EngineOptions& options, int repeats = 3);

struct ScalingFit {
  std::vector<std::pair<double, double>> points;  ///< (n, median wall time)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log(time) on log(n).
ScalingFit fit_scaling(std::vector<std::pair<double, double>> points);

struct BenchRow {
  std::int64_t n = 0;
  std::string method;
  double wall_time_ms = 0.0;
  double probability = 0.0;
  double log_probability = 0.0;
  std::size_t checkpoints = 0;
};

struct BenchConfig {
  std::vector<std::int64_t> ns;
  std::string statistic = "ks_two_sided";
  double alpha = 0.05;
  std::vector<Method> methods{Method::fft, Method::direct};
  bool force_full = true;
  int repeats = 3;
  /// Largest relative disagreement tolerated between methods.
  double agreement = 1e-8;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<std::pair<std::string, ScalingFit>> fits;  ///< one per method, when >= 3 sizes
};

/// Calibrates each n at `alpha`, times every method on the resulting
/// boundaries and fits scaling exponents. Throws NumericalFailure when the
/// methods disagree.
BenchReport run_scaling_suite(const BenchConfig& config);

std::string method_name(Method m, bool force_full);

/// `n,method,wall_time_ms,probability,checkpoints` plus one line per row.
std::string format_bench_csv(const BenchReport& report);

}  // namespace crossprob
