#include "crossprob/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "crossprob/error.hpp"
#include "crossprob/gof.hpp"

namespace crossprob {

TimingResult time_method(const BoundaryPair& bp, const EngineOptions& options, int repeats) {
  if (repeats < 3) throw InvalidArgument("timing needs at least 3 repeats");
  using Clock = std::chrono::steady_clock;

  NonCrossingResult r = ecdf_noncrossing(bp, options);
  TimingResult out;
  for (int i = 0; i < repeats; ++i) {
    const auto start = Clock::now();
    const NonCrossingResult again = ecdf_noncrossing(bp, options);
    const auto stop = Clock::now();
    out.samples_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    if (again.log_probability != r.log_probability) {
      throw NumericalFailure("repeated evaluation is not deterministic");
    }
  }
  std::vector<double> sorted = out.samples_ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  out.median_ms = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  out.probability = r.probability;
  out.log_probability = r.log_probability;
  out.checkpoints = r.checkpoints;
  return out;
}

ScalingFit fit_scaling(std::vector<std::pair<double, double>> points) {
  if (points.size() < 3) throw InvalidArgument("a scaling fit needs at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, t] : points) {
    if (!(n > 0.0) || !(t > 0.0) || !std::isfinite(n) || !std::isfinite(t)) {
      throw InvalidArgument("scaling points must be positive and finite");
    }
    sx += std::log(n);
    sy += std::log(t);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k;
  const double my = sy / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, t] : points) {
    const double dx = std::log(n) - mx;
    const double dy = std::log(t) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 1e-24) throw InvalidArgument("scaling fit needs distinct n values");

  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = std::move(points);
  return fit;
}

std::string method_name(Method m, bool force_full) {
  std::string s = m == Method::fft ? "fft" : "direct";
  if (force_full) s += "-full";
  return s;
}

BenchReport run_scaling_suite(const BenchConfig& config) {
  if (config.ns.empty()) throw InvalidArgument("bench needs at least one n");
  if (config.methods.empty()) throw InvalidArgument("bench needs at least one method");

  BenchReport report;
  std::vector<std::vector<std::pair<double, double>>> per_method(config.methods.size());
  for (std::int64_t n : config.ns) {
    const StatisticSpec spec = StatisticSpec::from_name(config.statistic, n);
    // Calibration runs on the band-limited default; only the timed runs use
    // the configured mode.
    const double t = critical_value(spec, config.alpha);
    const BoundaryPair bp = boundaries_from_threshold(spec, t);

    double reference = 0.0;
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      EngineOptions opts;
      opts.method = config.methods[m];
      opts.force_full = config.force_full;
      const TimingResult timing = time_method(bp, opts, config.repeats);

      if (m == 0) {
        reference = timing.log_probability;
      } else if (std::fabs(std::expm1(timing.log_probability - reference)) > config.agreement) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "methods disagree at n = " << n << ": log-probabilities " << reference << " and "
            << timing.log_probability;
        throw NumericalFailure(msg.str());
      }
      report.rows.push_back(BenchRow{n, method_name(opts.method, opts.force_full), timing.median_ms,
                                     timing.probability, timing.log_probability, timing.checkpoints});
      per_method[m].emplace_back(static_cast<double>(n), timing.median_ms);
    }
  }

  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    if (per_method[m].size() >= 3) {
      report.fits.emplace_back(method_name(config.methods[m], config.force_full),
                               fit_scaling(per_method[m]));
    }
  }
  return report;
}

std::string format_bench_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "n,method,wall_time_ms,probability,checkpoints\n";
  char buf[64];
  for (const auto& row : report.rows) {
    out << row.n << ',' << row.method << ',';
    std::snprintf(buf, sizeof buf, "%.6f", row.wall_time_ms);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", row.probability);
    out << buf << ',' << row.checkpoints << '\n';
  }
  return out.str();
}

}  // namespace crossprob
