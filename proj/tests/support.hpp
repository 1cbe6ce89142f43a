#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "crossprob/boundaries.hpp"

namespace testsupport {

inline double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

// Relative difference of probabilities given by their logs; exact zeros
// (log = -inf) must match exactly.
inline double log_rel_diff(double log_a, double log_b) {
  if (log_a == log_b) return 0.0;
  if (std::isinf(log_a) || std::isinf(log_b)) return std::numeric_limits<double>::infinity();
  return std::fabs(std::expm1(log_a - log_b));
}

enum class Sides { both, lower_only, upper_only };

// A Kolmogorov-Smirnov-like band around the diagonal with random widths and
// jittered crossing times, so that non-crossing probabilities are neither 0
// nor 1 for most draws.
inline crossprob::BoundaryPair random_band(std::mt19937_64& rng, std::int64_t n, Sides sides = Sides::both) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double root_n = std::sqrt(static_cast<double>(n));
  const double d_lower = (0.4 + 1.6 * unit(rng)) / root_n;
  const double d_upper = (0.4 + 1.6 * unit(rng)) / root_n;
  const double jitter = 0.8 / static_cast<double>(n);

  crossprob::BoundaryPair bp;
  bp.n = n;
  if (sides != Sides::upper_only) {
    const std::int64_t a = n - static_cast<std::int64_t>(unit(rng) * 0.2 * static_cast<double>(n));
    for (std::int64_t i = 1; i <= a; ++i) {
      const double t = static_cast<double>(i - 1) / n + d_lower + jitter * (unit(rng) - 0.5);
      bp.lower_crossings.push_back(std::clamp(t, 0.0, 1.0));
    }
    std::sort(bp.lower_crossings.begin(), bp.lower_crossings.end());
  }
  if (sides != Sides::lower_only) {
    bp.upper_initial_cap = static_cast<std::int64_t>(unit(rng) * 3.0);
    for (std::int64_t j = 1; j <= n; ++j) {
      const double t = static_cast<double>(j) / n - d_upper + jitter * (unit(rng) - 0.5);
      bp.upper_crossings.push_back(std::clamp(t, 0.0, 1.0));
    }
    std::sort(bp.upper_crossings.begin(), bp.upper_crossings.end());
  }
  return bp;
}

inline Sides random_sides(std::mt19937_64& rng) {
  const auto r = rng() % 5;
  if (r == 3) return Sides::lower_only;
  if (r == 4) return Sides::upper_only;
  return Sides::both;
}

}  // namespace testsupport
