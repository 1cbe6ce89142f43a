#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "crossprob/boundaries.hpp"
#include "crossprob/engine.hpp"

namespace crossprob {

/// ECDF non-crossing probability from the binomial transition recursion
///   R(t_{i+1}, m) = sum_l R(t_i, l) P(Binomial(n - l, (t_{i+1} - t_i) / (1 - t_i)) = m - l)
/// evaluated by explicit double sums. Slow, independent of the FFT engine.
NonCrossingResult ecdf_noncrossing_binomial_recursion(const BoundaryPair& bp);

struct MonteCarloResult {
  double estimate = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  std::string generator;
};

/// True when the non-decreasing counting path with the given sorted jump
/// times satisfies bp on all of [0, 1]. Checks the order statistics directly
/// rather than going through a checkpoint schedule.
bool path_within(const BoundaryPair& bp, std::span<const double> jump_times);

/// Trials are split into fixed blocks, each with its own generator derived
/// from (seed, block index), so results do not depend on `threads`.
MonteCarloResult monte_carlo_ecdf(const BoundaryPair& bp, std::uint64_t trials, std::uint64_t seed,
                                  unsigned threads = 1);

/// Unconditional mode simulates exponential inter-arrival times at rate n;
/// conditional mode places exactly k jumps at sorted uniform times.
MonteCarloResult monte_carlo_poisson(const BoundaryPair& bp, std::optional<std::int64_t> given_count,
                                     std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

}  // namespace crossprob
