#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crossprob/boundaries.hpp"
#include "crossprob/convolution.hpp"

namespace crossprob {

enum class Method { fft, direct };

struct EngineOptions {
  Method method = Method::fft;
  /// Carry the full state range 0..ceiling at every step instead of the
  /// admissible band: full-length transforms for `fft`, all-pairs sums for
  /// `direct`. Same result, worst-case cost.
  bool force_full = false;
  std::size_t fft_crossover = default_fft_crossover();
};

/// Q(1, m) for m in the terminal band, plus bookkeeping for benchmarks.
struct PropagationResult {
  ScaledProbVector final_vector;
  std::size_t steps = 0;
  /// Transform length (fft) or multiply-add count (direct) per step.
  std::vector<std::size_t> work_profile;

  /// log Q(1, k); -inf outside the terminal band.
  double log_prob_terminal(std::int64_t k) const { return final_vector.log_at(k); }
  double log_total() const { return final_vector.log_total(); }
};

/// Propagates the point mass at state 0 through the schedule for a Poisson
/// process of the given intensity, zeroing states outside each band. States
/// above `state_ceiling` are dropped.
PropagationResult propagate(double intensity, const CheckpointSchedule& schedule, std::int64_t state_ceiling,
                            const EngineOptions& options = {});

struct NonCrossingResult {
  double probability = 0.0;
  double log_probability = 0.0;
  std::size_t checkpoints = 0;
  std::size_t steps = 0;
};

/// Largest state tracked for a Poisson process of intensity n when states up
/// to `needed` matter. Mass above it is below exp(-800) relative.
std::int64_t poisson_state_ceiling(std::int64_t n, std::int64_t needed);

/// P(path stays within bp on [0, 1] | xi(1) = k) for a Poisson process of intensity bp.n.
NonCrossingResult poisson_noncrossing_conditional(const BoundaryPair& bp, std::int64_t k,
                                                  const EngineOptions& options = {});

/// P(path stays within bp on [0, 1]) for a Poisson process of intensity bp.n.
NonCrossingResult poisson_noncrossing_unconditional(const BoundaryPair& bp, const EngineOptions& options = {});

/// P(path of n * F_n stays within bp on [0, 1]) for the empirical CDF of
/// bp.n i.i.d. uniforms, via the Poisson process conditioned on xi(1) = n.
NonCrossingResult ecdf_noncrossing(const BoundaryPair& bp, const EngineOptions& options = {});

}  // namespace crossprob
