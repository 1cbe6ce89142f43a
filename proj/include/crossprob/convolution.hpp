#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crossprob/boundaries.hpp"

namespace crossprob {

/// Non-negative probability vector over a contiguous range of integer states,
/// stored with a natural-log scale factor: P(state m) = values[m - offset] * exp(log_scale).
///
/// After renormalize() the largest entry is 1, or every entry is 0 and
/// log_scale is -inf (the vector carries exactly zero probability).
struct ScaledProbVector {
  std::int64_t offset = 0;
  std::vector<double> values;
  double log_scale = 0.0;

  static ScaledProbVector point_mass(std::int64_t state);
  static ScaledProbVector zero(IntBand band);

  bool is_zero() const;
  IntBand band() const {
    return IntBand{offset, offset + static_cast<std::int64_t>(values.size()) - 1};
  }
  /// log P(state m), -inf outside the stored range.
  double log_at(std::int64_t m) const;
  /// log of the total stored mass.
  double log_total() const;
};

/// Poisson(lambda) point masses for jump counts first .. first + values.size() - 1,
/// stored as values[j] * exp(log_scale).
struct PoissonKernel {
  double lambda = 0.0;
  std::int64_t first = 0;
  std::vector<double> values;
  double log_scale = 0.0;

  std::int64_t last() const { return first + static_cast<std::int64_t>(values.size()) - 1; }
};

/// Kernel for jump counts 0 .. length - 1.
PoissonKernel poisson_kernel(double lambda, std::int64_t length);

/// Kernel for jump counts first .. last. Entries are scaled so the largest
/// one inside the window is 1, which keeps far-from-mode windows representable.
PoissonKernel poisson_kernel_window(double lambda, std::int64_t first, std::int64_t last);

/// Drops trailing entries past the mode once their total falls below
/// `relative_mass` times the kernel's largest entry.
PoissonKernel truncate_kernel_tail(PoissonKernel kernel, double relative_mass = 1e-17);

struct ConvolutionOptions {
  /// Direct summation is used when the input band is narrower than this.
  std::size_t crossover = 64;
  /// Always take the FFT path (no crossover, no accuracy fallback).
  bool force_fft = false;
  /// Lower bound on the transform length (full-length formulation).
  std::size_t min_transform_size = 0;
};

/// Band width below which truncated_convolve sums directly. Reads
/// CROSSPROB_FFT_CROSSOVER once; defaults to 64.
std::size_t default_fft_crossover();

/// Smallest integer >= n of the form 2^a 3^b 5^c 7^d.
std::size_t efficient_fft_size(std::size_t n);

/// r[m] = sum_l q[l] kernel[m - l] for m in out_band, renormalized.
/// Uses a zero-padded real FFT for wide inputs and an exact double loop for
/// narrow ones. Throws InvalidArgument on inconsistent bands or non-finite
/// input and NumericalFailure on significantly negative FFT output.
ScaledProbVector truncated_convolve(const ScaledProbVector& q, const PoissonKernel& kernel,
                                    IntBand out_band, const ConvolutionOptions& options = {});

/// Exact double-loop evaluation of the same quantity.
ScaledProbVector direct_convolve(const ScaledProbVector& q, const PoissonKernel& kernel, IntBand out_band);

/// FFT evaluation of the same quantity, without the direct-sum fallbacks.
ScaledProbVector fft_convolve(const ScaledProbVector& q, const PoissonKernel& kernel, IntBand out_band,
                              std::size_t min_transform_size = 0);

/// Divides by the maximum entry and folds it into log_scale. All-zero input
/// comes back all-zero with log_scale = -inf.
ScaledProbVector renormalize(ScaledProbVector q);

}  // namespace crossprob
