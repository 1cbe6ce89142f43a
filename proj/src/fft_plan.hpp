#pragma once

#include <fftw3.h>

#include <cstddef>

namespace crossprob::detail {

// Forward (real -> half complex) and backward plans for one transform length.
// Plans are built once per length and shared; execution goes through the
// new-array interface, which FFTW documents as thread-safe.
struct RealFftPlan {
  std::size_t size = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

const RealFftPlan& real_fft_plan(std::size_t size);

// Per-thread scratch arrays, allocated with fftw_malloc so their alignment
// matches the arrays the plans were created with.
struct FftWorkspace {
  double* signal_a = nullptr;
  double* signal_b = nullptr;
  fftw_complex* spectrum_a = nullptr;
  fftw_complex* spectrum_b = nullptr;
};

FftWorkspace& thread_workspace(std::size_t size);

}  // namespace crossprob::detail
