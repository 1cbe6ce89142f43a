#include "crossprob/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "crossprob/error.hpp"
#include "crossprob/special.hpp"
#include "fft_plan.hpp"

namespace crossprob {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Raw inverse-transform values below -kNegativeTolerance * (largest magnitude)
// cannot be rounding noise.
constexpr double kNegativeTolerance = 1e-10;

// FFT error is absolute relative to the largest entry of the full linear
// convolution. When the requested band only holds a small fraction of that,
// its entries would lose relative accuracy, so they are summed directly.
constexpr double kAccuracyGuard = 1e-5;

void check_finite(const ScaledProbVector& q) {
  for (double v : q.values) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("probability vector has a negative or non-finite entry");
  }
  if (std::isnan(q.log_scale) || q.log_scale == std::numeric_limits<double>::infinity()) {
    throw InvalidArgument("probability vector has a non-finite log scale");
  }
}

struct FftOutcome {
  ScaledProbVector result;
  double band_max = 0.0;
  double full_max = 0.0;
};

FftOutcome fft_convolve_impl(const ScaledProbVector& q, const PoissonKernel& kernel, IntBand out,
                             std::size_t min_transform_size) {
  FftOutcome outcome;
  outcome.result = ScaledProbVector::zero(out);
  if (out.empty() || q.values.empty() || kernel.values.empty()) return outcome;

  const auto w = static_cast<std::int64_t>(q.values.size());
  const auto klen = static_cast<std::int64_t>(kernel.values.size());
  // Linear-convolution index s corresponds to state base + s.
  const std::int64_t base = q.offset + kernel.first;
  const std::int64_t s_min = std::max<std::int64_t>(0, out.lo - base);
  const std::int64_t s_max = std::min<std::int64_t>(w + klen - 2, out.hi - base);
  if (s_min > s_max) return outcome;

  // Entries past s_max never reach the requested band.
  const std::int64_t wq = std::min(w, s_max + 1);
  const std::int64_t wk = std::min(klen, s_max + 1);
  // Circular aliasing must not fold anything onto [s_min, s_max].
  const auto needed = static_cast<std::size_t>(std::max(s_max + 1, wq + wk - 1 - s_min));
  const std::size_t size = efficient_fft_size(std::max(needed, min_transform_size));

  const auto& plan = detail::real_fft_plan(size);
  auto& ws = detail::thread_workspace(size);

  std::fill(ws.signal_a, ws.signal_a + size, 0.0);
  std::fill(ws.signal_b, ws.signal_b + size, 0.0);
  std::copy_n(q.values.begin(), wq, ws.signal_a);
  std::copy_n(kernel.values.begin(), wk, ws.signal_b);

  fftw_execute_dft_r2c(plan.forward, ws.signal_a, ws.spectrum_a);
  fftw_execute_dft_r2c(plan.forward, ws.signal_b, ws.spectrum_b);
  const std::size_t half = size / 2 + 1;
  for (std::size_t i = 0; i < half; ++i) {
    const double re = ws.spectrum_a[i][0] * ws.spectrum_b[i][0] - ws.spectrum_a[i][1] * ws.spectrum_b[i][1];
    const double im = ws.spectrum_a[i][0] * ws.spectrum_b[i][1] + ws.spectrum_a[i][1] * ws.spectrum_b[i][0];
    ws.spectrum_a[i][0] = re;
    ws.spectrum_a[i][1] = im;
  }
  fftw_execute_dft_c2r(plan.backward, ws.spectrum_a, ws.signal_a);

  const double inv = 1.0 / static_cast<double>(size);
  double full_max = 0.0;
  for (std::size_t i = 0; i < size; ++i) full_max = std::max(full_max, std::fabs(ws.signal_a[i]));
  full_max *= inv;

  auto& values = outcome.result.values;
  double band_max = 0.0;
  for (std::int64_t s = s_min; s <= s_max; ++s) {
    double v = ws.signal_a[s] * inv;
    if (v < 0.0) {
      if (v < -kNegativeTolerance * full_max) {
        std::ostringstream msg;
        msg << "FFT convolution produced " << v << " at state " << base + s << " (largest magnitude "
            << full_max << ")";
        throw NumericalFailure(msg.str());
      }
      v = 0.0;
    }
    values[base + s - out.lo] = v;
    band_max = std::max(band_max, v);
  }
  outcome.result.log_scale = q.log_scale + kernel.log_scale;
  outcome.band_max = band_max;
  outcome.full_max = full_max;
  return outcome;
}

}  // namespace

ScaledProbVector ScaledProbVector::point_mass(std::int64_t state) {
  ScaledProbVector v;
  v.offset = state;
  v.values = {1.0};
  v.log_scale = 0.0;
  return v;
}

ScaledProbVector ScaledProbVector::zero(IntBand band) {
  ScaledProbVector v;
  v.offset = band.lo;
  v.values.assign(static_cast<std::size_t>(band.width()), 0.0);
  v.log_scale = kNegInf;
  return v;
}

bool ScaledProbVector::is_zero() const {
  if (log_scale == kNegInf) return true;
  return std::none_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
}

double ScaledProbVector::log_at(std::int64_t m) const {
  if (m < offset || m >= offset + static_cast<std::int64_t>(values.size())) return kNegInf;
  const double v = values[static_cast<std::size_t>(m - offset)];
  if (v <= 0.0) return kNegInf;
  return std::log(v) + log_scale;
}

double ScaledProbVector::log_total() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  if (sum <= 0.0) return kNegInf;
  return std::log(sum) + log_scale;
}

PoissonKernel poisson_kernel(double lambda, std::int64_t length) {
  if (length < 1) throw InvalidArgument("kernel length must be positive");
  return poisson_kernel_window(lambda, 0, length - 1);
}

PoissonKernel poisson_kernel_window(double lambda, std::int64_t first, std::int64_t last) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("Poisson intensity must be finite and non-negative");
  if (first < 0 || last < first) throw InvalidArgument("invalid Poisson kernel window");

  PoissonKernel k;
  k.lambda = lambda;
  k.first = first;
  k.values.assign(static_cast<std::size_t>(last - first + 1), 0.0);
  if (lambda == 0.0) {
    if (first == 0) {
      k.values[0] = 1.0;
      k.log_scale = 0.0;
    } else {
      k.log_scale = kNegInf;
    }
    return k;
  }

  // Seed at the largest pmf value inside the window and run the ratio
  // recurrence p(j+1) / p(j) = lambda / (j + 1) outward in both directions.
  const auto mode = static_cast<std::int64_t>(std::floor(lambda));
  const std::int64_t peak = std::clamp(mode, first, last);
  k.log_scale = log_poisson_pmf(peak, lambda);
  auto& v = k.values;
  v[static_cast<std::size_t>(peak - first)] = 1.0;
  for (std::int64_t j = peak; j < last; ++j) {
    v[static_cast<std::size_t>(j + 1 - first)] = v[static_cast<std::size_t>(j - first)] * lambda / static_cast<double>(j + 1);
  }
  for (std::int64_t j = peak; j > first; --j) {
    v[static_cast<std::size_t>(j - 1 - first)] = v[static_cast<std::size_t>(j - first)] * static_cast<double>(j) / lambda;
  }
  return k;
}

PoissonKernel truncate_kernel_tail(PoissonKernel kernel, double relative_mass) {
  auto& v = kernel.values;
  if (v.empty()) return kernel;
  const auto peak = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  const double limit = relative_mass * v[peak];
  double tail = 0.0;
  std::size_t cut = v.size();
  for (std::size_t j = v.size(); j-- > peak + 1;) {
    if (tail + v[j] >= limit) break;
    tail += v[j];
    cut = j;
  }
  v.resize(cut);
  return kernel;
}

std::size_t default_fft_crossover() {
  static const std::size_t value = [] {
    if (const char* env = std::getenv("CROSSPROB_FFT_CROSSOVER")) {
      char* end = nullptr;
      const long long parsed = std::strtoll(env, &end, 10);
      if (end != env && *end == '\0' && parsed >= 0) return static_cast<std::size_t>(parsed);
    }
    return std::size_t{64};
  }();
  return value;
}

std::size_t efficient_fft_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

ScaledProbVector renormalize(ScaledProbVector q) {
  double mx = 0.0;
  for (double v : q.values) mx = std::max(mx, v);
  if (!(mx > 0.0) || q.log_scale == kNegInf) {
    std::fill(q.values.begin(), q.values.end(), 0.0);
    q.log_scale = kNegInf;
    return q;
  }
  if (mx != 1.0) {
    for (double& v : q.values) v /= mx;
    q.log_scale += std::log(mx);
  }
  return q;
}

ScaledProbVector direct_convolve(const ScaledProbVector& q, const PoissonKernel& kernel, IntBand out) {
  ScaledProbVector r = ScaledProbVector::zero(out);
  if (out.empty() || q.values.empty() || kernel.values.empty()) return r;
  const std::int64_t q_lo = q.offset;
  const std::int64_t q_hi = q.offset + static_cast<std::int64_t>(q.values.size()) - 1;
  for (std::int64_t m = out.lo; m <= out.hi; ++m) {
    const std::int64_t l_lo = std::max(q_lo, m - kernel.last());
    const std::int64_t l_hi = std::min(q_hi, m - kernel.first);
    double sum = 0.0;
    for (std::int64_t l = l_lo; l <= l_hi; ++l) {
      sum += q.values[static_cast<std::size_t>(l - q_lo)] *
             kernel.values[static_cast<std::size_t>(m - l - kernel.first)];
    }
    r.values[static_cast<std::size_t>(m - out.lo)] = sum;
  }
  r.log_scale = q.log_scale + kernel.log_scale;
  return renormalize(std::move(r));
}

ScaledProbVector fft_convolve(const ScaledProbVector& q, const PoissonKernel& kernel, IntBand out,
                              std::size_t min_transform_size) {
  return renormalize(fft_convolve_impl(q, kernel, out, min_transform_size).result);
}

ScaledProbVector truncated_convolve(const ScaledProbVector& q, const PoissonKernel& kernel, IntBand out,
                                    const ConvolutionOptions& options) {
  check_finite(q);
  for (double v : kernel.values) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("kernel has a negative or non-finite entry");
  }
  if (out.empty()) return ScaledProbVector::zero(out);
  if (out.lo < q.offset) throw InvalidArgument("output band starts below the input band");
  const std::int64_t q_hi = q.offset + static_cast<std::int64_t>(q.values.size()) - 1;
  if (kernel.first > std::max<std::int64_t>(0, out.lo - q_hi)) {
    throw InvalidArgument("kernel window starts after the smallest jump the output band needs");
  }
  if (q.is_zero()) return ScaledProbVector::zero(out);

  if (!options.force_fft && q.values.size() < options.crossover) return direct_convolve(q, kernel, out);

  // The far tail cannot register against the FFT's absolute error; the
  // direct fallbacks keep it.
  FftOutcome fft = fft_convolve_impl(q, truncate_kernel_tail(kernel), out, options.min_transform_size);
  if (!options.force_fft && fft.band_max < kAccuracyGuard * fft.full_max) {
    return direct_convolve(q, kernel, out);
  }
  return renormalize(std::move(fft.result));
}

}  // namespace crossprob
