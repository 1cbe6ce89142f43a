#include "crossprob/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crossprob/error.hpp"
#include "crossprob/special.hpp"

namespace crossprob {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kExcessTolerance = 1e-9;

IntBand clip(IntBand b, std::int64_t ceiling) {
  return IntBand{std::max<std::int64_t>(b.lo, 0), std::min(b.hi, ceiling)};
}

// Drops exact zeros at both ends; the band-limited path never needs them.
ScaledProbVector trim(ScaledProbVector q) {
  const auto first = std::find_if(q.values.begin(), q.values.end(), [](double v) { return v > 0.0; });
  if (first == q.values.end()) return ScaledProbVector::zero(IntBand{q.offset, q.offset - 1});
  const auto last = std::find_if(q.values.rbegin(), q.values.rend(), [](double v) { return v > 0.0; }).base();
  q.offset += first - q.values.begin();
  q.values.erase(last, q.values.end());
  q.values.erase(q.values.begin(), first);
  return q;
}

ScaledProbVector restrict_to(const ScaledProbVector& q, IntBand band) {
  const IntBand stored = q.band();
  const IntBand keep{std::max(stored.lo, band.lo), std::min(stored.hi, band.hi)};
  if (keep.empty()) return ScaledProbVector::zero(IntBand{band.lo, band.lo - 1});
  ScaledProbVector r;
  r.offset = keep.lo;
  r.values.assign(q.values.begin() + (keep.lo - stored.lo), q.values.begin() + (keep.hi - stored.lo + 1));
  r.log_scale = q.log_scale;
  return renormalize(std::move(r));
}

void mask_outside(ScaledProbVector& q, IntBand band) {
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    const std::int64_t m = q.offset + static_cast<std::int64_t>(i);
    if (!band.contains(m)) q.values[i] = 0.0;
  }
}

PropagationResult zero_result(PropagationResult r, IntBand band) {
  r.final_vector = ScaledProbVector::zero(band.empty() ? IntBand{0, -1} : band);
  return r;
}

// One step of the band-limited recursion: states move from q to `band`.
ScaledProbVector banded_step(const ScaledProbVector& q, double lambda, IntBand band, const EngineOptions& options,
                             std::size_t& work) {
  if (lambda == 0.0) {
    work = q.values.size();
    return restrict_to(q, band);
  }
  const std::int64_t q_hi = q.offset + static_cast<std::int64_t>(q.values.size()) - 1;
  const IntBand out{std::max(band.lo, q.offset), band.hi};
  if (out.empty()) return ScaledProbVector::zero(IntBand{band.lo, band.lo - 1});

  const std::int64_t jump_lo = std::max<std::int64_t>(0, out.lo - q_hi);
  const std::int64_t jump_hi = out.hi - q.offset;
  const PoissonKernel kernel = poisson_kernel_window(lambda, jump_lo, jump_hi);

  if (options.method == Method::direct) {
    work = q.values.size() * kernel.values.size();
    return direct_convolve(q, kernel, out);
  }
  work = q.values.size() + kernel.values.size();
  ConvolutionOptions conv;
  conv.crossover = options.fft_crossover;
  return truncated_convolve(q, kernel, out, conv);
}

// One step of the full-range recursion over states 0..ceiling.
ScaledProbVector full_step(const ScaledProbVector& q, double lambda, IntBand band, std::int64_t ceiling,
                           const EngineOptions& options, std::size_t& work) {
  const IntBand all{0, ceiling};
  ScaledProbVector r;
  if (lambda == 0.0) {
    r = q;
    work = q.values.size();
  } else {
    if (options.method == Method::direct) {
      const PoissonKernel kernel = poisson_kernel_window(lambda, 0, ceiling);
      work = q.values.size() * kernel.values.size() / 2;
      r = direct_convolve(q, kernel, all);
    } else {
      // Beyond lambda + 12 sqrt(lambda) + 40 the pmf is below 1e-30 of its
      // peak. The transform still spans every state regardless of the band.
      const auto reach = static_cast<std::int64_t>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 40.0));
      const PoissonKernel kernel = truncate_kernel_tail(poisson_kernel_window(lambda, 0, std::min(ceiling, reach)));
      ConvolutionOptions conv;
      conv.force_fft = true;
      conv.min_transform_size = static_cast<std::size_t>(ceiling + 1) + kernel.values.size() - 1;
      work = efficient_fft_size(conv.min_transform_size);
      r = truncated_convolve(q, kernel, all, conv);
    }
  }
  mask_outside(r, band);
  return renormalize(std::move(r));
}

double checked_probability_log(double log_p) {
  if (std::isnan(log_p)) throw NumericalFailure("probability evaluated to NaN");
  if (log_p > std::log1p(kExcessTolerance)) {
    std::ostringstream msg;
    msg << "probability exceeds one: exp(" << log_p << ")";
    throw NumericalFailure(msg.str());
  }
  return std::min(log_p, 0.0);
}

NonCrossingResult make_result(double log_p, const CheckpointSchedule& s, const PropagationResult& r) {
  NonCrossingResult out;
  out.log_probability = checked_probability_log(log_p);
  out.probability = std::exp(out.log_probability);
  out.checkpoints = s.size();
  out.steps = r.steps;
  return out;
}

}  // namespace

PropagationResult propagate(double intensity, const CheckpointSchedule& schedule, std::int64_t state_ceiling,
                            const EngineOptions& options) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw InvalidArgument("intensity must be positive and finite");
  if (state_ceiling < 0) throw InvalidArgument("state ceiling must be non-negative");
  if (schedule.times.size() != schedule.bands.size() || schedule.times.empty()) {
    throw InvalidArgument("schedule must have one band per checkpoint and at least one checkpoint");
  }
  if (schedule.times.back() != 1.0) throw InvalidArgument("schedule must end at time 1");

  PropagationResult result;
  if (!schedule.initial.contains(0)) return zero_result(std::move(result), IntBand{0, -1});

  ScaledProbVector q = ScaledProbVector::point_mass(0);
  if (options.force_full) {
    q = ScaledProbVector::zero(IntBand{0, state_ceiling});
    q.values[0] = 1.0;
    q.log_scale = 0.0;
  }

  double prev_t = 0.0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double t = schedule.times[k];
    if (t < prev_t) throw InvalidArgument("schedule times must be increasing");
    const IntBand band = clip(schedule.bands[k], state_ceiling);
    if (band.empty()) return zero_result(std::move(result), band);

    const double lambda = intensity * (t - prev_t);
    std::size_t work = 0;
    if (options.force_full) {
      q = full_step(q, lambda, band, state_ceiling, options, work);
    } else {
      q = trim(banded_step(q, lambda, band, options, work));
    }
    ++result.steps;
    result.work_profile.push_back(work);
    if (q.is_zero()) return zero_result(std::move(result), band);
    prev_t = t;
  }

  result.final_vector = std::move(q);
  return result;
}

std::int64_t poisson_state_ceiling(std::int64_t n, std::int64_t needed) {
  const std::int64_t centre = std::max(n, needed);
  return centre + static_cast<std::int64_t>(std::ceil(40.0 * std::sqrt(static_cast<double>(n)))) + 64;
}

NonCrossingResult poisson_noncrossing_conditional(const BoundaryPair& bp, std::int64_t k,
                                                  const EngineOptions& options) {
  if (k < 0) throw InvalidArgument("conditioning count must be non-negative");
  const CheckpointSchedule s = compile_schedule(bp);
  const std::int64_t needed = std::max<std::int64_t>(k, static_cast<std::int64_t>(bp.lower_crossings.size()));
  const std::int64_t ceiling = std::max(k, poisson_state_ceiling(bp.n, needed));
  const PropagationResult r = propagate(static_cast<double>(bp.n), s, ceiling, options);
  const double log_q = r.log_prob_terminal(k);
  if (log_q == kNegInf) return make_result(kNegInf, s, r);
  return make_result(log_q - log_poisson_pmf(k, static_cast<double>(bp.n)), s, r);
}

NonCrossingResult poisson_noncrossing_unconditional(const BoundaryPair& bp, const EngineOptions& options) {
  const CheckpointSchedule s = compile_schedule(bp);
  const auto a = static_cast<std::int64_t>(bp.lower_crossings.size());
  const std::int64_t ceiling = poisson_state_ceiling(bp.n, a);
  const PropagationResult r = propagate(static_cast<double>(bp.n), s, ceiling, options);
  return make_result(r.log_total(), s, r);
}

NonCrossingResult ecdf_noncrossing(const BoundaryPair& bp, const EngineOptions& options) {
  const CheckpointSchedule s = compile_schedule(bp);
  const PropagationResult r = propagate(static_cast<double>(bp.n), s, bp.n, options);
  const double log_q = r.log_prob_terminal(bp.n);
  if (log_q == kNegInf) return make_result(kNegInf, s, r);
  // P(Poisson(n) = n) = n^n e^{-n} / n!
  return make_result(log_q - log_poisson_pmf(bp.n, static_cast<double>(bp.n)), s, r);
}

}  // namespace crossprob
