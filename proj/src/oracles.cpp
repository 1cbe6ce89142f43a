#include "crossprob/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "crossprob/error.hpp"
#include "crossprob/special.hpp"

namespace crossprob {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Binomial recursion

ScaledProbVector binomial_step(const ScaledProbVector& r, std::int64_t n, double p, IntBand band) {
  ScaledProbVector out = ScaledProbVector::zero(band);
  const std::int64_t r_lo = r.offset;
  const auto width = static_cast<std::int64_t>(r.values.size());

  // Row l contributes R(l) * P(Bin(n - l, p) = m - l). Each row is seeded at
  // its largest in-band pmf value in log space, then scaled against the
  // largest row so that nothing underflows prematurely.
  std::vector<double> row_log(static_cast<std::size_t>(width), kNegInf);
  std::vector<std::int64_t> row_seed(static_cast<std::size_t>(width), 0);
  double top = kNegInf;
  for (std::int64_t i = 0; i < width; ++i) {
    const double rv = r.values[static_cast<std::size_t>(i)];
    if (rv <= 0.0) continue;
    const std::int64_t l = r_lo + i;
    const std::int64_t trials = n - l;
    const std::int64_t j_lo = std::max<std::int64_t>(0, band.lo - l);
    const std::int64_t j_hi = std::min(trials, band.hi - l);
    if (j_lo > j_hi) continue;
    std::int64_t mode = static_cast<std::int64_t>(std::floor((static_cast<double>(trials) + 1.0) * p));
    mode = std::clamp<std::int64_t>(mode, 0, trials);
    const std::int64_t seed = std::clamp(mode, j_lo, j_hi);
    row_seed[static_cast<std::size_t>(i)] = seed;
    row_log[static_cast<std::size_t>(i)] = std::log(rv) + log_binomial_pmf(seed, trials, p);
    top = std::max(top, row_log[static_cast<std::size_t>(i)]);
  }
  if (top == kNegInf) return out;

  const double odds = p / (1.0 - p);
  for (std::int64_t i = 0; i < width; ++i) {
    const double lg = row_log[static_cast<std::size_t>(i)];
    if (lg == kNegInf) continue;
    const std::int64_t l = r_lo + i;
    const std::int64_t trials = n - l;
    const std::int64_t j_lo = std::max<std::int64_t>(0, band.lo - l);
    const std::int64_t j_hi = std::min(trials, band.hi - l);
    const std::int64_t seed = row_seed[static_cast<std::size_t>(i)];
    const double at_seed = std::exp(lg - top);
    auto slot = [&](std::int64_t j) -> double& { return out.values[static_cast<std::size_t>(l + j - band.lo)]; };

    if (p >= 1.0) {
      slot(seed) += at_seed;  // all remaining points land before t_{i+1}
      continue;
    }
    slot(seed) += at_seed;
    double v = at_seed;
    for (std::int64_t j = seed; j < j_hi; ++j) {
      v *= static_cast<double>(trials - j) / static_cast<double>(j + 1) * odds;
      slot(j + 1) += v;
    }
    v = at_seed;
    for (std::int64_t j = seed; j > j_lo; --j) {
      v *= static_cast<double>(j) / static_cast<double>(trials - j + 1) / odds;
      slot(j - 1) += v;
    }
  }
  out.log_scale = r.log_scale + top;
  return renormalize(std::move(out));
}

// ---------------------------------------------------------------------------
// Random numbers: xoshiro256** seeded through splitmix64.

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed ^ (stream * 0xD1B54A32D192ED03ULL);
    for (auto& s : state_) s = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Standard exponential.
  double exponential() { return -std::log1p(-uniform()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

constexpr std::uint64_t kBlockTrials = 4096;
constexpr const char* kGeneratorName = "xoshiro256** seeded by splitmix64(seed, block), 4096-trial blocks";

// Sorted uniforms on [0, 1] from normalized exponential spacings.
void sorted_uniforms(Xoshiro256& rng, std::int64_t count, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(count));
  double total = 0.0;
  for (auto& v : out) {
    total += rng.exponential();
    v = total;
  }
  total += rng.exponential();
  for (auto& v : out) v /= total;
}

template <typename TrialFn>
MonteCarloResult run_blocks(std::uint64_t trials, std::uint64_t seed, unsigned threads, TrialFn trial) {
  if (trials < 1) throw InvalidArgument("Monte Carlo needs at least one trial");
  const std::uint64_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<std::uint64_t> block_hits(blocks, 0);
  std::atomic<std::uint64_t> next_block{0};

  auto worker = [&] {
    std::vector<double> scratch;
    for (std::uint64_t b = next_block++; b < blocks; b = next_block++) {
      Xoshiro256 rng(seed, b);
      const std::uint64_t count = std::min(kBlockTrials, trials - b * kBlockTrials);
      std::uint64_t hits = 0;
      for (std::uint64_t i = 0; i < count; ++i) hits += trial(rng, scratch) ? 1 : 0;
      block_hits[b] = hits;
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  MonteCarloResult res;
  for (auto h : block_hits) res.hits += h;
  res.trials = trials;
  res.estimate = static_cast<double>(res.hits) / static_cast<double>(trials);
  res.std_error = std::sqrt(res.estimate * (1.0 - res.estimate) / static_cast<double>(trials));
  res.seed = seed;
  res.generator = kGeneratorName;
  return res;
}

}  // namespace

NonCrossingResult ecdf_noncrossing_binomial_recursion(const BoundaryPair& bp) {
  const CheckpointSchedule s = compile_schedule(bp);
  const std::int64_t n = bp.n;

  NonCrossingResult result;
  result.checkpoints = s.size();
  result.log_probability = kNegInf;
  result.probability = 0.0;
  if (!s.initial.contains(0)) return result;

  ScaledProbVector r = ScaledProbVector::point_mass(0);
  double prev_t = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double t = s.times[k];
    const IntBand band{std::max<std::int64_t>(0, s.bands[k].lo), std::min(s.bands[k].hi, n)};
    if (band.empty()) return result;
    // t == prev_t only at time zero, and prev_t == 1 cannot precede another
    // checkpoint; both are identity steps.
    double p = 0.0;
    if (t > prev_t && prev_t < 1.0) p = t >= 1.0 ? 1.0 : (t - prev_t) / (1.0 - prev_t);
    if (p == 0.0) {
      ScaledProbVector kept = ScaledProbVector::zero(band);
      for (std::int64_t m = band.lo; m <= band.hi; ++m) {
        const std::int64_t i = m - r.offset;
        if (i >= 0 && i < static_cast<std::int64_t>(r.values.size())) {
          kept.values[static_cast<std::size_t>(m - band.lo)] = r.values[static_cast<std::size_t>(i)];
        }
      }
      kept.log_scale = r.log_scale;
      r = renormalize(std::move(kept));
    } else {
      r = binomial_step(r, n, p, band);
    }
    ++result.steps;
    if (r.is_zero()) return result;
    prev_t = t;
  }

  const double log_p = r.log_at(n);
  if (log_p > std::log1p(1e-9)) throw NumericalFailure("binomial recursion produced a probability above one");
  result.log_probability = std::min(log_p, 0.0);
  result.probability = std::exp(result.log_probability);
  return result;
}

bool path_within(const BoundaryPair& bp, std::span<const double> jump_times) {
  const auto count = static_cast<std::int64_t>(jump_times.size());

  // i-th lower crossing: the path must already be at i.
  const auto a = static_cast<std::int64_t>(bp.lower_crossings.size());
  if (a > count) return false;
  for (std::int64_t i = 0; i < a; ++i) {
    if (!(jump_times[static_cast<std::size_t>(i)] <= bp.lower_crossings[static_cast<std::size_t>(i)])) return false;
  }

  if (bp.upper_unbounded()) return true;
  const std::int64_t cap0 = bp.upper_initial_cap;
  const auto b = static_cast<std::int64_t>(bp.upper_crossings.size());
  const std::int64_t at_zero = std::upper_bound(bp.upper_crossings.begin(), bp.upper_crossings.end(), 0.0) -
                               bp.upper_crossings.begin();
  if (cap0 + at_zero < 0) return false;
  // Jump number m (1-based) needs the cap to have risen m - cap0 times
  // strictly before it; a rise at u applies only after u.
  for (std::int64_t m = 1; m <= count; ++m) {
    const std::int64_t rises = m - cap0;
    if (rises <= 0) continue;
    if (rises > b) return false;
    if (bp.upper_crossings[static_cast<std::size_t>(rises - 1)] >= jump_times[static_cast<std::size_t>(m - 1)]) {
      return false;
    }
  }
  return true;
}

MonteCarloResult monte_carlo_ecdf(const BoundaryPair& bp, std::uint64_t trials, std::uint64_t seed,
                                  unsigned threads) {
  bp.validate();
  return run_blocks(trials, seed, threads, [&](Xoshiro256& rng, std::vector<double>& u) {
    sorted_uniforms(rng, bp.n, u);
    return path_within(bp, u);
  });
}

MonteCarloResult monte_carlo_poisson(const BoundaryPair& bp, std::optional<std::int64_t> given_count,
                                     std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  bp.validate();
  if (given_count && *given_count < 0) throw InvalidArgument("conditioning count must be non-negative");
  if (given_count) {
    const std::int64_t k = *given_count;
    return run_blocks(trials, seed, threads, [&](Xoshiro256& rng, std::vector<double>& u) {
      sorted_uniforms(rng, k, u);
      return path_within(bp, u);
    });
  }
  const double rate = static_cast<double>(bp.n);
  return run_blocks(trials, seed, threads, [&](Xoshiro256& rng, std::vector<double>& jumps) {
    jumps.clear();
    double t = rng.exponential() / rate;
    while (t <= 1.0) {
      jumps.push_back(t);
      t += rng.exponential() / rate;
    }
    return path_within(bp, jumps);
  });
}

}  // namespace crossprob
