#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "crossprob/engine.hpp"
#include "crossprob/error.hpp"
#include "crossprob/gof.hpp"
#include "crossprob/special.hpp"
#include "support.hpp"

using namespace crossprob;
using testsupport::rel_diff;

namespace {

const StatisticKind kAllKinds[] = {StatisticKind::ks_two_sided,         StatisticKind::ks_plus,
                                   StatisticKind::ks_minus,             StatisticKind::berk_jones_two_sided,
                                   StatisticKind::berk_jones_one_sided, StatisticKind::higher_criticism};

// P(sup (F_n - t) >= d) for the one-sided Kolmogorov-Smirnov statistic,
// from the Birnbaum-Tingey sum (all terms positive).
double birnbaum_tingey(std::int64_t n, double d) {
  const long double nn = static_cast<long double>(n);
  long double sum = 0.0L;
  const auto jmax = static_cast<std::int64_t>(std::floor(static_cast<double>(nn * (1.0L - d))));
  for (std::int64_t j = 0; j <= jmax; ++j) {
    const long double jj = static_cast<long double>(j);
    const long double a = 1.0L - d - jj / nn;
    const long double b = d + jj / nn;
    const long double log_term = std::lgamma(nn + 1.0L) - std::lgamma(jj + 1.0L) - std::lgamma(nn - jj + 1.0L) +
                                 (nn - jj) * std::log(a) + (jj - 1.0L) * std::log(b);
    sum += std::exp(log_term);
  }
  return static_cast<double>(d * sum);
}

std::vector<double> sorted_uniforms(std::mt19937_64& rng, std::int64_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(static_cast<std::size_t>(n));
  for (double& x : u) x = unit(rng);
  std::sort(u.begin(), u.end());
  return u;
}

}  // namespace

TEST_SUITE("gof") {

TEST_CASE("statistic names") {
  for (StatisticKind kind : kAllKinds) {
    const StatisticSpec spec(kind, 5);
    CHECK(StatisticSpec::from_name(spec.name(), 5).kind() == kind);
  }
  CHECK_THROWS_AS(StatisticSpec::from_name("anderson_darling", 5), InvalidArgument);
  CHECK_THROWS_AS(StatisticSpec(StatisticKind::ks_plus, 0), InvalidArgument);
}

TEST_CASE("kolmogorov-smirnov statistic values") {
  const std::vector<double> half{0.5};
  CHECK(compute_statistic(StatisticSpec(StatisticKind::ks_two_sided, 1), half) == 0.5);

  const std::vector<double> ends{0.0, 1.0};
  CHECK(compute_statistic(StatisticSpec(StatisticKind::ks_plus, 2), ends) == doctest::Approx(std::sqrt(2.0) / 2));

  for (std::int64_t n : {1, 7, 100}) {
    std::vector<double> u;
    for (std::int64_t i = 1; i <= n; ++i) u.push_back((static_cast<double>(i) - 0.5) / static_cast<double>(n));
    const double expected = std::sqrt(static_cast<double>(n)) / (2.0 * static_cast<double>(n));
    CHECK(compute_statistic(StatisticSpec(StatisticKind::ks_two_sided, n), u) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("other statistic values") {
  const std::vector<double> u{0.2, 0.6};
  // Beta(1, 2) and Beta(2, 1) cdfs: 1 - (1 - x)^2 and x^2.
  const double b1 = 1 - 0.8 * 0.8, b2 = 0.36;
  CHECK(compute_statistic(StatisticSpec(StatisticKind::berk_jones_one_sided, 2), u) == doctest::Approx(std::min(b1, b2)));
  CHECK(compute_statistic(StatisticSpec(StatisticKind::berk_jones_two_sided, 2), u) ==
        doctest::Approx(std::min({b1, b2, 1 - b1, 1 - b2})));
  const double hc1 = std::sqrt(2.0) * (0.5 - 0.2) / std::sqrt(0.2 * 0.8);
  const double hc2 = std::sqrt(2.0) * (1.0 - 0.6) / std::sqrt(0.6 * 0.4);
  CHECK(compute_statistic(StatisticSpec(StatisticKind::higher_criticism, 2), u) == doctest::Approx(std::max(hc1, hc2)));

  const std::vector<double> zero{0.0, 0.5};
  CHECK(std::isinf(compute_statistic(StatisticSpec(StatisticKind::higher_criticism, 2), zero)));
}

TEST_CASE("statistic input checks") {
  const StatisticSpec spec(StatisticKind::ks_two_sided, 2);
  const std::vector<double> unsorted{0.5, 0.1}, out_of_range{0.1, 1.5}, short_sample{0.1};
  CHECK_THROWS_AS(compute_statistic(spec, unsorted), InvalidArgument);
  CHECK_THROWS_AS(compute_statistic(spec, out_of_range), InvalidArgument);
  CHECK_THROWS_AS(compute_statistic(spec, short_sample), InvalidArgument);
}

TEST_CASE("threshold inversion round trip") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::int64_t n = 25;
  for (int rep = 0; rep < 200; ++rep) {
    const double x = 0.02 + 0.96 * unit(rng);
    const auto i = 1 + static_cast<std::int64_t>(rng() % n);
    const double nn = static_cast<double>(n), ii = static_cast<double>(i);
    // Per-index statistic values at u = x for each family, then invert.
    const StatisticSpec hc(StatisticKind::higher_criticism, n);
    const double hc_t = std::sqrt(nn) * (ii / nn - x) / std::sqrt(x * (1 - x));
    CHECK(hc.lower_time(i, hc_t) == doctest::Approx(x).epsilon(1e-12));

    const StatisticSpec ks(StatisticKind::ks_two_sided, n);
    const double plus_t = std::sqrt(nn) * (ii / nn - x);
    const double minus_t = std::sqrt(nn) * (x - (ii - 1) / nn);
    if (plus_t > 0) CHECK(ks.lower_time(i, plus_t) == doctest::Approx(x).epsilon(1e-12));
    if (minus_t > 0) CHECK(ks.upper_time(i, minus_t) == doctest::Approx(x).epsilon(1e-12));

    const StatisticSpec bj(StatisticKind::berk_jones_two_sided, n);
    const double lower_tail = regularized_incomplete_beta(x, ii, nn - ii + 1);
    const double upper_tail = regularized_incomplete_beta_complement(x, ii, nn - ii + 1);
    // Thresholds never exceed 1/2; near 1 the tail no longer determines x.
    if (lower_tail > 1e-300 && lower_tail <= 0.5) CHECK(bj.lower_time(i, lower_tail) == doctest::Approx(x).epsilon(1e-10));
    if (upper_tail > 1e-300 && upper_tail <= 0.5) CHECK(bj.upper_time(i, upper_tail) == doctest::Approx(x).epsilon(1e-10));
  }
}

TEST_CASE("boundaries from a threshold") {
  const BoundaryPair bp = boundaries_from_threshold(StatisticSpec(StatisticKind::ks_two_sided, 1), 0.75);
  CHECK(bp.lower_crossings == std::vector<double>{0.75});
  CHECK(bp.upper_initial_cap == 0);
  CHECK(bp.upper_crossings == std::vector<double>{0.25});

  const BoundaryPair plus = boundaries_from_threshold(StatisticSpec(StatisticKind::ks_plus, 3), 0.5);
  CHECK(plus.lower_crossings.empty());
  CHECK(plus.upper_crossings.size() == 3);
  const BoundaryPair minus = boundaries_from_threshold(StatisticSpec(StatisticKind::ks_minus, 3), 0.5);
  CHECK(minus.upper_unbounded());
  CHECK(minus.lower_crossings.size() == 3);
}

TEST_CASE("single-sample kolmogorov-smirnov p-values") {
  const StatisticSpec spec(StatisticKind::ks_two_sided, 1);
  CHECK(pvalue(spec, 0.75).p_value == doctest::Approx(0.5).epsilon(1e-12));
  for (double t = 0.5; t <= 1.0; t += 1.0 / 64) {
    CHECK(std::fabs(pvalue(spec, t).p_value - (2 - 2 * t)) < 1e-12);
  }
  // Below the smallest achievable value the band is empty.
  CHECK(pvalue(spec, 0.3).p_value == 1.0);
  CHECK(pvalue(spec, 5.0).p_value == 0.0);
  CHECK(critical_value(spec, 0.5) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("thresholds beyond the achievable range") {
  for (StatisticKind kind : kAllKinds) {
    const StatisticSpec spec(kind, 8);
    const auto [lo, hi] = spec.threshold_bracket();
    const double never = spec.small_is_extreme() ? -0.5 : hi + 100.0;
    const double always = spec.small_is_extreme() ? 2.0 : lo - 100.0;
    CAPTURE(spec.name());
    // Higher criticism is unbounded above, so no threshold is out of reach.
    if (kind != StatisticKind::higher_criticism) CHECK(pvalue(spec, never).p_value == 0.0);
    CHECK(pvalue(spec, always).p_value == 1.0);
  }
}

TEST_CASE("one-sided kolmogorov-smirnov against the closed form") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 150);
    const double d = 0.02 + 0.6 * unit(rng);
    const double t = d * std::sqrt(static_cast<double>(n));
    const double exact = birnbaum_tingey(n, d);
    CAPTURE(n);
    CAPTURE(d);
    // p = 1 - Q, and Q is accurate to about 1e-13 relative.
    const double tol = 1e-9 * exact + 1e-13;
    CHECK(std::fabs(pvalue(StatisticSpec(StatisticKind::ks_plus, n), t).p_value - exact) <= tol);
    CHECK(std::fabs(pvalue(StatisticSpec(StatisticKind::ks_minus, n), t).p_value - exact) <= tol);
  }
}

TEST_CASE("calibration at n = 100") {
  for (StatisticKind kind : kAllKinds) {
    const StatisticSpec spec(kind, 100);
    const double t = critical_value(spec, 0.05);
    CAPTURE(spec.name());
    CHECK(std::fabs(pvalue(spec, t).p_value - 0.05) < 1e-9);
  }
  CHECK_THROWS_AS(critical_value(StatisticSpec(StatisticKind::ks_plus, 10), 0.0), InvalidArgument);
  CHECK_THROWS_AS(critical_value(StatisticSpec(StatisticKind::ks_plus, 10), 1.0), InvalidArgument);
}

TEST_CASE("p-values are monotone in the threshold") {
  for (StatisticKind kind : kAllKinds) {
    const StatisticSpec spec(kind, 30);
    const auto [lo, hi] = spec.threshold_bracket();
    double prev = spec.small_is_extreme() ? 0.0 : 1.0;
    for (int k = 0; k <= 40; ++k) {
      const double t = lo + (hi - lo) * k / 40.0;
      const double p = pvalue(spec, t).p_value;
      CAPTURE(spec.name());
      CAPTURE(t);
      if (spec.small_is_extreme()) {
        CHECK(p >= prev - 1e-12);
      } else {
        CHECK(p <= prev + 1e-12);
      }
      prev = p;
    }
  }
}

TEST_CASE("duality between p-values and critical values") {
  std::mt19937_64 rng(53);
  const double alpha = 0.1;
  for (StatisticKind kind : kAllKinds) {
    const StatisticSpec spec(kind, 30);
    const double cv = critical_value(spec, alpha);
    for (int rep = 0; rep < 40; ++rep) {
      const std::vector<double> u = sorted_uniforms(rng, 30);
      const double stat = compute_statistic(spec, u);
      if (std::fabs(stat - cv) <= 1e-8 * std::fabs(cv)) continue;
      const bool rejected = pvalue(spec, stat).p_value <= alpha;
      const bool beyond = spec.small_is_extreme() ? stat < cv : stat > cv;
      CAPTURE(spec.name());
      CHECK(rejected == beyond);
    }
  }
}

TEST_CASE("p-values of uniform samples are uniform") {
  std::mt19937_64 rng(54);
  const std::int64_t n = 20;
  const int sims = 10000;
  for (StatisticKind kind : kAllKinds) {
    const StatisticSpec spec(kind, n);
    std::vector<double> p;
    p.reserve(sims);
    for (int s = 0; s < sims; ++s) {
      const std::vector<double> u = sorted_uniforms(rng, n);
      p.push_back(pvalue(spec, compute_statistic(spec, u)).p_value);
    }
    std::sort(p.begin(), p.end());
    const StatisticSpec ks(StatisticKind::ks_two_sided, sims);
    const double k = compute_statistic(ks, p);
    CAPTURE(spec.name());
    CHECK(pvalue(ks, k).p_value > 1e-3);
  }
}

}
