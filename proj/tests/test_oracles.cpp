#include <doctest.h>

#include <cmath>
#include <random>

#include "crossprob/engine.hpp"
#include "crossprob/error.hpp"
#include "crossprob/oracles.hpp"
#include "support.hpp"

using namespace crossprob;
using testsupport::log_rel_diff;

namespace {

BoundaryPair one_sample_two_sided(double d) {
  BoundaryPair bp;
  bp.n = 1;
  bp.lower_crossings = {d};
  bp.upper_initial_cap = 0;
  bp.upper_crossings = {1.0 - d};
  return bp;
}

bool within(const MonteCarloResult& r, double exact, double sigmas) {
  const double sd = std::sqrt(exact * (1.0 - exact) / static_cast<double>(r.trials));
  return std::fabs(r.estimate - exact) <= sigmas * sd;
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("binomial recursion closed forms") {
  for (std::int64_t n : {1, 2, 17, 200}) {
    BoundaryPair free;
    free.n = n;
    CHECK(ecdf_noncrossing_binomial_recursion(free).probability == doctest::Approx(1.0).epsilon(1e-13));
  }
  for (double d : {0.6, 0.75, 0.9}) {
    CHECK(std::fabs(ecdf_noncrossing_binomial_recursion(one_sample_two_sided(d)).probability - (2 * d - 1)) < 1e-12);
  }
  BoundaryPair empty;
  empty.n = 3;
  empty.lower_crossings = {0.2, 0.2, 0.2};
  empty.upper_initial_cap = 1;
  CHECK(ecdf_noncrossing_binomial_recursion(empty).probability == 0.0);
}

TEST_CASE("binomial recursion matches the engine") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 60; ++rep) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 256);
    const BoundaryPair bp = testsupport::random_band(rng, n, testsupport::random_sides(rng));
    CAPTURE(n);
    CHECK(log_rel_diff(ecdf_noncrossing_binomial_recursion(bp).log_probability,
                       ecdf_noncrossing(bp).log_probability) < 1e-10);
  }
}

TEST_CASE("binomial recursion with duplicate times at one") {
  BoundaryPair bp;
  bp.n = 3;
  bp.lower_crossings = {0.5, 1.0, 1.0};
  bp.upper_initial_cap = 0;
  bp.upper_crossings = {0.1, 0.2, 1.0};
  CHECK(log_rel_diff(ecdf_noncrossing_binomial_recursion(bp).log_probability,
                     ecdf_noncrossing(bp).log_probability) < 1e-12);
}

TEST_CASE("path checks") {
  BoundaryPair bp = one_sample_two_sided(0.75);
  const std::vector<double> inside{0.5}, early{0.2}, late{0.8};
  CHECK(path_within(bp, inside));
  CHECK_FALSE(path_within(bp, early));
  CHECK_FALSE(path_within(bp, late));
  // Jumping exactly at the cap rise is too early; exactly at the lower
  // crossing is in time.
  const std::vector<double> at_rise{0.25}, at_lower{0.75};
  CHECK_FALSE(path_within(bp, at_rise));
  CHECK(path_within(bp, at_lower));
}

TEST_CASE("monte carlo trivial cases") {
  BoundaryPair free;
  free.n = 5;
  const MonteCarloResult r = monte_carlo_ecdf(free, 1000, 1);
  CHECK(r.estimate == 1.0);
  CHECK(r.hits == 1000);
  CHECK(r.std_error == 0.0);
  CHECK_FALSE(r.generator.empty());

  BoundaryPair empty;
  empty.n = 3;
  empty.lower_crossings = {0.2, 0.2, 0.2};
  empty.upper_initial_cap = 1;
  CHECK(monte_carlo_ecdf(empty, 1000, 1).estimate == 0.0);

  CHECK(monte_carlo_poisson(free, 4, 1000, 2).estimate == 1.0);
  CHECK_THROWS_AS(monte_carlo_ecdf(free, 0, 1), InvalidArgument);
}

TEST_CASE("monte carlo single sample") {
  const MonteCarloResult r = monte_carlo_ecdf(one_sample_two_sided(0.75), 1000000, 1);
  CHECK(std::fabs(r.estimate - 0.5) <= 3 * 0.0005);
  CHECK(r.std_error == doctest::Approx(std::sqrt(r.estimate * (1 - r.estimate) / 1e6)));
  CHECK(r.seed == 1);
}

TEST_CASE("monte carlo is deterministic across thread counts") {
  BoundaryPair bp;
  bp.n = 4;
  bp.lower_crossings = {0.3, 0.5, 0.8};
  bp.upper_initial_cap = 1;
  bp.upper_crossings = {0.05, 0.2, 0.4};
  const MonteCarloResult a = monte_carlo_ecdf(bp, 50000, 99, 1);
  const MonteCarloResult b = monte_carlo_ecdf(bp, 50000, 99, 4);
  const MonteCarloResult c = monte_carlo_ecdf(bp, 50000, 99, 1);
  CHECK(a.hits == b.hits);
  CHECK(a.hits == c.hits);
  CHECK(monte_carlo_ecdf(bp, 50000, 100, 1).hits != a.hits);
}

TEST_CASE("monte carlo poisson") {
  for (std::int64_t n : {1, 2, 4}) {
    BoundaryPair none;
    none.n = n;
    none.upper_initial_cap = 0;
    CHECK(within(monte_carlo_poisson(none, std::nullopt, 200000, 5), std::exp(-static_cast<double>(n)), 3.0));
  }
  BoundaryPair bp;
  bp.n = 6;
  bp.lower_crossings = {0.5};
  CHECK(within(monte_carlo_poisson(bp, std::nullopt, 200000, 6), -std::expm1(-3.0), 3.0));
}

TEST_CASE("monte carlo agrees with the engine on random boundaries") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 8; ++rep) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 40);
    const BoundaryPair bp = testsupport::random_band(rng, n, testsupport::random_sides(rng));
    CAPTURE(n);
    CHECK(within(monte_carlo_ecdf(bp, 100000, 1000 + rep), ecdf_noncrossing(bp).probability, 4.0));
    CHECK(within(monte_carlo_poisson(bp, std::nullopt, 100000, 2000 + rep),
                 poisson_noncrossing_unconditional(bp).probability, 4.0));
    const std::int64_t k = n + static_cast<std::int64_t>(rng() % 3) - 1;
    if (k >= 0) {
      CHECK(within(monte_carlo_poisson(bp, k, 100000, 3000 + rep), poisson_noncrossing_conditional(bp, k).probability,
                   4.0));
    }
  }
}

}
