#include <doctest.h>

#include <random>
#include <sstream>

#include "crossprob/boundaries.hpp"
#include "crossprob/error.hpp"
#include "support.hpp"

using namespace crossprob;

TEST_SUITE("boundaries") {

TEST_CASE("no constraints give a single terminal checkpoint") {
  BoundaryPair bp;
  bp.n = 5;
  bp.upper_initial_cap = 10;
  const CheckpointSchedule s = compile_schedule(bp);
  REQUIRE(s.times == std::vector<double>{1.0});
  CHECK(s.bands[0] == IntBand{0, 10});
  CHECK(s.initial == IntBand{0, 10});
  CHECK(band_width_profile(s) == std::vector<std::int64_t>{11});
}

TEST_CASE("mixed crossings") {
  BoundaryPair bp;
  bp.n = 4;
  bp.lower_crossings = {0.3, 0.7};
  bp.upper_initial_cap = 2;
  bp.upper_crossings = {0.5};
  const CheckpointSchedule s = compile_schedule(bp);
  CHECK(s.times == std::vector<double>{0.3, 0.5, 0.7, 1.0});
  // The cap rise at 0.5 takes effect just after 0.5.
  const std::vector<IntBand> expected{{1, 2}, {1, 2}, {2, 3}, {2, 3}};
  CHECK(s.bands == expected);
  CHECK(band_width_profile(s) == std::vector<std::int64_t>{2, 2, 2, 2});
}

TEST_CASE("coincident lower crossings above the cap leave an empty band") {
  BoundaryPair bp;
  bp.n = 3;
  bp.lower_crossings = {0.2, 0.2, 0.2};
  bp.upper_initial_cap = 1;
  const CheckpointSchedule s = compile_schedule(bp);
  REQUIRE(s.times.size() == 2);
  CHECK(s.bands[0] == IntBand{3, 1});
  CHECK(s.bands[0].empty());
  CHECK(band_width_profile(s)[0] == 0);
}

TEST_CASE("crossings at zero") {
  BoundaryPair bp;
  bp.n = 2;
  bp.lower_crossings = {0.0};
  const CheckpointSchedule s = compile_schedule(bp);
  CHECK(s.times == std::vector<double>{0.0, 1.0});
  CHECK(s.initial.lo == 1);
  CHECK_FALSE(s.initial.contains(0));

  BoundaryPair up;
  up.n = 2;
  up.upper_initial_cap = 0;
  up.upper_crossings = {0.0, 0.5};
  const CheckpointSchedule u = compile_schedule(up);
  CHECK(u.initial == IntBand{0, 1});
  CHECK(u.bands[0] == IntBand{0, 1});  // t = 0
  CHECK(u.bands[1] == IntBand{0, 1});  // t = 0.5, left limit
  CHECK(u.bands[2] == IntBand{0, 2});
}

TEST_CASE("unbounded cap stays unbounded") {
  BoundaryPair bp;
  bp.n = 3;
  bp.upper_crossings = {0.5};
  CHECK(bp.upper_unbounded());
  const CheckpointSchedule s = compile_schedule(bp);
  CHECK(s.bands.back().hi == kUnboundedCap);
}

TEST_CASE("validation") {
  BoundaryPair bp;
  bp.n = 0;
  CHECK_THROWS_AS(compile_schedule(bp), InvalidArgument);
  bp.n = 2;
  bp.lower_crossings = {0.5, 0.4};
  CHECK_THROWS_AS(compile_schedule(bp), InvalidArgument);
  bp.lower_crossings = {0.5, 1.5};
  CHECK_THROWS_AS(compile_schedule(bp), InvalidArgument);
  bp.lower_crossings = {-0.1};
  CHECK_THROWS_AS(compile_schedule(bp), InvalidArgument);
  bp.lower_crossings = {0.2, 0.3, 0.4};  // more required jumps than n is legal
  CHECK_NOTHROW(compile_schedule(bp));
}

TEST_CASE("schedule invariants on random boundaries") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 60);
    const BoundaryPair bp = testsupport::random_band(rng, n, testsupport::random_sides(rng));
    const CheckpointSchedule s = compile_schedule(bp);
    REQUIRE(s.times.back() == 1.0);
    CHECK(s.size() <= bp.lower_crossings.size() + bp.upper_crossings.size() + 1);
    for (std::size_t k = 1; k < s.size(); ++k) {
      CHECK(s.times[k - 1] < s.times[k]);
      CHECK(s.bands[k - 1].lo <= s.bands[k].lo);
      CHECK(s.bands[k - 1].hi <= s.bands[k].hi);
    }
    // Rebuilding a pair from the schedule reproduces the bands.
    const BoundaryPair rebuilt = boundary_pair_from_schedule(n, s);
    const CheckpointSchedule again = compile_schedule(rebuilt);
    CHECK(again.initial == s.initial);
    // Redundant checkpoints (e.g. at time 0) may disappear; the band implied
    // at every original time must not.
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double t = s.times[k];
      const IntBand implied{rebuilt.lower_at(t), t > 0.0 ? rebuilt.upper_before(t) : rebuilt.upper_at(0.0)};
      CHECK(implied == s.bands[k]);
    }
  }
}

TEST_CASE("text format round trip") {
  BoundaryPair bp;
  bp.n = 4;
  bp.lower_crossings = {0.125, 0.3, 0.3};
  bp.upper_initial_cap = 1;
  bp.upper_crossings = {0.1, 0.6000000000000001};
  std::istringstream in(format_boundary_text(bp));
  const BoundaryPair back = parse_boundary_text(in);
  CHECK(back.n == bp.n);
  CHECK(back.lower_crossings == bp.lower_crossings);
  CHECK(back.upper_initial_cap == bp.upper_initial_cap);
  CHECK(back.upper_crossings == bp.upper_crossings);

  BoundaryPair open;
  open.n = 2;
  std::istringstream in2(format_boundary_text(open));
  CHECK(parse_boundary_text(in2).upper_unbounded());
}

TEST_CASE("text format details") {
  std::istringstream in("# header\n3\n\n# cap\ninf\n");
  const BoundaryPair bp = parse_boundary_text(in);
  CHECK(bp.n == 3);
  CHECK(bp.lower_crossings.empty());
  CHECK(bp.upper_unbounded());
  CHECK(bp.upper_crossings.empty());

  std::istringstream bad_n("x\n\n0\n\n");
  CHECK_THROWS_AS(parse_boundary_text(bad_n), InvalidArgument);
  std::istringstream bad_time("2\n0.1 zz\n0\n\n");
  CHECK_THROWS_AS(parse_boundary_text(bad_time), InvalidArgument);
  std::istringstream missing("2\n");
  CHECK_THROWS_AS(parse_boundary_text(missing), InvalidArgument);
  std::istringstream unsorted("2\n0.5 0.1\n0\n\n");
  CHECK_THROWS_AS(parse_boundary_text(unsorted), InvalidArgument);
  CHECK_THROWS_AS(load_boundary_file("/nonexistent/boundary.txt"), InvalidArgument);
}

}
