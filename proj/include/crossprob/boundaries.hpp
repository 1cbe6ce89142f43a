#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace crossprob {

/// Cap value meaning "no upper boundary".
inline constexpr std::int64_t kUnboundedCap = std::numeric_limits<std::int64_t>::max();

/// Closed integer interval [lo, hi]; empty when hi < lo.
struct IntBand {
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  bool empty() const { return hi < lo; }
  std::int64_t width() const { return empty() ? 0 : hi - lo + 1; }
  bool contains(std::int64_t m) const { return lo <= m && m <= hi; }
  bool operator==(const IntBand&) const = default;
};

/// Monotone step boundaries for a counting path on [0, 1].
///
/// A path f satisfies the pair when, for every t in [0, 1],
///
///   #{i : lower_crossings[i] <= t}  <=  f(t)  <=  upper_initial_cap + #{j : upper_crossings[j] <= t}.
///
/// Continuous boundaries g < f < h convert as
///   lower_crossings    = { inf{t : g(t) >= i} : i = 0, 1, ..., floor(g(1)) }
///   upper_initial_cap  = ceil(h(0)) - 1
///   upper_crossings    = { sup{t : h(t) <= i} : i = ceil(h(0)), ..., ceil(h(1)) - 1 }
/// which differs from the strict inequalities only on null events for
/// Poisson and empirical-CDF paths.
struct BoundaryPair {
  std::int64_t n = 1;
  std::vector<double> lower_crossings;
  std::int64_t upper_initial_cap = kUnboundedCap;
  std::vector<double> upper_crossings;

  /// Throws InvalidArgument on n < 1, unsorted lists or times outside [0, 1].
  void validate() const;

  bool upper_unbounded() const { return upper_initial_cap == kUnboundedCap; }

  /// #{i : lower_crossings[i] <= t}
  std::int64_t lower_at(double t) const;
  /// Cap in force at time t (saturates at kUnboundedCap).
  std::int64_t upper_at(double t) const;
  /// Left limit of the cap at t > 0, i.e. the cap on the interval just before t.
  std::int64_t upper_before(double t) const;
};

/// Discrete times at which the boundary constraints are checked, with the
/// admissible integer band at each of them.
///
/// Checking a non-decreasing path against `bands[k]` at `times[k]` for all k
/// (and against `initial` at time 0) is equivalent to checking it against the
/// step boundaries at every t in [0, 1].
struct CheckpointSchedule {
  IntBand initial;
  std::vector<double> times;
  std::vector<IntBand> bands;

  std::size_t size() const { return times.size(); }
};

CheckpointSchedule compile_schedule(const BoundaryPair& bp);

/// hi - lo + 1 per checkpoint, 0 for empty bands.
std::vector<std::int64_t> band_width_profile(const CheckpointSchedule& schedule);

/// A BoundaryPair whose compiled schedule reproduces `schedule`'s bands.
BoundaryPair boundary_pair_from_schedule(std::int64_t n, const CheckpointSchedule& schedule);

/// Plain-text boundary format:
///   line 1: n
///   line 2: lower crossing times (may be empty)
///   line 3: upper initial cap (integer, or "inf")
///   line 4: upper crossing times (may be empty)
/// Lines starting with '#' are comments.
BoundaryPair parse_boundary_text(std::istream& in);
BoundaryPair load_boundary_file(const std::string& path);
std::string format_boundary_text(const BoundaryPair& bp);

}  // namespace crossprob
