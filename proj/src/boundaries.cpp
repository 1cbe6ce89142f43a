#include "crossprob/boundaries.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "crossprob/error.hpp"

namespace crossprob {

namespace {

void check_times(const std::vector<double>& times, const char* what) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (!(t >= 0.0 && t <= 1.0)) {
      std::ostringstream msg;
      msg << what << " crossing time " << t << " at position " << i << " is outside [0, 1]";
      throw InvalidArgument(msg.str());
    }
    if (i > 0 && t < times[i - 1]) {
      std::ostringstream msg;
      msg << what << " crossing times are not sorted at position " << i;
      throw InvalidArgument(msg.str());
    }
  }
}

std::int64_t count_le(const std::vector<double>& v, double t) {
  return std::upper_bound(v.begin(), v.end(), t) - v.begin();
}

std::int64_t count_lt(const std::vector<double>& v, double t) {
  return std::lower_bound(v.begin(), v.end(), t) - v.begin();
}

std::int64_t saturating_add(std::int64_t cap, std::int64_t count) {
  if (cap == kUnboundedCap) return kUnboundedCap;
  if (cap > kUnboundedCap - count) return kUnboundedCap - 1;
  return cap + count;
}

}  // namespace

void BoundaryPair::validate() const {
  if (n < 1) throw InvalidArgument("n must be a positive integer");
  check_times(lower_crossings, "lower");
  check_times(upper_crossings, "upper");
}

std::int64_t BoundaryPair::lower_at(double t) const { return count_le(lower_crossings, t); }

std::int64_t BoundaryPair::upper_at(double t) const {
  return saturating_add(upper_initial_cap, count_le(upper_crossings, t));
}

std::int64_t BoundaryPair::upper_before(double t) const {
  return saturating_add(upper_initial_cap, count_lt(upper_crossings, t));
}

CheckpointSchedule compile_schedule(const BoundaryPair& bp) {
  bp.validate();

  CheckpointSchedule s;
  s.initial = IntBand{bp.lower_at(0.0), bp.upper_at(0.0)};

  s.times.reserve(bp.lower_crossings.size() + bp.upper_crossings.size() + 1);
  std::merge(bp.lower_crossings.begin(), bp.lower_crossings.end(), bp.upper_crossings.begin(),
             bp.upper_crossings.end(), std::back_inserter(s.times));
  s.times.push_back(1.0);
  s.times.erase(std::unique(s.times.begin(), s.times.end()), s.times.end());

  // The path is non-decreasing, so a lower violation anywhere in [l_i, next)
  // shows up at l_i itself, and an upper violation on an interval where the
  // cap is constant shows up at the interval's right end. Hence the upper
  // side uses the cap's left limit.
  s.bands.reserve(s.times.size());
  for (double t : s.times) {
    const std::int64_t hi = t > 0.0 ? bp.upper_before(t) : bp.upper_at(0.0);
    s.bands.push_back(IntBand{bp.lower_at(t), hi});
  }
  return s;
}

std::vector<std::int64_t> band_width_profile(const CheckpointSchedule& schedule) {
  std::vector<std::int64_t> widths;
  widths.reserve(schedule.bands.size());
  for (const auto& b : schedule.bands) widths.push_back(b.width());
  return widths;
}

BoundaryPair boundary_pair_from_schedule(std::int64_t n, const CheckpointSchedule& schedule) {
  BoundaryPair bp;
  bp.n = n;
  bp.upper_initial_cap = schedule.initial.hi;
  for (std::int64_t i = 0; i < schedule.initial.lo; ++i) bp.lower_crossings.push_back(0.0);

  std::int64_t prev_lo = schedule.initial.lo;
  std::int64_t prev_hi = schedule.initial.hi;
  double prev_t = 0.0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double t = schedule.times[k];
    const IntBand& b = schedule.bands[k];
    for (std::int64_t i = prev_lo; i < b.lo; ++i) bp.lower_crossings.push_back(t);
    // A rise of the cap first visible at t happened on [prev_t, t); prev_t is
    // a checkpoint, so placing it there adds no new times.
    if (prev_hi != kUnboundedCap && b.hi != kUnboundedCap) {
      for (std::int64_t j = prev_hi; j < b.hi; ++j) bp.upper_crossings.push_back(prev_t);
    }
    prev_lo = std::max(prev_lo, b.lo);
    prev_hi = std::max(prev_hi, b.hi);
    prev_t = t;
  }
  std::sort(bp.upper_crossings.begin(), bp.upper_crossings.end());
  return bp;
}

namespace {

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string::npos && line[first] == '#') continue;
    return true;
  }
  return false;
}

std::vector<double> parse_times(const std::string& line, const char* what) {
  std::istringstream is(line);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      throw InvalidArgument(std::string("malformed ") + what + " crossing time '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::int64_t parse_integer(const std::string& line, const char* what) {
  std::istringstream is(line);
  std::string tok, extra;
  if (!(is >> tok) || (is >> extra)) {
    throw InvalidArgument(std::string("expected a single integer for ") + what);
  }
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) throw InvalidArgument(std::string("malformed ") + what + " '" + tok + "'");
  return v;
}

}  // namespace

BoundaryPair parse_boundary_text(std::istream& in) {
  std::string line;
  BoundaryPair bp;

  if (!next_content_line(in, line)) throw InvalidArgument("boundary file: missing n");
  bp.n = parse_integer(line, "n");

  if (!next_content_line(in, line)) throw InvalidArgument("boundary file: missing lower crossings line");
  bp.lower_crossings = parse_times(line, "lower");

  if (!next_content_line(in, line)) throw InvalidArgument("boundary file: missing upper cap");
  {
    std::istringstream is(line);
    std::string tok;
    is >> tok;
    if (tok == "inf" || tok == "Inf" || tok == "INF") {
      std::string extra;
      if (is >> extra) throw InvalidArgument("expected a single value for upper cap");
      bp.upper_initial_cap = kUnboundedCap;
    } else {
      bp.upper_initial_cap = parse_integer(line, "upper cap");
    }
  }

  // The upper crossing line may be missing entirely at end of file.
  if (next_content_line(in, line)) bp.upper_crossings = parse_times(line, "upper");

  while (next_content_line(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw InvalidArgument("boundary file: unexpected content after line 4");
    }
  }

  bp.validate();
  return bp;
}

BoundaryPair load_boundary_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open boundary file '" + path + "'");
  return parse_boundary_text(in);
}

std::string format_boundary_text(const BoundaryPair& bp) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << bp.n << '\n';
  for (std::size_t i = 0; i < bp.lower_crossings.size(); ++i) {
    os << (i ? " " : "") << bp.lower_crossings[i];
  }
  os << '\n';
  if (bp.upper_unbounded()) {
    os << "inf\n";
  } else {
    os << bp.upper_initial_cap << '\n';
  }
  for (std::size_t i = 0; i < bp.upper_crossings.size(); ++i) {
    os << (i ? " " : "") << bp.upper_crossings[i];
  }
  os << '\n';
  return os.str();
}

}  // namespace crossprob
