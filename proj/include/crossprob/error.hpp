#pragma once

#include <stdexcept>
#include <string>

namespace crossprob {

// Malformed boundaries, samples, or parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// A computation produced a value outside its mathematically allowed range
// (large negative FFT output, probability above one, non-monotone p-values).
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crossprob
