#pragma once

#include <stdexcept>
#include <string>

namespace sumnorm {

// Bad user-facing input (summary statistics, priors, configuration).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not produce a usable value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Truncation interval lies so deep in one tail that its probability mass
// is not representable even in log space.
class FarTailError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sumnorm
