#pragma once

#include <stdexcept>
#include <string>

namespace magwell {

/// Bad caller input: violated preconditions, malformed files, invalid parameters.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to meet its contract (non-convergence,
/// residual too large, inconsistent cross-check).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace magwell
