#pragma once

#include <stdexcept>
#include <string>

namespace bincat {

/// Raised when an argument lies outside the domain of an operation
/// (invalid model parameters, a tilt that is not a proper chain, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation cannot deliver a result within its stated
/// error bound: unstable recursions, oracles whose bracket is too wide,
/// Monte Carlo estimates with too few retained samples.
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bincat
