#pragma once

#include <stdexcept>
#include <string>

namespace erodewave {

/// Input violates a model hypothesis or a precondition of an operation.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a function (e.g. z outside [0,1]).
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Root finder failed, time step underflow, or a similar numerical breakdown.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace erodewave
