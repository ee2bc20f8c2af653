#pragma once

#include <stdexcept>
#include <string>

namespace rgg {

/// Raised when a caller violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a requested order or size exceeds what an operation supports
/// (e.g. joint cumulants of order > 8, walk enumeration above budget).
class UnsupportedOrder : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical routine did not reach its target accuracy.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double achieved_tolerance);
  double achieved_tolerance() const noexcept { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

}  // namespace rgg
