#pragma once

#include <stdexcept>
#include <string>

namespace fbheat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments of an operation was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A field was evaluated at (or a grid cell contains) a declared singular point.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap before reaching tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_value)
      : Error(what), last_value_(last_value) {}
  double last_value() const noexcept { return last_value_; }

 private:
  double last_value_;
};

/// The discretization lost too much mass through the outer boundary.
class BoundaryLeakError : public Error {
 public:
  using Error::Error;
};

/// Two routes that must agree by construction disagree; signals an estimator bug.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A verification check failed beyond its tolerance.
class CheckFailure : public Error {
 public:
  using Error::Error;
};

/// A scenario contradicts the hypotheses of its declared regime.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fbheat
