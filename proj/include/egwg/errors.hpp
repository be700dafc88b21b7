#pragma once

#include <stdexcept>
#include <string>

namespace egwg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (x < 0, q >= 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions before reaching the tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// The integrand produced NaN.
class InvalidIntegrand : public Error {
 public:
  using Error::Error;
};

/// Root target outside the range of the function, or bracket expansion overflowed.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// A finite-difference stencil point evaluated to a non-finite value.
class StencilError : public Error {
 public:
  StencilError(const std::string& what, std::size_t coordinate)
      : Error(what), coordinate_(coordinate) {}
  std::size_t coordinate() const noexcept { return coordinate_; }

 private:
  std::size_t coordinate_;
};

/// Survival (right tail) or cdf (left tail) is not representable at the argument.
class TailError : public Error {
 public:
  TailError(const std::string& what, double limit) : Error(what), limit_(limit) {}
  /// For right-tail errors, the largest x at which the tail is still representable.
  double limit() const noexcept { return limit_; }

 private:
  double limit_;
};

/// A negative or non-finite variance on the covariance diagonal.
class DegenerateInformation : public Error {
 public:
  DegenerateInformation(const std::string& what, std::size_t coordinate)
      : Error(what), coordinate_(coordinate) {}
  std::size_t coordinate() const noexcept { return coordinate_; }

 private:
  std::size_t coordinate_;
};

}  // namespace egwg
