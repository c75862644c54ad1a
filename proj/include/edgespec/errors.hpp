#pragma once

#include <stdexcept>
#include <string>

namespace edgespec {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (e.g. x <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bad sizes, orderings or parameter ranges supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Result not representable in double precision; the message names the
// scaled entry point to use instead.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Order below the configured floor 3/2 + delta_min, or a fiber spectrum
// meeting [-gap, gap].
class WittViolation : public Error {
 public:
  using Error::Error;
};

// Iteration failed to converge or a discrete system was singular.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition (support, argument order, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (empty spectrum, non-PSD matrix, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace edgespec
