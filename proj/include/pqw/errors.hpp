#pragma once

#include <stdexcept>
#include <string>

namespace pqw {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed graph files, disconnected base graphs,
// out-of-range marked vertices, inconsistent configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A structural invariant does not hold (non-stochastic rows, etc.).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// A bound or spectral quantity is infinite / undefined for the input.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration would exceed the configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace pqw
