#pragma once

#include <stdexcept>
#include <string>

namespace tentomo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes (dimension, rank, pair structure) do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument violates an operation's precondition (slot out of range,
/// k > m, r > k + 1, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A field has fewer classical derivatives left than an operator needs.
class SmoothnessBudgetError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Exact polynomial arithmetic grew past the term-count guardrail.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// A linear system that must be uniquely solvable is singular.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

}  // namespace tentomo
