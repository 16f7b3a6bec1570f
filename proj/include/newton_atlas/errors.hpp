#pragma once

#include <stdexcept>
#include <string>

namespace newton_atlas {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (degree too small, epsilon out of range, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidDegree : public InvalidArgument {
 public:
  explicit InvalidDegree(int degree)
      : InvalidArgument("degree must be >= 2, got " + std::to_string(degree)) {}
};

/// Input violates a Polynomial invariant (non-monic, root outside the unit disk, ...).
class InvalidPolynomial : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Coefficient-form evaluation overflowed; switch to root form.
class EvaluationOverflow : public Error {
 public:
  using Error::Error;
};

/// p'(z) == 0 while p(z) != 0.
class CriticalPoint : public Error {
 public:
  using Error::Error;
};

/// classify_sk called with a point that coincides with a root.
class NotClassifiable : public Error {
 public:
  using Error::Error;
};

class OutOfValidityRange : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Malformed JSON/CSV input. The message carries the line or field at fault.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace newton_atlas
