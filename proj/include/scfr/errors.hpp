#pragma once

#include <stdexcept>
#include <string>

namespace scfr {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller-supplied input: malformed files, wrong shapes, invalid
/// parameters. The CLI maps this family to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A spline domain that cannot carry a knot vector (lo >= hi, knot outside).
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

/// Matrix/vector dimensions that do not line up.
class StructuralError : public InputError {
 public:
  using InputError::InputError;
};

/// Dataset ingestion and split failures.
class DataError : public InputError {
 public:
  using InputError::InputError;
};

/// Malformed model or prediction documents.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

/// Non-finite values produced during fitting or evaluation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace scfr
