#pragma once

#include <stdexcept>
#include <string>

namespace uwloc {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user-supplied data: out-of-range fields, malformed scenario files.
/// The CLI maps this family to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A required input is structurally missing or inconsistent.
class InputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Too few distinct anchors to fix a 3-D position.
class UnderdeterminedError : public InputError {
 public:
  using InputError::InputError;
};

/// Argument outside the domain of an empirical formula or conversion.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Depth or position outside the water column.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The ray between two points would have to turn before reaching the
/// requested horizontal range.
class NoDirectPathError : public Error {
 public:
  using Error::Error;
};

/// Path shorter than the 1 m spreading reference distance.
class ReferenceDistanceError : public Error {
 public:
  using Error::Error;
};

}  // namespace uwloc
