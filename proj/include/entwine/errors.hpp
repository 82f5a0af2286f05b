#pragma once

#include <stdexcept>
#include <string>

namespace entwine {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension or length mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be Hermitian is not, within tolerance.
class HermiticityError : public Error {
 public:
  using Error::Error;
};

/// A state or operator is not normalized where normalization is required.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Input is degenerate (e.g. a zero vector where a direction is needed).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A bounded search terminated without meeting its acceptance threshold.
class SearchFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace entwine
