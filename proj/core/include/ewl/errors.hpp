#pragma once

#include <stdexcept>
#include <string>

namespace ewl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid would exceed the configured leaf cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A cube or rectangle was used at a scale where the operation is undefined.
class ScaleError : public Error {
 public:
  using Error::Error;
};

/// Invalid input value (non-positive weight, mismatched grids, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operator norm requested for a measure with no charged leaf.
class UndefinedNormError : public Error {
 public:
  using Error::Error;
};

/// Kernel table violates the size or constancy condition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Haar-scale decomposition left a nonvanishing residual.
class DecompositionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or serialized document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ewl
