#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdl {

/// Operand shapes do not fit the operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix required to be symmetric positive definite is not.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  NotPositiveDefiniteError(const std::string& what, std::size_t pivot)
      : std::runtime_error(what), pivot_(pivot) {}

  /// Index of the first non-positive pivot.
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Invalid argument values (out-of-range hyperparameters, bad labels, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base class for file-format failures.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedFileError : public FormatError {
 public:
  using FormatError::FormatError;
};

class LengthMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string shape_string(std::size_t rows, std::size_t cols);

}  // namespace fdl
