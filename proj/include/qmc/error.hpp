#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or configuration from the caller (CLI exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// The model itself is ill-defined at some state: negative or non-finite
/// rate, division by zero in a rate expression, transition leaving Z_+^d
/// through a constructor contract (CLI exit code 3).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A rate is too large to represent (+inf in double precision).
class RateOverflowError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Requested computation exceeds configured resource caps.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied function produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::string message, std::size_t line, std::size_t column,
              std::vector<std::string> expected = {});

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

}  // namespace qmc
