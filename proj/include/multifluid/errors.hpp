#pragma once

#include <stdexcept>
#include <string>

namespace multifluid {

/// Argument outside the mathematical domain of an operation (e.g. negative density).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input data violates a documented invariant. `path` names the offending field.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string path, const std::string& message)
      : std::invalid_argument(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Viscosity matrix is singular or not positive definite.
class InadmissibleMatrixError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A block pivot in the block-tridiagonal elimination could not be factored.
class SingularPivotError : public std::runtime_error {
 public:
  SingularPivotError(const std::string& message, long block)
      : std::runtime_error(message), block_(block) {}
  long block() const noexcept { return block_; }

 private:
  long block_;
};

/// The explicit stage produced a nonpositive density; the caller retries with a smaller step.
class TimestepRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Lagrangian specific volume no longer integrates to the unit interval.
class MassConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace multifluid
