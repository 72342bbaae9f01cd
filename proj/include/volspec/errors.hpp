#pragma once

#include <stdexcept>
#include <string>

namespace volspec {

/// Argument outside the mathematical domain of an operation (t outside [0,1],
/// nonpositive variance, alpha outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent configuration: grid/observation mismatch, dimension mismatch,
/// malformed curve spec or config file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A statistical procedure could not produce a value from the data it was
/// given (empty smoothing window, singular local design).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace volspec
