#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fewbody {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch between operands (non-square input, unequal dimensions).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite entries where finite ones are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A linear solve was singular, ill-conditioned, or failed its residual check.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Inconsistent model description (bad grid, mass, pair index, potential).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Configuration schema or validation failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Short machine-readable code for an exception, used in report rows.
inline std::string_view error_code(const std::exception& err) {
  if (dynamic_cast<const SolverError*>(&err)) return "solver_error";
  if (dynamic_cast<const DimensionError*>(&err)) return "dimension_error";
  if (dynamic_cast<const NumericError*>(&err)) return "numeric_error";
  if (dynamic_cast<const ModelError*>(&err)) return "model_error";
  if (dynamic_cast<const ConfigError*>(&err)) return "config_error";
  return "error";
}

}  // namespace fewbody
