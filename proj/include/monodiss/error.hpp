#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace monodiss {

/// Invalid user-facing configuration. `field()` names the offending entry
/// using the dotted config path (e.g. "grid.N").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Shapes or grids of two operands do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A nonlinear or time-stepping solve did not converge.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& message, std::vector<double> residual_history = {})
      : std::runtime_error(message), history_(std::move(residual_history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// An experiment refused to produce a result because its preconditions
/// (ensemble spread, horizon length, ...) are not met.
class Refusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace monodiss
