#pragma once

#include <stdexcept>
#include <string>

namespace periodbench {

/// A configuration that cannot be evaluated (e.g. a period longer than the horizon).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures that happen while a filter is running and that the
/// Monte Carlo driver counts as failed runs instead of aborting.
class FilterFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Innovation covariance could not be factorized.
class NumericalFailure : public FilterFailure {
 public:
  using FilterFailure::FilterFailure;
};

/// Every particle weight is zero or non-finite after a likelihood update.
class DegenerateWeights : public FilterFailure {
 public:
  explicit DegenerateWeights(int step)
      : FilterFailure("degenerate particle weights at step " + std::to_string(step)), step_(step) {}

  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace periodbench
