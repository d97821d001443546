#pragma once

#include <stdexcept>
#include <string>

namespace suffreduce {

/// Invalid arguments: shape mismatches, out-of-range parameters, malformed input.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration or feasibility routine was asked for a dimension above its hard limit.
class LimitExceeded : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative kernel (eigensolver sweeps, bisection) ran out of budget.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The estimator has an empty solution set for this input (e.g. unpenalized
/// Gaussian likelihood with a singular covariance).
class NoSolution : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace suffreduce
