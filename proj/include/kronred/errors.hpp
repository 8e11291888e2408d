// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace kronred {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, parameters, invariant
/// violations detected up front). CLI maps this to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

/// Structural defect in a network description (duplicate branch,
/// disconnected phase, non-radial graph, ...).
struct StructuralError : ValidationError {
  using ValidationError::ValidationError;
};

/// Bad configuration / parameters.
struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

/// Numerical failure in a linear solve. CLI maps this to exit code 3.
struct SolverError : Error {
  SolverError(const std::string& msg, double smallest_pivot_in = 0.0, int node_in = -1)
      : Error(msg), smallest_pivot(smallest_pivot_in), node(node_in) {}
  double smallest_pivot;
  int node;
};

}  // namespace kronred
