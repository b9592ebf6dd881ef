// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace pf {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed-form design chain: bad inputs or singular formulas.
class DesignError : public Error {
 public:
  using Error::Error;
};

// A design whose electrical length comes out non-positive.
class InfeasibleDesignError : public DesignError {
 public:
  using DesignError::DesignError;
};

// Scene construction and rasterization problems.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Rasterization exceeded the configured cell budget.
class ResourceError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

// Time-domain solver configuration and runtime failures.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Non-finite field value during time stepping. Carries the step index.
class DivergenceError : public SolverError {
 public:
  DivergenceError(const std::string& what, long step)
      : SolverError(what), step_index(step) {}
  long step_index;
};

// Post-processing failures (missing data, energy accounting violations).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace pf
