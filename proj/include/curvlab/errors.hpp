// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace curvlab {

/// Base class for all curvlab errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};
struct SymmetryConflict : Error {
  using Error::Error;
};
struct BianchiViolation : Error {
  using Error::Error;
};
struct DegeneratePlane : Error {
  using Error::Error;
};
struct BadFrame : Error {
  using Error::Error;
};
struct RangeViolation : Error {
  using Error::Error;
};
struct WrongDimension : Error {
  using Error::Error;
};
struct OptimizerDiverged : Error {
  using Error::Error;
};
struct NonpositiveCurvature : Error {
  using Error::Error;
};
struct NotInCone : Error {
  using Error::Error;
};
struct HypothesisViolated : Error {
  using Error::Error;
};
struct BisectionFailed : Error {
  using Error::Error;
};
struct SpecInvalid : Error {
  using Error::Error;
};
struct ConstraintConstructionFailed : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct InputError : Error {
  using Error::Error;
};

/// Model-grammar parse failure; carries the byte offset of the problem.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

}  // namespace curvlab
