// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "curvlab/conditions.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab::io {

using core::CurvatureTensor;

/// Shortest text for the value that still round-trips, capped at 17
/// significant digits.
std::string format_double(double v);

// ============================================================================
// Tensor file format
// ============================================================================
//
// A JSON document:
//   { "n": 4, "format": "sym-reduced",
//     "entries": [[i, j, k, l, value], ...] }
// with one entry per canonical representative (i<j, k<l, (i,j) <= (k,l)),
// sorted lexicographically, values printed with 17 significant digits.
// The reader completes the symmetry orbits.

std::string write_tensor_string(const CurvatureTensor& r);
CurvatureTensor read_tensor_string(const std::string& text);

void write_tensor_file(const std::string& path, const CurvatureTensor& r);
CurvatureTensor read_tensor_file(const std::string& path);

// ============================================================================
// Reports
// ============================================================================

/// ConditionReport in the shared report layout (cone, margin, minimizer
/// frame rows and weights, restarts, seed), as a JSON object string with a
/// stable field order.
std::string condition_report_json(const conditions::ConditionReport& report);

/// Writes text to the path atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& content);

}  // namespace curvlab::io
