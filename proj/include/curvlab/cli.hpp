// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/conditions.hpp"

namespace curvlab::cli {

inline constexpr const char* kVersion = "curvlab 0.1.0";

enum class Command {
  Check,
  Evolve,
  Invariance,
  Convergence,
  Boundary,
  Crosscheck,
  EmitModel,
};

/// One batch run. Exactly one of `model` / `input_path` supplies the input
/// (commands that sample internally use neither).
struct ExperimentConfig {
  Command command = Command::Check;
  std::string model;       // model grammar text
  std::string input_path;  // tensor file
  std::vector<std::string> cones;
  double t_end = 0.1;
  int samples = 50;
  int dim = 4;
  double horizon = 10.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_path;
  double rel_tol = 1e-8;
  int restarts = 64;
  core::LambdaRange lambda_range = core::LambdaRange::ZeroOne;
  int verbosity = 1;
  /// evolve: embed full states in the report every k stored steps (0 = off).
  int dump_states_every = 0;
};

struct RunReport {
  int exit_code = 0;  // 0 ok, 2 violations found, 1 error
  std::string document;      // machine-readable report (JSON)
  std::string human_summary; // one-per-line summary for standard output
};

/// Dispatches a config to the corresponding module operation and assembles
/// the report document. The report is deterministic for a fixed config and
/// seed except for the wall_time_ms field.
RunReport run(const ExperimentConfig& config);

}  // namespace curvlab::cli
