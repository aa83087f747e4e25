// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "curvlab/conditions.hpp"
#include "curvlab/ode.hpp"

namespace curvlab::flow {

using conditions::ConeId;
using conditions::MarginOptions;

// ============================================================================
// Cone invariance along the reaction ODE
// ============================================================================

struct InvarianceConfig {
  ConeId cone = ConeId::pic();
  int samples = 50;
  int dim = 4;
  double horizon = 10.0;
  StepControl control{};
  std::uint64_t seed = 1;
  /// Target margin (relative to the random tensor's max-norm) that the
  /// sampled starts are shifted to; they must be strictly inside the cone.
  double strict_level = 0.2;
  /// When false, raw random tensors are used; those outside the cone are
  /// flagged and skipped rather than integrated.
  bool shift_samples = true;
  int checkpoints = 16;
  MarginOptions margin_options{};
};

struct InvarianceRun {
  int sample = 0;
  bool outside_cone = false;  // rejected input (no invariance claim)
  double initial_margin = 0.0;
  double min_margin = 0.0;             // over checkpoints
  double min_margin_normalized = 0.0;  // margin / state max-norm
  double min_at_t = 0.0;
  double integrated_to = 0.0;
  FlowStatus status = FlowStatus::ReachedEnd;
  bool violation = false;
};

struct InvarianceReport {
  InvarianceConfig config;
  std::vector<InvarianceRun> runs;
  int violations = 0;
  int outside_cone = 0;
};

/// Integrates sampled strict-interior starts to min(horizon, 90% of the
/// detected blowup) and records the minimum cone margin along each
/// trajectory. A violation is a margin below -1e-6 times the state norm.
InvarianceReport invariance_experiment(const InvarianceConfig& config);

// ============================================================================
// Pinching convergence along the normalized flow
// ============================================================================

struct ConvergenceConfig {
  StepControl control{};
  int checkpoints = 32;
  double ratio_threshold = 0.99;
  MarginOptions margin_options{};
};

struct ConvergencePoint {
  double t = 0.0;
  double pinching_ratio = 0.0;
  double ray_distance = 0.0;  // |R/scal - R_const/scal_const| (Frobenius)
};

struct ConvergenceReport {
  double initial_cone_margin = 0.0;
  /// Margin within the strictness band of zero: the run is a boundary
  /// diagnostic (Einstein models), not a convergence claim.
  bool boundary_start = false;
  std::vector<ConvergencePoint> series;
  bool ratio_exceeded_threshold = false;
  double final_ray_distance = 0.0;
  /// Ray distance non-increasing over the final quarter of the recorded run.
  bool ray_monotone_final_quarter = false;
  FlowStatus status = FlowStatus::ReachedEnd;
  double blowup_estimate = 0.0;
};

/// Tracks the pointwise pinching ratio and the distance to the
/// constant-curvature ray along the flow of a strictly Pic2 start.
/// Throws NotInCone when the start is not strictly inside.
ConvergenceReport convergence_experiment(const CurvatureTensor& r0,
                                         const ConvergenceConfig& config);

// ============================================================================
// Dimension-3 interior estimate monitor
// ============================================================================

struct InteriorEstimatePoint {
  double t = 0.0;
  double q = 0.0;  // |Ric0|^2 / ((3/2t)^sigma scal^(2-sigma)), sigma = rho^2
  bool exceeds = false;
};

/// Evaluates the interior-estimate quotient along a 3-dimensional raw
/// trajectory whose states satisfy Ric >= rho scal g >= 0; throws
/// WrongDimension or HypothesisViolated otherwise.
std::vector<InteriorEstimatePoint> interior_estimate_monitor(
    const FlowTrajectory& trajectory, double rho);

}  // namespace curvlab::flow
