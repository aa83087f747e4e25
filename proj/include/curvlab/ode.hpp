// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "curvlab/tensor.hpp"

namespace curvlab::flow {

using core::CurvatureTensor;
using core::Frame4;

// ============================================================================
// The quadratic reaction term Q(R)
// ============================================================================

/// Q(R)(X,Y,Z,W) = sum_pq R(X,Y,ep,eq) R(Z,W,ep,eq)
///              + 2 sum_pq R(X,ep,Z,eq) R(Y,ep,W,eq)
///              - 2 sum_pq R(X,ep,W,eq) R(Y,ep,Z,eq).
/// Contraction-reordered evaluation (pair-matrix square plus two n^2 x n^2
/// Gram products); must match q_tensor_reference to 1e-12 relative.
CurvatureTensor q_tensor(const CurvatureTensor& r);

/// Componentwise direct summation; the reference implementation.
CurvatureTensor q_tensor_reference(const CurvatureTensor& r);

// ============================================================================
// Integration
// ============================================================================

enum class StepMethod { RK4, RK45 };

struct Normalization {
  enum class Kind { None, FixedScal };
  Kind kind = Kind::None;
  double target = 0.0;
};

struct StepControl {
  StepMethod method = StepMethod::RK45;
  double h_init = 1e-3;
  double rel_tol = 1e-8;
  int max_steps = 200000;
  Normalization normalize{};
  double h_min = 1e-12;    // step underflow => blowup
  double norm_cap = 1e12;  // max-norm cap => blowup
};

enum class FlowStatus { ReachedEnd, BlowupReached, MaxStepsExceeded };

struct FlowSample {
  double t;
  double scal;
  double norm_inf;
  double step;
};

/// Time-stamped states of dR/dt = Q(R). States are stored raw; when a
/// fixed-scal normalization is configured, state_normalized() rescales at
/// read time (the predicates commute with rescaling by homogeneity, and the
/// raw trajectory stays the source of truth).
struct FlowTrajectory {
  std::vector<double> times;
  std::vector<CurvatureTensor> states;
  std::vector<FlowSample> diagnostics;
  FlowStatus status = FlowStatus::ReachedEnd;
  double blowup_estimate = 0.0;  // valid when status == BlowupReached
  int steps_taken = 0;
  int bianchi_reprojections = 0;
  Normalization normalization{};

  CurvatureTensor state_normalized(std::size_t index) const;
};

/// Integrates the reaction ODE from r0 to t_end. Blowup (step underflow or
/// norm cap) and step exhaustion are reported through the trajectory status
/// together with the last finite state; the blowup time estimate comes from
/// a linear fit of 1/|R| over the trailing samples.
FlowTrajectory integrate(const CurvatureTensor& r0, double t_end,
                         const StepControl& control);

// ============================================================================
// Boundary diagnostics
// ============================================================================

/// Q(R)_1313 + Q(R)_1414 + Q(R)_2323 + Q(R)_2424 - 2 Q(R)_1234 evaluated in
/// the frame f. Nonnegative when R has nonnegative isotropic curvature and f
/// is a vanishing frame.
double boundary_inward_value(const CurvatureTensor& r, const Frame4& f);

struct KeyInequalityReport {
  double lhs = 0.0;        // sum (R1p1q+R2p2q)(R3p3q+R4p4q) - sum R12pq R34pq
  double rhs = 0.0;        // the two cross Gram sums
  double residual = 0.0;   // lhs - rhs
  // Partial residuals over the index blocks: both p,q in the frame, one in
  // the frame and one in the completion, both in the completion.
  double block_frame = 0.0;
  double block_mixed = 0.0;
  double block_tail = 0.0;
  // First-variation identities at an isotropic minimizer:
  // R1213 + R1242 + R3413 + R3442 and its companion (frame rotations), and
  // R133q + R144q + R432q with its companions for q >= 5.
  double step1_residual = 0.0;
  double step2_residual = 0.0;
};

/// Evaluates the key inequality in the orthonormal basis obtained by
/// completing f with deterministic Gram-Schmidt over the standard basis.
KeyInequalityReport key_inequality_residual(const CurvatureTensor& r,
                                            const Frame4& f);

}  // namespace curvlab::flow
