// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/frame_opt.hpp"
#include "curvlab/quantities.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab::conditions {

using core::CurvatureTensor;
using core::Frame4;
using core::LambdaRange;

// ============================================================================
// Cones
// ============================================================================

enum class ConeKind {
  SecNonneg,
  Pic,
  Pic1,
  Pic2,
  TwoPositive,
  OperatorNonneg,
  PointwisePinched,  // delta
  RicPinched,        // rho
  Pic1ScalMargin,    // rho
  Pic2ScalMargin,    // rho, lambda range defaults to [-1, 1]
};

struct ConeId {
  ConeKind kind = ConeKind::Pic;
  double delta = 0.0;
  double rho = 0.0;
  LambdaRange range = LambdaRange::ZeroOne;

  static ConeId sec_nonneg() { return {ConeKind::SecNonneg}; }
  static ConeId pic() { return {ConeKind::Pic}; }
  static ConeId pic1(LambdaRange r = LambdaRange::ZeroOne) {
    return {ConeKind::Pic1, 0, 0, r};
  }
  static ConeId pic2(LambdaRange r = LambdaRange::ZeroOne) {
    return {ConeKind::Pic2, 0, 0, r};
  }
  static ConeId two_positive() { return {ConeKind::TwoPositive}; }
  static ConeId operator_nonneg() { return {ConeKind::OperatorNonneg}; }
  static ConeId pointwise_pinched(double delta);
  static ConeId ric_pinched(double rho);
  static ConeId pic1_scal_margin(double rho);
  static ConeId pic2_scal_margin(double rho,
                                 LambdaRange r = LambdaRange::SymmetricOne);

  /// Canonical text form, the inverse of parse_cone.
  std::string name() const;
  /// True for the cones whose defining quantity needs four-frames.
  bool needs_frames() const;
  bool is_isotropic_family() const {
    return kind == ConeKind::Pic || kind == ConeKind::Pic1 ||
           kind == ConeKind::Pic2 || kind == ConeKind::Pic1ScalMargin ||
           kind == ConeKind::Pic2ScalMargin;
  }
};

/// Parses a cone token: sec | pic | pic1 | pic2 | 2pos | op | pinch |
/// pinch(d) | ricpinch(r) | pic1scal(r) | pic2scal(r). Throws ParseError.
ConeId parse_cone(const std::string& text);

// ============================================================================
// Reports
// ============================================================================

/// Certifying minimizer of a cone margin: a frame plus weights for the
/// isotropic family, a two-form for the operator cones, a plane or vector for
/// the eigenvalue/sectional cones.
struct Certificate {
  std::optional<Eigen::MatrixXd> frame;  // n x 4
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<Eigen::VectorXd> two_form;    // pair-basis coordinates
  std::optional<Eigen::VectorXd> two_form_b;  // second form (two-positivity)
  std::optional<Eigen::MatrixXd> plane;       // n x 2
  std::optional<Eigen::MatrixXd> plane_b;     // K_max plane (pinching)
  std::optional<Eigen::VectorXd> vector;
};

struct ConditionReport {
  ConeId cone;
  double margin = 0.0;
  Certificate minimizer;
  int restarts_used = 0;
  bool converged = false;
  bool degenerate = false;  // zero tensor
  /// Set when converged restarts found a distinct minimizer within 1e-4 of
  /// the margin (certificates are then not unique).
  bool ambiguous_minimizer = false;
  std::uint64_t seed = 0;
};

struct MarginOptions {
  int restarts = 64;
  int max_iterations = 400;
  double stationarity_tol = 1e-10;
  std::uint64_t seed = 0x5eed;
  std::vector<Eigen::MatrixXd> warm_starts;
};

/// Scale-aware strictness threshold: membership is strict when
/// margin > 1e-8 * max-norm.
inline double strictness_threshold(const CurvatureTensor& r) {
  return 1e-8 * r.max_abs();
}

// ============================================================================
// Operations
// ============================================================================

struct SectionalExtremes {
  double k_min = 0.0;
  double k_max = 0.0;
  Eigen::MatrixXd plane_min;  // n x 2
  Eigen::MatrixXd plane_max;
  int restarts_used = 0;
  bool converged = false;
};

/// Extremal sectional curvatures over the Grassmannian of 2-planes by
/// multi-start optimization over orthonormal pairs.
SectionalExtremes sectional_extremes(const CurvatureTensor& r,
                                     const MarginOptions& options = {});

/// K_min / K_max; throws NonpositiveCurvature when K_max <= 0.
double pointwise_pinching_ratio(const CurvatureTensor& r,
                                const MarginOptions& options = {});
double pointwise_pinching_ratio(const SectionalExtremes& extremes);

/// Global minimum of the cone's defining quantity over its admissible set.
ConditionReport cone_margin(const CurvatureTensor& r, const ConeId& cone,
                            const MarginOptions& options = {});

/// Re-evaluates a report's certificate through the defining quantity.
double evaluate_certificate(const CurvatureTensor& r,
                            const ConditionReport& report);

struct ImplicationVerdict {
  ConditionReport stronger;
  ConditionReport weaker;
  bool lattice_violation = false;
};

/// Flags a lattice violation when the stronger margin is strictly positive
/// while the weaker is negative beyond tolerance.
ImplicationVerdict implication_check(const CurvatureTensor& r,
                                     const ConeId& stronger,
                                     const ConeId& weaker,
                                     const MarginOptions& options = {});

struct BergerReport {
  double residual = 0.0;       // (2/3)(K_max - K_min) - max |R1234|
  double bound = 0.0;          // (2/3)(K_max - K_min)
  double max_component = 0.0;  // max over frames of |R(e1,e2,e3,e4)|
  SectionalExtremes extremes;
};

/// Residual of the inequality |R(e1,e2,e3,e4)| <= (2/3)(K_max - K_min).
BergerReport berger_bound_residual(const CurvatureTensor& r,
                                   const MarginOptions& options = {});

struct QuarterPinchChain {
  double lhs;
  double rhs_identity;
};

/// Both sides of the algebraic identity
/// (1 + l^2 + m^2 + l^2 m^2) K_min - (4/3) l m (K_max - K_min)
///   = ((1 - l m)^2 + (l - m)^2) K_min + (4/3) l m (4 K_min - K_max).
QuarterPinchChain quarter_pinch_chain(double lambda, double mu, double k_min,
                                      double k_max);

struct CrosscheckVerdict {
  double frame_margin = 0.0;
  double min_sample = 0.0;        // minimum complexified value over samples
  double worst_discrepancy = 0.0; // min_sample - frame_margin (>= -tol)
  bool sign_agreement = false;
  int samples = 0;
};

/// Samples complex vector pairs satisfying the cone's algebraic constraint
/// (frame-and-weight parametrizations) and confirms sign agreement with the
/// frame formulation. The certificate frame is always included as a sample.
CrosscheckVerdict complex_condition_crosscheck(const CurvatureTensor& r,
                                               const ConeId& cone, int samples,
                                               std::uint64_t seed,
                                               const MarginOptions& options = {});

// ============================================================================
// Frame-family internals shared with the flow experiments
// ============================================================================

/// Minimum of the weighted quantity over the admissible weights for a fixed
/// frame, with the minimizing weights. For Pic the weights are fixed at 1.
struct WeightedMin {
  double value;
  double lambda;
  double mu;
};
WeightedMin minimize_weights(const core::FrameComponents& c, const ConeId& cone);

}  // namespace curvlab::conditions
