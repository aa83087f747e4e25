// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "curvlab/conditions.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab::models {

using conditions::ConeId;
using core::CurvatureTensor;

// ============================================================================
// Model specifications
// ============================================================================

/// Symbolic description of a model geometry. Canonical text forms:
///   const(4,1)                      constant curvature kappa on R^4
///   fs(2)                           Fubini-Study on R^{2m}, K in [1,4]
///   prod(const(2,1),const(2,1))     product tensor, mixed components zero
///   flat(const(4,1),1)              product with a flat R^k factor
///   rand(5,seed=7,scale=0.3)        Bianchi-projected random tensor
///   shift(rand(4,3,1),pic,0)        shifted to a target cone margin
struct ModelSpec {
  enum class Kind {
    ConstantCurvature,
    FubiniStudy,
    Product,
    FlatExtend,
    Random,
    Shifted,
  };

  Kind kind = Kind::ConstantCurvature;
  int n = 0;          // ConstantCurvature, Random
  double kappa = 1.0; // ConstantCurvature
  int m = 0;          // FubiniStudy
  int flat_dims = 0;  // FlatExtend
  std::uint64_t seed = 0;
  double scale = 1.0;           // Random
  ConeId cone;                  // Shifted
  double target_margin = 0.0;   // Shifted
  std::shared_ptr<ModelSpec> a; // Product left / FlatExtend / Shifted inner
  std::shared_ptr<ModelSpec> b; // Product right

  int total_dim() const;

  static ModelSpec constant(int n, double kappa);
  static ModelSpec fubini_study(int m);
  static ModelSpec product(ModelSpec a, ModelSpec b);
  static ModelSpec flat_extend(ModelSpec a, int k);
  static ModelSpec random(int n, std::uint64_t seed, double scale);
  static ModelSpec shifted(ModelSpec inner, ConeId cone, double target);
};

/// Builds the curvature tensor of a model. Deterministic per spec and seed.
/// Throws SpecInvalid for malformed specs.
CurvatureTensor build(const ModelSpec& spec,
                      const conditions::MarginOptions& options = {});

// ============================================================================
// Random and shifted families
// ============================================================================

/// Uniform [-scale, scale] on canonical components, then Bianchi-projected.
CurvatureTensor random_tensor(int n, std::uint64_t seed, double scale);

struct ShiftResult {
  CurvatureTensor tensor;
  double shift = 0.0;            // coefficient of the constant-curvature term
  conditions::ConditionReport certificate;
  bool near_degenerate_minimizer = false;
};

/// R + c * R_const with the smallest c >= 0 achieving the target cone margin.
/// Eigenvalue-type cones shift in closed form; the isotropic family uses
/// bisection to width 1e-10 with a warm-started margin evaluator and a final
/// full-budget certification. Throws BisectionFailed if margin readings stay
/// inconsistent after a budget retry.
ShiftResult shift_into_cone(const CurvatureTensor& r, const ConeId& cone,
                            double target_margin,
                            const conditions::MarginOptions& options = {});

// ============================================================================
// Text form
// ============================================================================

ModelSpec parse_model(const std::string& text);  // throws ParseError
std::string print_model(const ModelSpec& spec);

}  // namespace curvlab::models
