// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

#include "curvlab/tensor.hpp"

namespace curvlab::core {

/// Admissible weight interval for the product-condition quantities.
enum class LambdaRange { ZeroOne, SymmetricOne };

inline double lambda_lo(LambdaRange r) {
  return r == LambdaRange::ZeroOne ? 0.0 : -1.0;
}
constexpr double lambda_hi = 1.0;

// ============================================================================
// Contractions
// ============================================================================

/// Ricci contraction Ric(X, Y) = sum_k R(X, e_k, Y, e_k) as a symmetric
/// n x n matrix in the standard basis.
Eigen::MatrixXd ricci(const CurvatureTensor& r);

/// Scalar curvature, the trace of the Ricci contraction.
double scalar(const CurvatureTensor& r);

// ============================================================================
// Sectional curvature
// ============================================================================

/// K(span{x, y}) = R(x,y,x,y) / (|x|^2 |y|^2 - <x,y>^2). Basis-independent;
/// throws DegeneratePlane when the Gram determinant is below 1e-14.
double sectional(const CurvatureTensor& r, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y);

// ============================================================================
// Isotropic-curvature family
// ============================================================================

/// R1313 + R1414 + R2323 + R2424 - 2 R1234 in the frame f.
double isotropic_quantity(const CurvatureTensor& r, const Frame4& f);

/// R1313 + l^2 R1414 + R2323 + l^2 R2424 - 2 l R1234; the lambda-weighted
/// quantity whose nonnegativity over frames and weights characterizes
/// nonnegative isotropic curvature of the product with a line.
double pic1_quantity(const CurvatureTensor& r, const Frame4& f, double lambda,
                     LambdaRange range = LambdaRange::ZeroOne);

/// R1313 + l^2 R1414 + m^2 R2323 + l^2 m^2 R2424 - 2 l m R1234; the
/// two-weight quantity for the product with a plane.
double pic2_quantity(const CurvatureTensor& r, const Frame4& f, double lambda,
                     double mu, LambdaRange range = LambdaRange::ZeroOne);

/// The five frame components (R1313, R1414, R2323, R2424, R1234) that every
/// quantity in the family is assembled from.
struct FrameComponents {
  double s13, s14, s23, s24, s1234;
};
FrameComponents frame_components(const CurvatureTensor& r, const Frame4& f);

inline double isotropic_from(const FrameComponents& c) {
  return c.s13 + c.s14 + c.s23 + c.s24 - 2.0 * c.s1234;
}
inline double pic1_from(const FrameComponents& c, double l) {
  return c.s13 + c.s23 + l * l * (c.s14 + c.s24) - 2.0 * l * c.s1234;
}
inline double pic2_from(const FrameComponents& c, double l, double m) {
  return c.s13 + l * l * c.s14 + m * m * c.s23 + l * l * m * m * c.s24 -
         2.0 * l * m * c.s1234;
}

// ============================================================================
// Complexified evaluation
// ============================================================================

/// R(zeta, eta, conj(zeta), conj(eta)) under the complex multilinear
/// extension. The slot pattern makes the value real (imaginary part is
/// roundoff only).
std::complex<double> complexify_eval(const CurvatureTensor& r,
                                     const ComplexVector& zeta,
                                     const ComplexVector& eta);

// ============================================================================
// Curvature operator
// ============================================================================

/// Symmetric N x N matrix A of the quadratic form on two-forms, normalized so
/// that for phi = sum_{i<j} c_ij e_i^e_j the full four-index sum
/// sum_{ijkl} R_ijkl phi^ij phi^kl equals c^T A c.
Eigen::MatrixXd operator_matrix(const CurvatureTensor& r);

// ============================================================================
// Dimension-4 decomposition
// ============================================================================

struct Dim4Decomposition {
  double scalar_part;               // scal
  Eigen::MatrixXd traceless_ricci;  // Ric - (scal/4) g
  CurvatureTensor weyl;
  double weyl_norm_sq;  // full quadruple-index sum of W_ijkl^2
  double gb_integrand;  // (1/6) scal^2 - 2 |Ric0|^2 + |W|^2
};

/// Orthogonal decomposition of a 4-dimensional curvature tensor into scalar,
/// traceless-Ricci and Weyl parts (Kulkarni-Nomizu recomposition); throws
/// WrongDimension unless n == 4.
Dim4Decomposition dim4_decompose(const CurvatureTensor& r);

/// Rebuilds the tensor from the three parts of a decomposition.
CurvatureTensor dim4_recompose(const Dim4Decomposition& d);

/// Kulkarni-Nomizu product of two symmetric matrices, as a curvature tensor.
CurvatureTensor kulkarni_nomizu(const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& b);

}  // namespace curvlab::core
