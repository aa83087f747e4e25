// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "curvlab/errors.hpp"

namespace curvlab::core {

// ============================================================================
// Pair basis: ordered index pairs (i, j) with i < j
// ============================================================================

/// Lexicographic enumeration of the N = n(n-1)/2 index pairs i < j. The pair
/// space doubles as the basis of two-forms e_i ^ e_j used by the curvature
/// operator.
class PairBasis {
 public:
  explicit PairBasis(int n);

  int n() const { return n_; }
  int size() const { return static_cast<int>(pairs_.size()); }

  /// Index of the pair (i, j); requires 0 <= i < j < n.
  int index(int i, int j) const { return lut_[i * n_ + j]; }

  const std::pair<int, int>& pair(int a) const { return pairs_[a]; }

 private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int> lut_;
};

// ============================================================================
// CurvatureTensor
// ============================================================================

struct TensorEntry {
  int i, j, k, l;
  double value;
};

/// Algebraic curvature tensor on R^n in the orthonormal gauge.
///
/// Storage is symmetry-reduced: a symmetric N x N matrix over the pair basis,
/// M(a, b) = R(i, j, k, l) for a = (i<j), b = (k<l). The antisymmetry and
/// pair-interchange symmetries therefore hold exactly by construction; the
/// first Bianchi identity is a residual constraint that is validated or
/// projected (see make_tensor). A dense n^4 component array is kept alongside
/// for the contraction-heavy code paths.
///
/// Instances are immutable after construction and safe to share across
/// threads.
class CurvatureTensor {
 public:
  /// Builds from a symmetric pair-space matrix. Throws WrongDimension /
  /// SpecInvalid on shape or symmetry failures.
  CurvatureTensor(int n, Eigen::MatrixXd pair_matrix);

  static CurvatureTensor zero(int n);

  int dim() const { return n_; }
  const PairBasis& pairs() const { return *basis_; }

  /// Symmetric N x N matrix of canonical components.
  const Eigen::MatrixXd& pair_matrix() const { return m_; }

  /// Component R(i, j, k, l) for arbitrary index order (orbit lookup).
  double component(int i, int j, int k, int l) const {
    return dense_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
  }

  /// Dense row-major n^4 component array.
  const std::vector<double>& dense() const { return dense_; }

  double max_abs() const { return max_abs_; }
  /// Frobenius norm of the canonical (pair-matrix) representation.
  double frobenius() const { return m_.norm(); }

  // --- linear algebra on the curvature space -------------------------------
  CurvatureTensor operator+(const CurvatureTensor& rhs) const;
  CurvatureTensor operator-(const CurvatureTensor& rhs) const;
  CurvatureTensor operator*(double c) const;

  // --- Bianchi identity -----------------------------------------------------
  /// Max |R(i,j,k,l) + R(j,k,i,l) + R(k,i,j,l)| over distinct quadruples
  /// (absolute; divide by max_abs() for the relative residual).
  double bianchi_residual() const;

  /// Orthogonal projection onto the subspace satisfying the first Bianchi
  /// identity (removes the 4-form component).
  CurvatureTensor bianchi_projected() const;

  // --- multilinear evaluation ------------------------------------------------
  /// R(x, y, z, w) by successive contraction.
  double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
              const Eigen::VectorXd& z, const Eigen::VectorXd& w) const;

  /// Gradient of eval with respect to the vector in `slot` (0..3), the other
  /// three slots fixed to a, b, c in slot order.
  Eigen::VectorXd eval_grad(int slot, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b,
                            const Eigen::VectorXd& c) const;

 private:
  int n_;
  std::shared_ptr<const PairBasis> basis_;
  Eigen::MatrixXd m_;
  std::vector<double> dense_;
  double max_abs_ = 0.0;
};

inline CurvatureTensor operator*(double c, const CurvatureTensor& r) {
  return r * c;
}

// ============================================================================
// Construction from explicit entries
// ============================================================================

enum class BianchiMode { Strict, Project };

struct MakeOptions {
  BianchiMode mode = BianchiMode::Strict;
  /// Tolerance for conflicting duplicates inside one symmetry orbit.
  double structural_tol = 1e-12;
  /// Relative Bianchi residual accepted in Strict mode.
  double bianchi_tol = 1e-12;
};

struct MakeResult {
  CurvatureTensor tensor;
  /// Relative Bianchi residual of the raw entry data (before projection).
  double bianchi_residual;
  bool projected;
};

/// Populates a tensor from entries on arbitrary index orders, completing each
/// symmetry orbit. Errors: IndexOutOfRange, SymmetryConflict,
/// BianchiViolation (Strict mode only).
MakeResult make_tensor(int n, const std::vector<TensorEntry>& entries,
                       const MakeOptions& options = {});

// ============================================================================
// Frames and complex vectors
// ============================================================================

/// Ordered orthonormal four-frame {e1, e2, e3, e4} in R^n, n >= 4. Stored as
/// the n x 4 matrix of column vectors; validated on construction.
class Frame4 {
 public:
  explicit Frame4(Eigen::MatrixXd columns, double tol = 1e-12);

  int dim() const { return static_cast<int>(columns_.rows()); }
  const Eigen::MatrixXd& matrix() const { return columns_; }
  Eigen::VectorXd e(int a) const { return columns_.col(a); }

 private:
  Eigen::MatrixXd columns_;
};

/// Element of the complexified tangent space, zeta = re + i im.
struct ComplexVector {
  Eigen::VectorXd re;
  Eigen::VectorXd im;
};

// ============================================================================
// Rotation
// ============================================================================

/// Tensor with all four slots rotated by the orthogonal matrix q:
/// R'(a,b,c,d) = R(q a, q b, q c, q d) on basis vectors (columns of q map the
/// new basis into the old one).
CurvatureTensor rotate(const CurvatureTensor& r, const Eigen::MatrixXd& q);

/// Deterministic completion of k orthonormal columns to a full orthonormal
/// basis of R^n by Gram-Schmidt over the standard basis.
Eigen::MatrixXd complete_basis(const Eigen::MatrixXd& columns);

}  // namespace curvlab::core
