// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/tensor.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace curvlab::core {

PairBasis::PairBasis(int n) : n_(n) {
  if (n < 2) throw WrongDimension("PairBasis requires n >= 2");
  pairs_.reserve(n * (n - 1) / 2);
  lut_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      lut_[i * n + j] = static_cast<int>(pairs_.size());
      pairs_.emplace_back(i, j);
    }
  }
}

namespace {

// Canonical cell and sign of an index quadruple: sorts each pair (sign flips)
// and orders the two pairs lexicographically. Returns {a, b, sign}; sign = 0
// when a repeated index forces the component to vanish.
struct CanonicalCell {
  int a, b;
  double sign;
};

CanonicalCell canonicalize(const PairBasis& basis, int i, int j, int k,
                           int l) {
  if (i == j || k == l) return {0, 0, 0.0};
  double sign = 1.0;
  if (i > j) {
    std::swap(i, j);
    sign = -sign;
  }
  if (k > l) {
    std::swap(k, l);
    sign = -sign;
  }
  int a = basis.index(i, j);
  int b = basis.index(k, l);
  if (a > b) std::swap(a, b);
  return {a, b, sign};
}

}  // namespace

CurvatureTensor::CurvatureTensor(int n, Eigen::MatrixXd pair_matrix)
    : n_(n), basis_(std::make_shared<PairBasis>(n)), m_(std::move(pair_matrix)) {
  const int N = basis_->size();
  if (m_.rows() != N || m_.cols() != N)
    throw WrongDimension("pair matrix has wrong shape");
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if (asym > 1e-12 * scale)
    throw SpecInvalid("pair matrix is not symmetric");
  m_ = 0.5 * (m_ + m_.transpose().eval());

  // Dense expansion; every component is read off its canonical cell, so the
  // symmetries (antisymmetry in each pair, pair interchange) hold exactly.
  dense_.assign(static_cast<std::size_t>(n_) * n_ * n_ * n_, 0.0);
  max_abs_ = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          const auto cell = canonicalize(*basis_, i, j, k, l);
          double v = cell.sign == 0.0 ? 0.0 : cell.sign * m_(cell.a, cell.b);
          if (!std::isfinite(v)) throw SpecInvalid("non-finite component");
          dense_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l] =
              v;
          max_abs_ = std::max(max_abs_, std::abs(v));
        }
}

CurvatureTensor CurvatureTensor::zero(int n) {
  const int N = n * (n - 1) / 2;
  return CurvatureTensor(n, Eigen::MatrixXd::Zero(N, N));
}

CurvatureTensor CurvatureTensor::operator+(const CurvatureTensor& rhs) const {
  if (rhs.n_ != n_) throw WrongDimension("tensor dimensions differ");
  return CurvatureTensor(n_, m_ + rhs.m_);
}

CurvatureTensor CurvatureTensor::operator-(const CurvatureTensor& rhs) const {
  if (rhs.n_ != n_) throw WrongDimension("tensor dimensions differ");
  return CurvatureTensor(n_, m_ - rhs.m_);
}

CurvatureTensor CurvatureTensor::operator*(double c) const {
  return CurvatureTensor(n_, m_ * c);
}

double CurvatureTensor::bianchi_residual() const {
  // The cyclic sum is totally antisymmetric, so one representative per
  // 4-element index subset suffices.
  double worst = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k)
        for (int l = k + 1; l < n_; ++l) {
          const double b = component(i, j, k, l) + component(j, k, i, l) +
                           component(k, i, j, l);
          worst = std::max(worst, std::abs(b));
        }
  return worst;
}

CurvatureTensor CurvatureTensor::bianchi_projected() const {
  Eigen::MatrixXd m = m_;
  const PairBasis& basis = *basis_;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k)
        for (int l = k + 1; l < n_; ++l) {
          const double v = (component(i, j, k, l) + component(j, k, i, l) +
                            component(k, i, j, l)) /
                           3.0;
          if (v == 0.0) continue;
          // Remove the 4-form e_i^e_j^e_k^e_l component: it touches exactly
          // three canonical cells with alternating signs.
          const int ab = basis.index(i, j), cd = basis.index(k, l);
          const int ac = basis.index(i, k), bd = basis.index(j, l);
          const int ad = basis.index(i, l), bc = basis.index(j, k);
          m(ab, cd) -= v;
          m(cd, ab) -= v;
          m(ac, bd) += v;
          m(bd, ac) += v;
          m(ad, bc) -= v;
          m(bc, ad) -= v;
        }
  return CurvatureTensor(n_, std::move(m));
}

double CurvatureTensor::eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& z,
                             const Eigen::VectorXd& w) const {
  const int n = n_;
  // Contract slots right to left: O(n^4 + n^3 + n^2).
  std::vector<double> t3(static_cast<std::size_t>(n) * n * n, 0.0);
  const double* d = dense_.data();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        const double* row = d + ((static_cast<std::size_t>(i) * n + j) * n + k) * n;
        for (int l = 0; l < n; ++l) s += row[l] * w[l];
        t3[(static_cast<std::size_t>(i) * n + j) * n + k] = s;
      }
  double out = 0.0;
  for (int i = 0; i < n; ++i) {
    double si = 0.0;
    for (int j = 0; j < n; ++j) {
      double sj = 0.0;
      for (int k = 0; k < n; ++k)
        sj += t3[(static_cast<std::size_t>(i) * n + j) * n + k] * z[k];
      si += sj * y[j];
    }
    out += si * x[i];
  }
  return out;
}

Eigen::VectorXd CurvatureTensor::eval_grad(int slot, const Eigen::VectorXd& a,
                                           const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& c) const {
  const int n = n_;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  const double* d = dense_.data();
  auto at = [&](int i, int j, int k, int l) {
    return d[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  };
  // The three fixed vectors occupy the non-`slot` slots in slot order.
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r) {
          double comp;
          switch (slot) {
            case 0: comp = at(i, p, q, r); break;
            case 1: comp = at(p, i, q, r); break;
            case 2: comp = at(p, q, i, r); break;
            default: comp = at(p, q, r, i); break;
          }
          s += comp * a[p] * b[q] * c[r];
        }
    g[i] = s;
  }
  return g;
}

// ============================================================================
// make_tensor
// ============================================================================

MakeResult make_tensor(int n, const std::vector<TensorEntry>& entries,
                       const MakeOptions& options) {
  if (n < 2) throw WrongDimension("make_tensor requires n >= 2");
  const PairBasis basis(n);
  const int N = basis.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
  std::map<std::pair<int, int>, double> seen;

  double magnitude = 1.0;
  for (const auto& e : entries)
    magnitude = std::max(magnitude, std::abs(e.value));

  for (const auto& e : entries) {
    for (int idx : {e.i, e.j, e.k, e.l})
      if (idx < 0 || idx >= n)
        throw IndexOutOfRange("entry index " + std::to_string(idx) +
                              " outside [0, " + std::to_string(n) + ")");
    const auto cell = canonicalize(basis, e.i, e.j, e.k, e.l);
    if (cell.sign == 0.0) {
      if (std::abs(e.value) > options.structural_tol * magnitude)
        throw SymmetryConflict(
            "nonzero value on a repeated-index component, which the "
            "antisymmetry forces to vanish");
      continue;
    }
    const double canonical_value = cell.sign * e.value;
    auto [it, inserted] = seen.emplace(std::make_pair(cell.a, cell.b),
                                       canonical_value);
    if (!inserted &&
        std::abs(it->second - canonical_value) >
            options.structural_tol * magnitude)
      throw SymmetryConflict("two entries in one symmetry orbit disagree");
    m(cell.a, cell.b) = canonical_value;
    m(cell.b, cell.a) = canonical_value;
  }

  CurvatureTensor raw(n, std::move(m));
  const double scale = std::max(1.0, raw.max_abs());
  const double residual = raw.bianchi_residual() / scale;
  if (residual <= options.bianchi_tol)
    return MakeResult{std::move(raw), residual, false};
  if (options.mode == BianchiMode::Strict)
    throw BianchiViolation("first Bianchi identity violated (relative residual " +
                           std::to_string(residual) + ")");
  return MakeResult{raw.bianchi_projected(), residual, true};
}

// ============================================================================
// Frame4
// ============================================================================

Frame4::Frame4(Eigen::MatrixXd columns, double tol) : columns_(std::move(columns)) {
  if (columns_.cols() != 4) throw BadFrame("a four-frame needs 4 vectors");
  if (columns_.rows() < 4) throw BadFrame("four-frames require n >= 4");
  const Eigen::MatrixXd gram = columns_.transpose() * columns_;
  const double dev = (gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw BadFrame("frame is not orthonormal (deviation " + std::to_string(dev) +
                   ")");
}

// ============================================================================
// Rotation and basis completion
// ============================================================================

CurvatureTensor rotate(const CurvatureTensor& r, const Eigen::MatrixXd& q) {
  const int n = r.dim();
  if (q.rows() != n || q.cols() != n)
    throw WrongDimension("rotation matrix has wrong shape");
  // Successive one-slot contractions, O(n^5) each.
  std::vector<double> cur = r.dense();
  std::vector<double> next(cur.size());
  auto idx = [n](int i, int j, int k, int l) {
    return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
  };
  for (int slot = 0; slot < 4; ++slot) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const double v = cur[idx(i, j, k, l)];
            if (v == 0.0) continue;
            // Replace index of `slot` by contraction with q columns.
            switch (slot) {
              case 0:
                for (int a = 0; a < n; ++a)
                  next[idx(a, j, k, l)] += v * q(i, a);
                break;
              case 1:
                for (int a = 0; a < n; ++a)
                  next[idx(i, a, k, l)] += v * q(j, a);
                break;
              case 2:
                for (int a = 0; a < n; ++a)
                  next[idx(i, j, a, l)] += v * q(k, a);
                break;
              default:
                for (int a = 0; a < n; ++a)
                  next[idx(i, j, k, a)] += v * q(l, a);
                break;
            }
          }
    std::swap(cur, next);
  }
  const PairBasis basis(n);
  const int N = basis.size();
  Eigen::MatrixXd m(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      const auto [i, j] = basis.pair(a);
      const auto [k, l] = basis.pair(b);
      const double v = cur[idx(i, j, k, l)];
      m(a, b) = v;
      m(b, a) = v;
    }
  return CurvatureTensor(n, std::move(m));
}

Eigen::MatrixXd complete_basis(const Eigen::MatrixXd& columns) {
  const int n = static_cast<int>(columns.rows());
  const int k = static_cast<int>(columns.cols());
  Eigen::MatrixXd basis(n, n);
  basis.leftCols(k) = columns;
  int have = k;
  for (int s = 0; s < n && have < n; ++s) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[s] = 1.0;
    for (int c = 0; c < have; ++c) v -= basis.col(c).dot(v) * basis.col(c);
    // Second pass for numerical orthogonality.
    for (int c = 0; c < have; ++c) v -= basis.col(c).dot(v) * basis.col(c);
    const double norm = v.norm();
    if (norm > 1e-8) {
      basis.col(have) = v / norm;
      ++have;
    }
  }
  if (have < n) throw BadFrame("could not complete basis");
  return basis;
}

}  // namespace curvlab::core
