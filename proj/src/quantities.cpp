// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/quantities.hpp"

#include <cmath>

namespace curvlab::core {

Eigen::MatrixXd ricci(const CurvatureTensor& r) {
  const int n = r.dim();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += r.component(i, k, j, k);
      ric(i, j) = s;
      ric(j, i) = s;
    }
  return ric;
}

double scalar(const CurvatureTensor& r) { return ricci(r).trace(); }

double sectional(const CurvatureTensor& r, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y) {
  const double gram =
      x.squaredNorm() * y.squaredNorm() - x.dot(y) * x.dot(y);
  if (gram < 1e-14) throw DegeneratePlane("plane spanned by x, y is degenerate");
  return r.eval(x, y, x, y) / gram;
}

FrameComponents frame_components(const CurvatureTensor& r, const Frame4& f) {
  if (f.dim() != r.dim()) throw BadFrame("frame dimension mismatch");
  const Eigen::VectorXd e1 = f.e(0), e2 = f.e(1), e3 = f.e(2), e4 = f.e(3);
  return FrameComponents{r.eval(e1, e3, e1, e3), r.eval(e1, e4, e1, e4),
                         r.eval(e2, e3, e2, e3), r.eval(e2, e4, e2, e4),
                         r.eval(e1, e2, e3, e4)};
}

double isotropic_quantity(const CurvatureTensor& r, const Frame4& f) {
  return isotropic_from(frame_components(r, f));
}

namespace {
void check_weight(double v, LambdaRange range, const char* name) {
  if (v < lambda_lo(range) - 1e-15 || v > lambda_hi + 1e-15)
    throw RangeViolation(std::string(name) + " outside the configured range");
}
}  // namespace

double pic1_quantity(const CurvatureTensor& r, const Frame4& f, double lambda,
                     LambdaRange range) {
  check_weight(lambda, range, "lambda");
  return pic1_from(frame_components(r, f), lambda);
}

double pic2_quantity(const CurvatureTensor& r, const Frame4& f, double lambda,
                     double mu, LambdaRange range) {
  check_weight(lambda, range, "lambda");
  check_weight(mu, range, "mu");
  return pic2_from(frame_components(r, f), lambda, mu);
}

std::complex<double> complexify_eval(const CurvatureTensor& r,
                                     const ComplexVector& zeta,
                                     const ComplexVector& eta) {
  if (zeta.re.size() != r.dim() || zeta.im.size() != r.dim() ||
      eta.re.size() != r.dim() || eta.im.size() != r.dim())
    throw WrongDimension("complex vector dimension mismatch");
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  // Expand R(a+ib, c+id, a-ib, c-id) into the 16 real evaluations.
  const Eigen::VectorXd& a = zeta.re;
  const Eigen::VectorXd& b = zeta.im;
  const Eigen::VectorXd& c = eta.re;
  const Eigen::VectorXd& d = eta.im;
  C out(0.0, 0.0);
  const Eigen::VectorXd* s1[2] = {&a, &b};
  const Eigen::VectorXd* s2[2] = {&c, &d};
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) {
          C coeff(1.0, 0.0);
          if (p) coeff *= i;
          if (q) coeff *= i;
          if (u) coeff *= -i;
          if (v) coeff *= -i;
          out += coeff * r.eval(*s1[p], *s2[q], *s1[u], *s2[v]);
        }
  return out;
}

Eigen::MatrixXd operator_matrix(const CurvatureTensor& r) {
  // Each unordered pair of index pairs appears four times in the full
  // four-index sum.
  return 4.0 * r.pair_matrix();
}

CurvatureTensor kulkarni_nomizu(const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(a.rows());
  const PairBasis basis(n);
  const int N = basis.size();
  Eigen::MatrixXd m(N, N);
  for (int p = 0; p < N; ++p)
    for (int q = p; q < N; ++q) {
      const auto [i, j] = basis.pair(p);
      const auto [k, l] = basis.pair(q);
      const double v = a(i, k) * b(j, l) + a(j, l) * b(i, k) -
                       a(i, l) * b(j, k) - a(j, k) * b(i, l);
      m(p, q) = v;
      m(q, p) = v;
    }
  return CurvatureTensor(n, std::move(m));
}

Dim4Decomposition dim4_decompose(const CurvatureTensor& r) {
  if (r.dim() != 4) throw WrongDimension("dim4_decompose requires n = 4");
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd ric = ricci(r);
  const double scal = ric.trace();
  const Eigen::MatrixXd ric0 = ric - (scal / 4.0) * g;

  const CurvatureTensor scal_part = kulkarni_nomizu(g, g) * (scal / 24.0);
  const CurvatureTensor ric_part = kulkarni_nomizu(ric0, g) * 0.5;
  CurvatureTensor weyl = r - scal_part - ric_part;

  double w2 = 0.0;
  for (double v : weyl.dense()) w2 += v * v;
  const double ric0_sq = ric0.squaredNorm();
  const double gb = scal * scal / 6.0 - 2.0 * ric0_sq + w2;
  return Dim4Decomposition{scal, ric0, std::move(weyl), w2, gb};
}

CurvatureTensor dim4_recompose(const Dim4Decomposition& d) {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4);
  return d.weyl + kulkarni_nomizu(g, g) * (d.scalar_part / 24.0) +
         kulkarni_nomizu(d.traceless_ricci, g) * 0.5;
}

}  // namespace curvlab::core
