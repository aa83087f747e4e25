// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/ode.hpp"

#include <algorithm>
#include <cmath>

#include "curvlab/quantities.hpp"

namespace curvlab::flow {

using core::PairBasis;

// ============================================================================
// Q(R)
// ============================================================================

CurvatureTensor q_tensor(const CurvatureTensor& r) {
  const int n = r.dim();
  const PairBasis& basis = r.pairs();
  const int N = basis.size();

  // First term: sum over p<q doubled, i.e. 2 M^2 on the pair space.
  const Eigen::MatrixXd term1 = 2.0 * r.pair_matrix() * r.pair_matrix();

  // Cross terms through the Gram matrix of S[(x,z),(p,q)] = R(x,ep,z,eq).
  Eigen::MatrixXd s(n * n, n * n);
  const auto& d = r.dense();
  for (int x = 0; x < n; ++x)
    for (int z = 0; z < n; ++z)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          s(x * n + z, p * n + q) =
              d[((static_cast<std::size_t>(x) * n + p) * n + z) * n + q];
  const Eigen::MatrixXd e = s * s.transpose();

  Eigen::MatrixXd m(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      const auto [i, j] = basis.pair(a);
      const auto [k, l] = basis.pair(b);
      const double v = term1(a, b) + 2.0 * e(i * n + k, j * n + l) -
                       2.0 * e(i * n + l, j * n + k);
      m(a, b) = v;
      m(b, a) = v;
    }
  return CurvatureTensor(n, std::move(m));
}

CurvatureTensor q_tensor_reference(const CurvatureTensor& r) {
  const int n = r.dim();
  const PairBasis& basis = r.pairs();
  const int N = basis.size();
  Eigen::MatrixXd m(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      const auto [i, j] = basis.pair(a);
      const auto [k, l] = basis.pair(b);
      double v = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          v += r.component(i, j, p, q) * r.component(k, l, p, q);
          v += 2.0 * r.component(i, p, k, q) * r.component(j, p, l, q);
          v -= 2.0 * r.component(i, p, l, q) * r.component(j, p, k, q);
        }
      m(a, b) = v;
      m(b, a) = v;
    }
  return CurvatureTensor(n, std::move(m));
}

// ============================================================================
// Integration
// ============================================================================

namespace {

// Packed upper triangle of the symmetric pair matrix.
Eigen::VectorXd pack(const Eigen::MatrixXd& m) {
  const int N = static_cast<int>(m.rows());
  Eigen::VectorXd v(N * (N + 1) / 2);
  int idx = 0;
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) v[idx++] = m(a, b);
  return v;
}

Eigen::MatrixXd unpack(const Eigen::VectorXd& v, int N) {
  Eigen::MatrixXd m(N, N);
  int idx = 0;
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      m(a, b) = v[idx];
      m(b, a) = v[idx];
      ++idx;
    }
  return m;
}

struct Recorder {
  FlowTrajectory traj;
  int n;

  void record(double t, const CurvatureTensor& state, double step) {
    traj.times.push_back(t);
    traj.diagnostics.push_back(
        FlowSample{t, core::scalar(state), state.max_abs(), step});
    traj.states.push_back(state);
  }
};

// Blowup time from a least-squares line through 1/|R| on the trailing
// samples (1/|R| is asymptotically linear in t for the reaction ODE).
double estimate_blowup(const FlowTrajectory& traj) {
  const int count = static_cast<int>(traj.times.size());
  const int use = std::min(count, 10);
  if (use < 2) return traj.times.empty() ? 0.0 : traj.times.back();
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (int i = count - use; i < count; ++i) {
    const double t = traj.times[i];
    const double y = 1.0 / std::max(traj.diagnostics[i].norm_inf, 1e-300);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = use * stt - st * st;
  if (denom == 0.0) return traj.times.back();
  const double slope = (use * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / use;
  if (slope >= 0.0) return traj.times.back();
  return -intercept / slope;
}

}  // namespace

CurvatureTensor FlowTrajectory::state_normalized(std::size_t index) const {
  const CurvatureTensor& raw = states.at(index);
  if (normalization.kind != Normalization::Kind::FixedScal) return raw;
  const double scal = diagnostics.at(index).scal;
  if (scal == 0.0) return raw;
  return raw * (normalization.target / scal);
}

FlowTrajectory integrate(const CurvatureTensor& r0, double t_end,
                         const StepControl& control) {
  if (!(t_end > 0.0)) throw SpecInvalid("integration requires t_end > 0");
  if (!(control.rel_tol > 0.0) || !(control.h_init > 0.0) ||
      control.max_steps < 1)
    throw SpecInvalid("step control needs positive tolerances and max_steps >= 1");
  const int n = r0.dim();
  const int N = r0.pairs().size();

  auto deriv = [N, n](const Eigen::VectorXd& y) {
    return pack(q_tensor(CurvatureTensor(n, unpack(y, N))).pair_matrix());
  };

  Recorder rec{{}, n};
  rec.traj.normalization = control.normalize;
  rec.record(0.0, r0, 0.0);

  Eigen::VectorXd y = pack(r0.pair_matrix());
  double t = 0.0;
  double h = control.h_init;
  int steps = 0;

  auto finish = [&](FlowStatus status) {
    rec.traj.status = status;
    rec.traj.steps_taken = steps;
    if (status == FlowStatus::BlowupReached)
      rec.traj.blowup_estimate = estimate_blowup(rec.traj);
    return std::move(rec.traj);
  };

  auto accept = [&](double t_new, const Eigen::VectorXd& y_new, double used) {
    t = t_new;
    y = y_new;
    CurvatureTensor state(n, unpack(y, N));
    // Q preserves the Bianchi identity analytically; drift is roundoff only,
    // reprojected when it exceeds 1e-9 relative.
    const double scale = std::max(state.max_abs(), 1e-300);
    if (state.bianchi_residual() / scale > 1e-9) {
      state = state.bianchi_projected();
      y = pack(state.pair_matrix());
      ++rec.traj.bianchi_reprojections;
    }
    rec.record(t, state, used);
    return state.max_abs();
  };

  if (control.method == StepMethod::RK4) {
    while (t < t_end) {
      if (steps >= control.max_steps) return finish(FlowStatus::MaxStepsExceeded);
      const double step = std::min(h, t_end - t);
      const Eigen::VectorXd k1 = deriv(y);
      const Eigen::VectorXd k2 = deriv(y + 0.5 * step * k1);
      const Eigen::VectorXd k3 = deriv(y + 0.5 * step * k2);
      const Eigen::VectorXd k4 = deriv(y + step * k3);
      const Eigen::VectorXd y_new =
          y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ++steps;
      if (accept(t + step, y_new, step) > control.norm_cap)
        return finish(FlowStatus::BlowupReached);
    }
    return finish(FlowStatus::ReachedEnd);
  }

  // Dormand-Prince 5(4) with a relative per-step error target.
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600,
                      e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640,
                      e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  while (t < t_end) {
    if (steps >= control.max_steps) return finish(FlowStatus::MaxStepsExceeded);
    if (h < control.h_min) return finish(FlowStatus::BlowupReached);
    const double step = std::min(h, t_end - t);

    const Eigen::VectorXd k1 = deriv(y);
    const Eigen::VectorXd k2 = deriv(y + step * (a21 * k1));
    const Eigen::VectorXd k3 = deriv(y + step * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 =
        deriv(y + step * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 =
        deriv(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 = deriv(
        y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXd y5 =
        y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = deriv(y5);
    const Eigen::VectorXd err_vec =
        step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double err = err_vec.cwiseAbs().maxCoeff();
    const double scale =
        control.rel_tol *
        std::max({y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff(), 1e-30});
    ++steps;
    if (err <= scale) {
      if (accept(t + step, y5, step) > control.norm_cap)
        return finish(FlowStatus::BlowupReached);
      const double factor =
          err == 0.0 ? 5.0
                     : std::clamp(0.9 * std::pow(scale / err, 0.2), 0.2, 5.0);
      h = step * factor;
    } else {
      h = step * std::clamp(0.9 * std::pow(scale / err, 0.2), 0.1, 1.0);
    }
  }
  return finish(FlowStatus::ReachedEnd);
}

// ============================================================================
// Boundary diagnostics
// ============================================================================

double boundary_inward_value(const CurvatureTensor& r, const Frame4& f) {
  if (f.dim() != r.dim()) throw BadFrame("frame dimension mismatch");
  const CurvatureTensor q = q_tensor(r);
  const Eigen::VectorXd e1 = f.e(0), e2 = f.e(1), e3 = f.e(2), e4 = f.e(3);
  return q.eval(e1, e3, e1, e3) + q.eval(e1, e4, e1, e4) +
         q.eval(e2, e3, e2, e3) + q.eval(e2, e4, e2, e4) -
         2.0 * q.eval(e1, e2, e3, e4);
}

KeyInequalityReport key_inequality_residual(const CurvatureTensor& r,
                                            const Frame4& f) {
  if (f.dim() != r.dim()) throw BadFrame("frame dimension mismatch");
  const int n = r.dim();
  const Eigen::MatrixXd basis = core::complete_basis(f.matrix());
  const CurvatureTensor rb = core::rotate(r, basis);
  auto c = [&](int i, int j, int k, int l) { return rb.component(i, j, k, l); };

  KeyInequalityReport rep;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double lhs_pq =
          (c(0, p, 0, q) + c(1, p, 1, q)) * (c(2, p, 2, q) + c(3, p, 3, q)) -
          c(0, 1, p, q) * c(2, 3, p, q);
      const double rhs_pq =
          (c(0, p, 2, q) + c(1, p, 3, q)) * (c(2, p, 0, q) + c(3, p, 1, q)) +
          (c(0, p, 3, q) - c(1, p, 2, q)) * (c(3, p, 0, q) - c(2, p, 1, q));
      rep.lhs += lhs_pq;
      rep.rhs += rhs_pq;
      const double diff = lhs_pq - rhs_pq;
      if (p < 4 && q < 4)
        rep.block_frame += diff;
      else if (p >= 4 && q >= 4)
        rep.block_tail += diff;
      else
        rep.block_mixed += diff;
    }
  rep.residual = rep.lhs - rep.rhs;

  rep.step1_residual = std::max(
      std::abs(c(0, 1, 0, 2) + c(0, 1, 3, 1) + c(2, 3, 0, 2) + c(2, 3, 3, 1)),
      std::abs(c(0, 1, 0, 3) + c(0, 1, 1, 2) + c(2, 3, 0, 3) + c(2, 3, 1, 2)));

  double step2 = 0.0;
  for (int q = 4; q < n; ++q) {
    step2 = std::max(
        step2, std::abs(c(q, 2, 0, 2) + c(q, 3, 0, 3) - c(q, 1, 2, 3)));
    step2 = std::max(
        step2, std::abs(c(q, 2, 1, 2) + c(q, 3, 1, 3) - c(0, q, 2, 3)));
    step2 = std::max(
        step2, std::abs(c(0, q, 0, 2) + c(1, q, 1, 2) - c(0, 1, q, 3)));
    step2 = std::max(
        step2, std::abs(c(0, q, 0, 3) + c(1, q, 1, 3) - c(0, 1, 2, q)));
  }
  rep.step2_residual = step2;
  return rep;
}

}  // namespace curvlab::flow
