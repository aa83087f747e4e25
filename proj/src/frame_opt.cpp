// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/frame_opt.hpp"

#include <algorithm>
#include <cmath>

#include "curvlab/parallel.hpp"

namespace curvlab::opt {

Eigen::MatrixXd random_stiefel_point(int n, int k, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::MatrixXd g = rng.gaussian_matrix(n, k);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
    // Householder Q has a deterministic orientation; random column signs
    // restore coverage of both components of V_k (essential when k = n and
    // the objective is not reflection invariant).
    for (int c = 0; c < k; ++c)
      if (rng.next_u64() & 1) q.col(c) = -q.col(c);
    if (((q.transpose() * q) - Eigen::MatrixXd::Identity(k, k))
            .cwiseAbs()
            .maxCoeff() < 1e-10)
      return q;
  }
  throw ConstraintConstructionFailed("random frame generation failed");
}

Eigen::MatrixXd stiefel_tangent(const Eigen::MatrixXd& f,
                                const Eigen::MatrixXd& ambient_grad) {
  const Eigen::MatrixXd ftg = f.transpose() * ambient_grad;
  return ambient_grad - f * (0.5 * (ftg + ftg.transpose()));
}

Eigen::MatrixXd polar_retract(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

QuadraticMin minimize_quadratic(double a, double b, double c, double lo,
                                double hi) {
  auto q = [&](double t) { return (a * t + b) * t + c; };
  QuadraticMin best{lo, q(lo)};
  const double at_hi = q(hi);
  if (at_hi < best.value) best = {hi, at_hi};
  if (a > 0.0) {
    const double t = -b / (2.0 * a);
    if (t > lo && t < hi) {
      const double v = q(t);
      if (v < best.value) best = {t, v};
    }
  }
  return best;
}

namespace {

struct RestartOutcome {
  Eigen::MatrixXd frame;
  double value = 0.0;
  bool converged = false;
};

RestartOutcome run_descent(const StiefelObjective& obj, Eigen::MatrixXd f,
                           const StiefelSettings& s) {
  double value = obj.value(f);
  Eigen::MatrixXd grad = stiefel_tangent(f, obj.gradient(f));
  double step = s.initial_step;
  bool converged = false;

  // Barzilai-Borwein step with a nonmonotone (last-5) Armijo safeguard;
  // plain step-halving descent stalls in the narrow valleys these quartic
  // objectives produce.
  const double stat_tol = s.stationarity_tol * std::max(1.0, s.scale_hint);
  std::vector<double> recent{value};
  for (int iter = 0; iter < s.max_iterations; ++iter) {
    const double gnorm = grad.norm();
    if (gnorm < stat_tol) {
      converged = true;
      break;
    }
    const double reference = *std::max_element(recent.begin(), recent.end());
    bool accepted = false;
    double alpha = std::clamp(step, 1e-12, 1e8);
    Eigen::MatrixXd f_new, grad_new;
    for (int halvings = 0; halvings < 60; ++halvings) {
      f_new = polar_retract(f - alpha * grad);
      const double cv = obj.value(f_new);
      if (cv <= reference - 1e-4 * alpha * gnorm * gnorm) {
        grad_new = stiefel_tangent(f_new, obj.gradient(f_new));
        // BB1 step from the ambient displacement and gradient change.
        const Eigen::MatrixXd sk = f_new - f;
        const Eigen::MatrixXd yk = grad_new - grad;
        const double sy = std::abs((sk.array() * yk.array()).sum());
        const double yy = (yk.array() * yk.array()).sum();
        step = yy > 0.0 ? std::clamp(sy / yy, 1e-10, 1e8) : alpha * 2.0;
        f = std::move(f_new);
        grad = std::move(grad_new);
        value = cv;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Objective decreases fall below the floating-point noise floor before
      // the gradient reaches the stationarity tolerance when the minimum is
      // flat. Accept the point once the gradient is small on the objective's
      // scale.
      converged = gnorm < 1e-6 * std::max({1.0, s.scale_hint, std::abs(value)});
      break;
    }
    recent.push_back(value);
    if (recent.size() > 5) recent.erase(recent.begin());
  }
  return RestartOutcome{std::move(f), value, converged};
}

}  // namespace

StiefelResult minimize_on_stiefel(const StiefelObjective& objective,
                                  const StiefelSettings& settings) {
  const int total = settings.restarts +
                    static_cast<int>(settings.warm_starts.size());
  if (total <= 0) throw OptimizerDiverged("no restarts configured");

  std::function<RestartOutcome(int)> task = [&](int r) -> RestartOutcome {
    Eigen::MatrixXd start;
    const int warm = static_cast<int>(settings.warm_starts.size());
    if (r < warm) {
      start = settings.warm_starts[r];
    } else {
      Rng rng(derive_seed(settings.seed, static_cast<std::uint64_t>(r - warm)));
      start = random_stiefel_point(objective.n, objective.k, rng);
    }
    return run_descent(objective, std::move(start), settings);
  };
  const std::vector<RestartOutcome> outcomes =
      parallel_indexed<RestartOutcome>(total, task);

  // Ordered reduction: the first strictly-best restart wins.
  int best = -1;
  for (int r = 0; r < total; ++r) {
    if (best < 0 || outcomes[r].value < outcomes[best].value) best = r;
  }
  bool any_converged = false;
  for (const auto& o : outcomes) any_converged = any_converged || o.converged;
  if (!any_converged)
    throw OptimizerDiverged("restart budget exhausted without stationarity");

  // Count converged near-optimal results in a materially different subspace.
  int distinct = 0;
  const double band = 1e-4 * std::max(1.0, std::abs(outcomes[best].value));
  for (int r = 0; r < total; ++r) {
    if (r == best || !outcomes[r].converged) continue;
    if (outcomes[r].value > outcomes[best].value + band) continue;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(outcomes[best].frame.transpose() *
                                          outcomes[r].frame);
    if (svd.singularValues().minCoeff() < 0.99) ++distinct;
  }

  return StiefelResult{outcomes[best].frame, outcomes[best].value, total,
                       outcomes[best].converged, distinct};
}

}  // namespace curvlab::opt
