// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "curvlab/errors.hpp"
#include "curvlab/rng.hpp"

namespace curvlab::opt {

/// Objective on the Stiefel manifold V_k(R^n) of orthonormal k-frames.
/// `value` and `gradient` receive an n x k matrix with orthonormal columns;
/// `gradient` returns the ambient (unconstrained) gradient, which the solver
/// projects onto the tangent space.
struct StiefelObjective {
  int n = 0;
  int k = 0;
  std::function<double(const Eigen::MatrixXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> gradient;
};

struct StiefelSettings {
  int restarts = 64;
  int max_iterations = 400;
  double stationarity_tol = 1e-10;
  double initial_step = 0.5;
  std::uint64_t seed = 0x5eed;
  /// Objective magnitude used to judge stalled line searches (for curvature
  /// quantities, the tensor max-norm).
  double scale_hint = 1.0;
  /// Frames tried before the random restarts (restart indices 0..size-1).
  std::vector<Eigen::MatrixXd> warm_starts;
};

struct StiefelResult {
  Eigen::MatrixXd minimizer;  // n x k, orthonormal columns
  double value = 0.0;
  int restarts_used = 0;
  bool converged = false;  // true if the best restart reached stationarity
  /// Converged restart values within 1e-4 of the optimum whose frames span a
  /// materially different subspace than the winner (degenerate-minimizer
  /// diagnostics).
  int distinct_near_minimizers = 0;
};

/// Multi-start projected gradient descent with step-halving line search and
/// polar retraction. Deterministic for a fixed seed; restart reduction is
/// ordered by restart index. Throws OptimizerDiverged when no restart reaches
/// stationarity.
StiefelResult minimize_on_stiefel(const StiefelObjective& objective,
                                  const StiefelSettings& settings);

/// Random n x k orthonormal matrix (Gram-Schmidt of a Gaussian draw).
Eigen::MatrixXd random_stiefel_point(int n, int k, Rng& rng);

/// Projection of an ambient gradient onto the Stiefel tangent space at f.
Eigen::MatrixXd stiefel_tangent(const Eigen::MatrixXd& f,
                                const Eigen::MatrixXd& ambient_grad);

/// Closest orthonormal frame (polar factor) of an n x k matrix.
Eigen::MatrixXd polar_retract(const Eigen::MatrixXd& m);

/// Exact minimum of a quadratic a t^2 + b t + c over [lo, hi].
struct QuadraticMin {
  double t;
  double value;
};
QuadraticMin minimize_quadratic(double a, double b, double c, double lo,
                                double hi);

}  // namespace curvlab::opt
