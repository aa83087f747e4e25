// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvlab/models.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/quantities.hpp"
#include "curvlab/rng.hpp"

namespace curvlab::flow {

namespace {

/// Checkpoint indices: `count` state indices spread evenly over the stored
/// trajectory up to and including `last`.
std::vector<std::size_t> checkpoint_indices(std::size_t last, int count) {
  std::vector<std::size_t> out;
  if (count < 1) count = 1;
  for (int i = 0; i < count; ++i) {
    const std::size_t idx =
        static_cast<std::size_t>(std::llround(
            static_cast<double>(i) * static_cast<double>(last) / std::max(count - 1, 1)));
    if (out.empty() || idx != out.back()) out.push_back(idx);
  }
  return out;
}

/// Index of the last stored state with time <= t_limit.
std::size_t last_index_before(const FlowTrajectory& traj, double t_limit) {
  std::size_t last = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    if (traj.times[i] <= t_limit) last = i;
  return last;
}

}  // namespace

// ============================================================================
// Invariance
// ============================================================================

InvarianceReport invariance_experiment(const InvarianceConfig& config) {
  switch (config.cone.kind) {
    case conditions::ConeKind::Pic:
    case conditions::ConeKind::Pic1:
    case conditions::ConeKind::Pic2:
    case conditions::ConeKind::TwoPositive:
    case conditions::ConeKind::OperatorNonneg:
      break;
    default:
      throw SpecInvalid("invariance experiments cover the flow-preserved "
                        "cones: pic, pic1, pic2, 2pos, op");
  }
  InvarianceReport report;
  report.config = config;

  std::function<InvarianceRun(int)> task = [&](int s) -> InvarianceRun {
    InvarianceRun run;
    run.sample = s;
    const std::uint64_t sample_seed = derive_seed(config.seed, s);
    CurvatureTensor start =
        models::random_tensor(config.dim, sample_seed, 1.0);

    MarginOptions opts = config.margin_options;
    opts.seed = derive_seed(sample_seed, 0xA);

    if (config.shift_samples) {
      const double target = config.strict_level * start.max_abs();
      auto shifted = models::shift_into_cone(start, config.cone, target, opts);
      start = shifted.tensor;
      run.initial_margin = shifted.certificate.margin;
    } else {
      auto rep = conditions::cone_margin(start, config.cone, opts);
      run.initial_margin = rep.margin;
      if (rep.margin <= conditions::strictness_threshold(start)) {
        run.outside_cone = true;
        return run;
      }
    }

    FlowTrajectory traj = integrate(start, config.horizon, config.control);
    run.status = traj.status;
    double t_limit = config.horizon;
    if (traj.status == FlowStatus::BlowupReached)
      t_limit = std::min(t_limit, 0.9 * traj.blowup_estimate);
    const std::size_t last = last_index_before(traj, t_limit);
    run.integrated_to = traj.times[last];

    run.min_margin = std::numeric_limits<double>::infinity();
    run.min_margin_normalized = std::numeric_limits<double>::infinity();
    MarginOptions walk = opts;
    walk.restarts = std::max(8, opts.restarts / 8);
    for (std::size_t idx : checkpoint_indices(last, config.checkpoints)) {
      const CurvatureTensor& state = traj.states[idx];
      auto rep = conditions::cone_margin(state, config.cone, walk);
      // Carry the certificate forward; margins move smoothly along the flow.
      walk.warm_starts.clear();
      if (rep.minimizer.frame) walk.warm_starts.push_back(*rep.minimizer.frame);
      const double norm = std::max(state.max_abs(), 1e-300);
      if (rep.margin / norm < run.min_margin_normalized) {
        run.min_margin_normalized = rep.margin / norm;
        run.min_margin = rep.margin;
        run.min_at_t = traj.times[idx];
      }
    }
    run.violation = run.min_margin_normalized < -1e-6;
    return run;
  };

  report.runs = parallel_indexed<InvarianceRun>(config.samples, task);
  for (const auto& run : report.runs) {
    if (run.outside_cone) ++report.outside_cone;
    if (run.violation) ++report.violations;
  }
  return report;
}

// ============================================================================
// Convergence
// ============================================================================

namespace {

double ray_distance(const CurvatureTensor& state, double scal,
                    const CurvatureTensor& unit_const, double scal_const) {
  return (state.pair_matrix() / scal -
          unit_const.pair_matrix() / scal_const)
      .norm();
}

}  // namespace

ConvergenceReport convergence_experiment(const CurvatureTensor& r0,
                                         const ConvergenceConfig& config) {
  ConvergenceReport report;
  const auto cone = ConeId::pic2();
  auto membership = conditions::cone_margin(r0, cone, config.margin_options);
  report.initial_cone_margin = membership.margin;
  const double strict = conditions::strictness_threshold(r0);
  if (membership.margin < -strict)
    throw NotInCone("start is outside the pic2 cone");
  report.boundary_start = membership.margin <= strict;

  FlowTrajectory traj = integrate(r0, 1e6, config.control);
  report.status = traj.status;
  report.blowup_estimate = traj.blowup_estimate;

  const int n = r0.dim();
  const CurvatureTensor unit =
      models::build(models::ModelSpec::constant(n, 1.0));
  const double scal_const = static_cast<double>(n) * (n - 1);

  MarginOptions walk = config.margin_options;
  walk.restarts = std::max(8, config.margin_options.restarts / 8);
  const std::size_t last = traj.states.size() - 1;
  for (std::size_t idx : checkpoint_indices(last, config.checkpoints)) {
    const CurvatureTensor& state = traj.states[idx];
    const double scal = traj.diagnostics[idx].scal;
    ConvergencePoint point;
    point.t = traj.times[idx];
    const auto ext = conditions::sectional_extremes(state, walk);
    point.pinching_ratio = conditions::pointwise_pinching_ratio(ext);
    point.ray_distance = ray_distance(state, scal, unit, scal_const);
    report.series.push_back(point);
  }

  for (const auto& p : report.series)
    if (p.pinching_ratio > config.ratio_threshold)
      report.ratio_exceeded_threshold = true;
  report.final_ray_distance = report.series.back().ray_distance;

  const double t_last = report.series.back().t;
  bool monotone = true;
  const ConvergencePoint* prev = nullptr;
  for (const auto& p : report.series) {
    if (p.t < 0.75 * t_last) continue;
    if (prev && p.ray_distance > prev->ray_distance + 1e-12) monotone = false;
    prev = &p;
  }
  report.ray_monotone_final_quarter = monotone;
  return report;
}

// ============================================================================
// Interior estimate
// ============================================================================

std::vector<InteriorEstimatePoint> interior_estimate_monitor(
    const FlowTrajectory& trajectory, double rho) {
  if (trajectory.states.empty())
    throw SpecInvalid("empty trajectory");
  if (trajectory.states.front().dim() != 3)
    throw WrongDimension("the interior estimate is three-dimensional");
  if (!(rho > 0.0)) throw SpecInvalid("rho must be positive");
  const double sigma = rho * rho;

  std::vector<InteriorEstimatePoint> out;
  out.reserve(trajectory.states.size());
  for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
    const CurvatureTensor& state = trajectory.states[i];
    const Eigen::MatrixXd ric = core::ricci(state);
    const double scal = ric.trace();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        ric - rho * scal * Eigen::MatrixXd::Identity(3, 3));
    const double tol = 1e-9 * std::max(1.0, state.max_abs());
    if (scal < -tol || eig.eigenvalues()[0] < -tol)
      throw HypothesisViolated(
          "state violates Ric >= rho scal g >= 0 at t = " +
          std::to_string(trajectory.times[i]));

    InteriorEstimatePoint p;
    p.t = trajectory.times[i];
    const Eigen::MatrixXd ric0 =
        ric - (scal / 3.0) * Eigen::MatrixXd::Identity(3, 3);
    const double ric0_sq = ric0.squaredNorm();
    if (p.t <= 0.0 || scal <= 0.0) {
      p.q = 0.0;  // the bound degenerates at t = 0 and at the flat point
    } else {
      p.q = ric0_sq /
            (std::pow(3.0 / (2.0 * p.t), sigma) * std::pow(scal, 2.0 - sigma));
    }
    p.exceeds = p.q > 1.0;
    out.push_back(p);
  }
  return out;
}

}  // namespace curvlab::flow
