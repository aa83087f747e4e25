// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/ode.hpp"

#include <doctest.h>

#include <cmath>

#include "curvlab/models.hpp"
#include "curvlab/quantities.hpp"
#include "oracles.hpp"

using namespace curvlab;
using namespace curvlab::core;
using namespace curvlab::flow;
using models::ModelSpec;

namespace {
double ricci_norm_sq(const CurvatureTensor& r) {
  return ricci(r).squaredNorm();
}
double q_trace(const CurvatureTensor& q) {
  double tr = 0.0;
  for (int i = 0; i < q.dim(); ++i)
    for (int j = 0; j < q.dim(); ++j) tr += q.component(i, j, i, j);
  return tr;
}
}  // namespace

TEST_CASE("q_tensor on the zero tensor") {
  CHECK(q_tensor(CurvatureTensor::zero(4)).max_abs() == 0.0);
}

TEST_CASE("q_tensor of constant curvature: Q_1212 = 2(n-1) kappa^2") {
  for (int n : {3, 5}) {
    const auto r = models::build(ModelSpec::constant(n, 1.0));
    const auto q = q_tensor(r);
    CHECK(q.component(0, 1, 0, 1) ==
          doctest::Approx(2.0 * (n - 1)).epsilon(1e-13));
    // Q of a constant-curvature tensor stays on the constant-curvature ray.
    const auto expected =
        models::build(ModelSpec::constant(n, 1.0)) * (2.0 * (n - 1));
    CHECK((q.pair_matrix() - expected.pair_matrix()).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("q_tensor matches the componentwise reference") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const int n = 4 + static_cast<int>(seed % 2);
    const auto r = models::random_tensor(n, seed, 1.0);
    const auto fast = q_tensor(r);
    const auto ref = q_tensor_reference(r);
    const double scale = std::max(1.0, ref.max_abs());
    CHECK((fast.pair_matrix() - ref.pair_matrix()).cwiseAbs().maxCoeff() /
              scale < 1e-12);
  }
}

TEST_CASE("raw componentwise Q has the tensor symmetries and keeps Bianchi") {
  // 100 random Bianchi-projected tensors; residuals below 1e-10.
  double worst_sym = 0.0, worst_bianchi = 0.0, worst_trace = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + trial % 2;
    const auto r = models::random_tensor(n, 500 + trial, 1.0);
    const auto raw = oracles::q_raw(r);
    worst_sym = std::max(worst_sym, oracles::raw_symmetry_residual(raw, n));
    worst_bianchi =
        std::max(worst_bianchi, oracles::raw_bianchi_residual(raw, n));
    // Trace identity: sum_ij Q_ijij = 2 |Ric|^2 (needs the Bianchi identity).
    const auto q = q_tensor(r);
    worst_trace = std::max(
        worst_trace, std::abs(q_trace(q) - 2.0 * ricci_norm_sq(r)));
  }
  CHECK(worst_sym < 1e-10);
  CHECK(worst_bianchi < 1e-10);
  CHECK(worst_trace < 1e-10);
}

TEST_CASE("q_tensor is O(n)-equivariant and quadratic under scaling") {
  const auto r = models::random_tensor(5, 9, 1.0);
  Rng rng(10);
  const Eigen::MatrixXd q = oracles::random_frame(5, 5, rng);
  const auto lhs = q_tensor(rotate(r, q));
  const auto rhs = rotate(q_tensor(r), q);
  CHECK((lhs.pair_matrix() - rhs.pair_matrix()).cwiseAbs().maxCoeff() < 1e-9);

  const double c = 1.7;
  const auto scaled = q_tensor(r * c);
  CHECK((scaled.pair_matrix() - q_tensor(r).pair_matrix() * (c * c))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("round-sphere reaction ODE has the closed-form solution") {
  // kappa(t) = kappa0 / (1 - 2(n-1) kappa0 t).
  StepControl ctl;
  ctl.rel_tol = 1e-10;
  const auto r0 = models::build(ModelSpec::constant(3, 1.0));
  const auto traj = integrate(r0, 0.2, ctl);
  CHECK(traj.status == FlowStatus::ReachedEnd);
  const double kappa = 1.0 / (1.0 - 4.0 * 0.2);
  const double expected_scal = 3.0 * 2.0 * kappa;  // n(n-1) kappa = 30
  CHECK(traj.diagnostics.back().scal ==
        doctest::Approx(expected_scal).epsilon(1e-6));
  // Times are strictly increasing.
  for (std::size_t i = 1; i < traj.times.size(); ++i)
    CHECK(traj.times[i] > traj.times[i - 1]);
}

TEST_CASE("zero tensor is a fixed point") {
  const auto traj = integrate(CurvatureTensor::zero(4), 1.0, StepControl{});
  CHECK(traj.status == FlowStatus::ReachedEnd);
  CHECK(traj.diagnostics.back().norm_inf == 0.0);
}

TEST_CASE("blowup is detected near the analytic time") {
  // n = 3, kappa0 = 1 blows up at t = 1/(2(n-1)) = 0.25.
  StepControl ctl;
  ctl.rel_tol = 1e-8;
  const auto traj =
      integrate(models::build(ModelSpec::constant(3, 1.0)), 0.3, ctl);
  CHECK(traj.status == FlowStatus::BlowupReached);
  CHECK(traj.blowup_estimate == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("max-steps exhaustion is reported") {
  StepControl ctl;
  ctl.max_steps = 3;
  const auto traj =
      integrate(models::build(ModelSpec::constant(3, 1.0)), 0.2, ctl);
  CHECK(traj.status == FlowStatus::MaxStepsExceeded);
}

TEST_CASE("rk4 shows fourth-order convergence on the round sphere") {
  const auto r0 = models::build(ModelSpec::constant(3, 1.0));
  auto run_with = [&](double h) {
    StepControl ctl;
    ctl.method = StepMethod::RK4;
    ctl.h_init = h;
    const auto traj = integrate(r0, 0.2, ctl);
    const double exact = 6.0 / (1.0 - 4.0 * 0.2);
    return std::abs(traj.diagnostics.back().scal - exact);
  };
  const double e1 = run_with(0.01);
  const double e2 = run_with(0.005);
  CHECK(e1 / e2 > 10.0);
  CHECK(e1 / e2 < 25.0);
}

TEST_CASE("scalar curvature obeys d(scal)/dt = 2 |Ric|^2 along flows") {
  StepControl ctl;
  ctl.rel_tol = 1e-10;
  const auto r0 = models::random_tensor(4, 33, 0.5);
  const auto traj = integrate(r0, 0.05, ctl);
  REQUIRE(traj.states.size() > 4);
  // Centered finite differences on the recorded diagnostics.
  for (std::size_t i = 2; i + 2 < traj.states.size(); i += 3) {
    const double dt = traj.times[i + 1] - traj.times[i - 1];
    const double fd =
        (traj.diagnostics[i + 1].scal - traj.diagnostics[i - 1].scal) / dt;
    const double expected = 2.0 * ricci_norm_sq(traj.states[i]);
    // The diagnostics are first-order samples; allow a loose band.
    CHECK(fd == doctest::Approx(expected).epsilon(5e-3));
  }
}

TEST_CASE("normalized state view rescales to the target scalar curvature") {
  StepControl ctl;
  ctl.normalize = {Normalization::Kind::FixedScal, 6.0};
  const auto traj =
      integrate(models::build(ModelSpec::constant(3, 1.0)), 0.2, ctl);
  const auto mid = traj.state_normalized(traj.states.size() / 2);
  CHECK(scalar(mid) == doctest::Approx(6.0).epsilon(1e-12));
  // Raw states keep the unnormalized trajectory.
  CHECK(traj.diagnostics.back().scal > 6.0);
}

TEST_CASE("boundary inward value") {
  SUBCASE("round sphere is strictly inward everywhere") {
    const auto r = models::build(ModelSpec::constant(5, 1.0));
    Rng rng(3);
    const Frame4 f(oracles::random_frame(5, 4, rng));
    CHECK(boundary_inward_value(r, f) > 0.0);
  }
  SUBCASE("S2 x S2 split frame sits on the boundary, value >= 0") {
    const auto r = models::build(ModelSpec::product(ModelSpec::constant(2, 1.0),
                                                    ModelSpec::constant(2, 1.0)));
    const Frame4 f(Eigen::MatrixXd::Identity(4, 4));
    REQUIRE(std::abs(isotropic_quantity(r, f)) < 1e-14);
    CHECK(boundary_inward_value(r, f) >= -1e-9);
  }
}

TEST_CASE("key inequality data") {
  SUBCASE("round sphere has vanishing first-variation residuals") {
    const auto r = models::build(ModelSpec::constant(5, 1.0));
    Rng rng(4);
    const Frame4 f(oracles::random_frame(5, 4, rng));
    const auto rep = key_inequality_residual(r, f);
    CHECK(rep.step1_residual < 1e-12);
    CHECK(rep.step2_residual < 1e-12);
  }
  SUBCASE("S2 x S2 split frame satisfies the key inequality") {
    const auto r = models::build(ModelSpec::product(ModelSpec::constant(2, 1.0),
                                                    ModelSpec::constant(2, 1.0)));
    const Frame4 f(Eigen::MatrixXd::Identity(4, 4));
    const auto rep = key_inequality_residual(r, f);
    CHECK(rep.step1_residual < 1e-13);
    CHECK(rep.step2_residual < 1e-13);
    CHECK(rep.residual >= -1e-12);
    CHECK(rep.lhs - rep.rhs == doctest::Approx(rep.residual));
    CHECK(rep.block_frame + rep.block_mixed + rep.block_tail ==
          doctest::Approx(rep.residual).epsilon(1e-10));
  }
  SUBCASE("fubini-study minimizing frame satisfies the key inequality") {
    const auto r = models::build(ModelSpec::fubini_study(2));
    const Frame4 f(Eigen::MatrixXd::Identity(4, 4));
    REQUIRE(std::abs(isotropic_quantity(r, f)) < 1e-13);
    const auto rep = key_inequality_residual(r, f);
    CHECK(rep.step1_residual < 1e-10);
    CHECK(rep.residual >= -1e-10);
    CHECK(boundary_inward_value(r, f) >= -1e-10);
  }
}
