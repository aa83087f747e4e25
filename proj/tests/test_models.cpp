// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/models.hpp"

#include <doctest.h>

#include <cmath>

#include "curvlab/quantities.hpp"
#include "oracles.hpp"

using namespace curvlab;
using namespace curvlab::core;
using namespace curvlab::models;
using conditions::ConeId;

TEST_CASE("constant curvature builder") {
  const auto r = build(ModelSpec::constant(4, 1.0));
  CHECK(scalar(r) == doctest::Approx(12.0).epsilon(1e-14));
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd p = oracles::random_frame(4, 2, rng);
    CHECK(sectional(r, p.col(0), p.col(1)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("product tensors: factor planes keep their curvature, mixed planes are flat") {
  const auto s2 = ModelSpec::constant(2, 1.0);
  const auto s3 = ModelSpec::constant(3, 0.5);
  const auto r = build(ModelSpec::product(s2, s3));
  CHECK(r.dim() == 5);
  Eigen::VectorXd e0 = Eigen::VectorXd::Unit(5, 0), e1 = Eigen::VectorXd::Unit(5, 1),
                  e2 = Eigen::VectorXd::Unit(5, 2), e3 = Eigen::VectorXd::Unit(5, 3);
  CHECK(sectional(r, e0, e1) == doctest::Approx(1.0));   // factor A
  CHECK(sectional(r, e2, e3) == doctest::Approx(0.5));   // factor B
  CHECK(sectional(r, e0, e2) == doctest::Approx(0.0));   // mixed
  // Random-plane sampling: mixed planes vanish.
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(5), b = Eigen::VectorXd::Zero(5);
    a.head(2) = rng.gaussian_vector(2);
    b.tail(3) = rng.gaussian_vector(3);
    a.normalize();
    b.normalize();
    CHECK(r.eval(a, b, a, b) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("random tensors are deterministic and Bianchi-projected") {
  const auto a = random_tensor(4, 42, 1.0);
  const auto b = random_tensor(4, 42, 1.0);
  CHECK((a.pair_matrix() - b.pair_matrix()).cwiseAbs().maxCoeff() == 0.0);
  const auto c = random_tensor(4, 43, 1.0);
  CHECK((a.pair_matrix() - c.pair_matrix()).cwiseAbs().maxCoeff() > 1e-3);
  CHECK(a.bianchi_residual() < 1e-12);
}

TEST_CASE("ensemble mean of scal vanishes within three standard errors") {
  // Monte Carlo oracle for the centered component distribution.
  const int samples = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double v = scalar(random_tensor(4, 10000 + s, 1.0));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / samples;
  const double variance = (sum_sq - samples * mean * mean) / (samples - 1);
  const double se = std::sqrt(variance / samples);
  CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("model grammar round-trips") {
  for (const char* text : {
           "const(4,1)",
           "fs(2)",
           "prod(const(2,1),const(2,1))",
           "flat(const(4,1),1)",
           "rand(5,seed=7,scale=0.29999999999999999)",
           "shift(rand(4,seed=3,scale=1),pic,0)",
           "shift(rand(4,seed=3,scale=1),pinch(0.3),0.5)",
       }) {
    const ModelSpec spec = parse_model(text);
    const std::string printed = print_model(spec);
    CHECK(print_model(parse_model(printed)) == printed);
  }
  // Positional and named rand arguments agree.
  CHECK(print_model(parse_model("rand(4,3,1.0)")) ==
        print_model(parse_model("rand(4,seed=3,scale=1)")));
  CHECK(parse_model("prod(const(2,1),const(2,1))").total_dim() == 4);
}

TEST_CASE("model grammar errors carry positions") {
  CHECK_THROWS_AS(parse_model("noodle(3)"), ParseError);
  CHECK_THROWS_AS(parse_model("const(4"), ParseError);
  CHECK_THROWS_AS(parse_model("const(4,1) trailing"), ParseError);
  CHECK_THROWS_AS(parse_model("shift(rand(4,1,1),nocone,0)"), ParseError);
  CHECK_THROWS_AS(parse_model("const(1,1)"), SpecInvalid);
}

TEST_CASE("shift_into_cone closed-form cones") {
  const auto r = random_tensor(4, 3, 1.0);
  SUBCASE("already inside leaves the tensor unchanged") {
    const auto unit = build(ModelSpec::constant(4, 1.0));
    const auto shifted = shift_into_cone(unit, ConeId::operator_nonneg(), 1.0);
    CHECK(shifted.shift == 0.0);
    CHECK((shifted.tensor.pair_matrix() - unit.pair_matrix()).cwiseAbs().maxCoeff() ==
          0.0);
  }
  SUBCASE("operator cone margin hits the target") {
    const auto shifted = shift_into_cone(r, ConeId::operator_nonneg(), 0.25);
    CHECK(shifted.certificate.margin == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(shifted.shift > 0.0);
  }
  SUBCASE("two-positive margin hits the target") {
    const auto shifted = shift_into_cone(r, ConeId::two_positive(), 0.1);
    CHECK(shifted.certificate.margin == doctest::Approx(0.1).epsilon(1e-10));
  }
  SUBCASE("sectional margin hits the target") {
    const auto shifted = shift_into_cone(r, ConeId::sec_nonneg(), 0.05);
    CHECK(shifted.certificate.margin ==
          doctest::Approx(0.05).epsilon(1e-6));
  }
  SUBCASE("ricci pinching") {
    const auto shifted = shift_into_cone(r, ConeId::ric_pinched(0.1), 0.0);
    CHECK(std::abs(shifted.certificate.margin) < 1e-9);
  }
}

TEST_CASE("shift_into_cone produces certified pic boundary tensors") {
  for (std::uint64_t seed : {11ull, 12ull}) {
    const auto r = random_tensor(4, seed, 1.0);
    conditions::MarginOptions opts;
    opts.seed = seed;
    const auto shifted = shift_into_cone(r, ConeId::pic(), 0.0, opts);
    CHECK(shifted.certificate.margin >= -1e-9);
    CHECK(shifted.certificate.margin <= 1e-8);
    // The certified minimizing frame evaluates to the margin.
    const Frame4 f(*shifted.certificate.minimizer.frame);
    CHECK(std::abs(isotropic_quantity(shifted.tensor, f) -
                   shifted.certificate.margin) < 1e-12);
    // Sampling oracle: no frame goes below the certified margin.
    CHECK(oracles::sampled_isotropic_min(shifted.tensor, 100000, seed + 1) >
          shifted.certificate.margin - 1e-9);
  }
}

TEST_CASE("shift_into_cone reaches positive pic2 targets") {
  const auto r = random_tensor(5, 21, 1.0);
  conditions::MarginOptions opts;
  opts.seed = 21;
  const auto shifted = shift_into_cone(r, ConeId::pic2(), 0.1, opts);
  CHECK(shifted.certificate.margin == doctest::Approx(0.1).epsilon(1e-6));
  const auto recheck = conditions::cone_margin(shifted.tensor, ConeId::pic2(), opts);
  CHECK(recheck.margin == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("flat extension of the round sphere") {
  // S^{n-1}(kappa) x R realizes: sectional minimum 0, pic margin 2 kappa,
  // pic1 margin 0 at lambda = 0 configurations.
  const double kappa = 0.8;
  const auto r = build(ModelSpec::flat_extend(ModelSpec::constant(4, kappa), 1));
  CHECK(r.dim() == 5);

  const auto ext = conditions::sectional_extremes(r);
  CHECK(ext.k_min == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ext.k_max == doctest::Approx(kappa).epsilon(1e-9));

  const auto pic = conditions::cone_margin(r, ConeId::pic());
  CHECK(pic.margin == doctest::Approx(2.0 * kappa).epsilon(1e-8));

  const auto pic1 = conditions::cone_margin(r, ConeId::pic1());
  CHECK(std::abs(pic1.margin) < 1e-9);
  CHECK(*pic1.minimizer.lambda == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("fubini-study is Einstein for several m") {
  for (int m : {1, 2, 3}) {
    const auto r = build(ModelSpec::fubini_study(m));
    const int n = 2 * m;
    const Eigen::MatrixXd ric = ricci(r);
    const Eigen::MatrixXd ric0 =
        ric - (ric.trace() / n) * Eigen::MatrixXd::Identity(n, n);
    CHECK(ric0.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("builders are deterministic") {
  const auto spec = parse_model("shift(rand(4,seed=9,scale=1),pic,0.2)");
  const auto a = build(spec);
  const auto b = build(spec);
  CHECK((a.pair_matrix() - b.pair_matrix()).cwiseAbs().maxCoeff() == 0.0);
}
