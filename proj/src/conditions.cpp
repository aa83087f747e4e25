// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace curvlab::conditions {

using core::FrameComponents;

// ============================================================================
// ConeId
// ============================================================================

ConeId ConeId::pointwise_pinched(double delta) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw SpecInvalid("pinching delta must lie in (0, 1]");
  return {ConeKind::PointwisePinched, delta};
}

ConeId ConeId::ric_pinched(double rho) {
  if (!(rho > 0.0)) throw SpecInvalid("rho must be positive");
  return {ConeKind::RicPinched, 0.0, rho};
}

ConeId ConeId::pic1_scal_margin(double rho) {
  if (!(rho > 0.0)) throw SpecInvalid("rho must be positive");
  return {ConeKind::Pic1ScalMargin, 0.0, rho, LambdaRange::ZeroOne};
}

ConeId ConeId::pic2_scal_margin(double rho, LambdaRange r) {
  if (!(rho > 0.0)) throw SpecInvalid("rho must be positive");
  return {ConeKind::Pic2ScalMargin, 0.0, rho, r};
}

namespace {
std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}
}  // namespace

std::string ConeId::name() const {
  switch (kind) {
    case ConeKind::SecNonneg: return "sec";
    case ConeKind::Pic: return "pic";
    case ConeKind::Pic1:
      return range == LambdaRange::SymmetricOne ? "pic1[sym]" : "pic1";
    case ConeKind::Pic2:
      return range == LambdaRange::SymmetricOne ? "pic2[sym]" : "pic2";
    case ConeKind::TwoPositive: return "2pos";
    case ConeKind::OperatorNonneg: return "op";
    case ConeKind::PointwisePinched:
      return "pinch(" + format_number(delta) + ")";
    case ConeKind::RicPinched: return "ricpinch(" + format_number(rho) + ")";
    case ConeKind::Pic1ScalMargin:
      return "pic1scal(" + format_number(rho) + ")";
    case ConeKind::Pic2ScalMargin:
      return "pic2scal(" + format_number(rho) + ")";
  }
  return "?";
}

bool ConeId::needs_frames() const { return is_isotropic_family(); }

ConeId parse_cone(const std::string& text) {
  auto open = text.find('(');
  std::string head = text.substr(0, open);
  double arg = 0.0;
  bool has_arg = false;
  if (open != std::string::npos) {
    auto close = text.find(')', open);
    if (close == std::string::npos)
      throw ParseError("missing ')' in cone '" + text + "'", text.size());
    try {
      arg = std::stod(text.substr(open + 1, close - open - 1));
      has_arg = true;
    } catch (const std::exception&) {
      throw ParseError("bad numeric argument in cone '" + text + "'", open + 1);
    }
  }
  if (head == "sec") return ConeId::sec_nonneg();
  if (head == "pic") return ConeId::pic();
  if (head == "pic1") return ConeId::pic1();
  if (head == "pic2") return ConeId::pic2();
  if (head == "2pos") return ConeId::two_positive();
  if (head == "op") return ConeId::operator_nonneg();
  if (head == "pinch") return ConeId::pointwise_pinched(has_arg ? arg : 0.25);
  if (head == "ricpinch") {
    if (!has_arg) throw ParseError("ricpinch requires rho", 0);
    return ConeId::ric_pinched(arg);
  }
  if (head == "pic1scal") {
    if (!has_arg) throw ParseError("pic1scal requires rho", 0);
    return ConeId::pic1_scal_margin(arg);
  }
  if (head == "pic2scal") {
    if (!has_arg) throw ParseError("pic2scal requires rho", 0);
    return ConeId::pic2_scal_margin(arg);
  }
  throw ParseError("unknown cone '" + text + "'", 0);
}

// ============================================================================
// Weight minimization for a fixed frame
// ============================================================================

WeightedMin minimize_weights(const FrameComponents& c, const ConeId& cone) {
  const double lo = core::lambda_lo(cone.range);
  const double hi = core::lambda_hi;
  switch (cone.kind) {
    case ConeKind::Pic:
      return {core::isotropic_from(c), 1.0, 1.0};
    case ConeKind::Pic1:
    case ConeKind::Pic1ScalMargin: {
      const auto q = opt::minimize_quadratic(c.s14 + c.s24, -2.0 * c.s1234,
                                             c.s13 + c.s23, lo, hi);
      return {q.value, q.t, 1.0};
    }
    case ConeKind::Pic2:
    case ConeKind::Pic2ScalMargin: {
      // Alternating exact one-variable minimization from several starts, with
      // a 33 x 33 grid fallback when the alternation fails to settle.
      auto value = [&](double l, double m) { return core::pic2_from(c, l, m); };
      auto best_lambda = [&](double m) {
        return opt::minimize_quadratic(c.s14 + m * m * c.s24,
                                       -2.0 * m * c.s1234,
                                       c.s13 + m * m * c.s23, lo, hi);
      };
      auto best_mu = [&](double l) {
        return opt::minimize_quadratic(c.s23 + l * l * c.s24,
                                       -2.0 * l * c.s1234,
                                       c.s13 + l * l * c.s14, lo, hi);
      };
      WeightedMin best{value(lo, lo), lo, lo};
      auto consider = [&](double l, double m) {
        const double v = value(l, m);
        if (v < best.value) best = {v, l, m};
      };
      auto alternate = [&](double l, double m) {
        double v = value(l, m);
        for (int it = 0; it < 64; ++it) {
          const auto ql = best_lambda(m);
          l = ql.t;
          const auto qm = best_mu(l);
          m = qm.t;
          if (v - qm.value < 1e-15 * (1.0 + std::abs(v))) {
            v = qm.value;
            break;
          }
          v = qm.value;
        }
        consider(l, m);
        return v;
      };
      for (double l0 : {lo, hi})
        for (double m0 : {lo, hi}) alternate(l0, m0);
      if (lo < 0.0) alternate(0.0, 0.0);
      // Grid fallback guards alternation getting trapped between basins.
      double coarse = best.value;
      for (int a = 0; a <= 32; ++a)
        for (int b = 0; b <= 32; ++b) {
          const double l = lo + (hi - lo) * a / 32.0;
          const double m = lo + (hi - lo) * b / 32.0;
          if (value(l, m) < coarse - 1e-13 * (1.0 + std::abs(coarse))) {
            alternate(l, m);
            coarse = best.value;
          }
        }
      return best;
    }
    default:
      throw SpecInvalid("minimize_weights: not a frame-family cone");
  }
}

// ============================================================================
// Stiefel objectives
// ============================================================================

namespace {

// Ambient gradient of the weighted quantity at fixed weights (Danskin).
Eigen::MatrixXd frame_family_gradient(const CurvatureTensor& r,
                                      const Eigen::MatrixXd& f, double lambda,
                                      double mu) {
  const Eigen::VectorXd v1 = f.col(0), v2 = f.col(1), v3 = f.col(2),
                        v4 = f.col(3);
  const double w13 = 1.0, w14 = lambda * lambda, w23 = mu * mu,
               w24 = lambda * lambda * mu * mu, wx = -2.0 * lambda * mu;
  Eigen::MatrixXd g(f.rows(), 4);
  g.col(0) = 2.0 * w13 * r.eval_grad(0, v3, v1, v3) +
             2.0 * w14 * r.eval_grad(0, v4, v1, v4) +
             wx * r.eval_grad(0, v2, v3, v4);
  g.col(1) = 2.0 * w23 * r.eval_grad(0, v3, v2, v3) +
             2.0 * w24 * r.eval_grad(0, v4, v2, v4) +
             wx * r.eval_grad(1, v1, v3, v4);
  g.col(2) = 2.0 * w13 * r.eval_grad(1, v1, v1, v3) +
             2.0 * w23 * r.eval_grad(1, v2, v2, v3) +
             wx * r.eval_grad(2, v1, v2, v4);
  g.col(3) = 2.0 * w14 * r.eval_grad(1, v1, v1, v4) +
             2.0 * w24 * r.eval_grad(1, v2, v2, v4) +
             wx * r.eval_grad(3, v1, v2, v3);
  return g;
}

FrameComponents components_of(const CurvatureTensor& r,
                              const Eigen::MatrixXd& f) {
  const Eigen::VectorXd v1 = f.col(0), v2 = f.col(1), v3 = f.col(2),
                        v4 = f.col(3);
  return FrameComponents{r.eval(v1, v3, v1, v3), r.eval(v1, v4, v1, v4),
                         r.eval(v2, v3, v2, v3), r.eval(v2, v4, v2, v4),
                         r.eval(v1, v2, v3, v4)};
}

opt::StiefelSettings to_stiefel(const MarginOptions& o, std::uint64_t salt,
                                double scale_hint) {
  opt::StiefelSettings s;
  s.restarts = o.restarts;
  s.max_iterations = o.max_iterations;
  s.stationarity_tol = o.stationarity_tol;
  s.seed = derive_seed(o.seed, salt);
  s.scale_hint = scale_hint;
  s.warm_starts = o.warm_starts;
  return s;
}

// Minimum of the frame-family quantity over frames and weights.
struct FrameFamilyMin {
  opt::StiefelResult stiefel;
  double lambda;
  double mu;
};

FrameFamilyMin minimize_frame_family(const CurvatureTensor& r,
                                     const ConeId& cone,
                                     const MarginOptions& options) {
  if (r.dim() < 4)
    throw WrongDimension("isotropic-family cones require n >= 4");
  opt::StiefelObjective obj;
  obj.n = r.dim();
  obj.k = 4;
  obj.value = [&r, cone](const Eigen::MatrixXd& f) {
    return minimize_weights(components_of(r, f), cone).value;
  };
  obj.gradient = [&r, cone](const Eigen::MatrixXd& f) {
    const auto w = minimize_weights(components_of(r, f), cone);
    return frame_family_gradient(r, f, w.lambda, w.mu);
  };
  auto settings = to_stiefel(options, 0x11, r.max_abs());
  if (cone.kind != ConeKind::Pic && options.warm_starts.empty()) {
    // The weighted objectives develop wide basins around their weight-zero
    // (pure sectional) minima that can hide the full-weight minimum. The
    // isotropic minimizer sits at admissible weights (1, 1), so seed the
    // search with it. Caller-provided warm starts already carry tracked
    // minimizers and skip the pre-solve.
    MarginOptions pre = options;
    pre.restarts = std::max(8, options.restarts / 4);
    const auto pic_min = minimize_frame_family(r, ConeId::pic(), pre);
    settings.warm_starts.insert(settings.warm_starts.begin(),
                                pic_min.stiefel.minimizer);
  }
  auto result = minimize_on_stiefel(obj, settings);
  const auto w = minimize_weights(components_of(r, result.minimizer), cone);
  return FrameFamilyMin{std::move(result), w.lambda, w.mu};
}

opt::StiefelResult minimize_sectional(const CurvatureTensor& r, double sign,
                                      const MarginOptions& options,
                                      std::uint64_t salt) {
  opt::StiefelObjective obj;
  obj.n = r.dim();
  obj.k = 2;
  obj.value = [&r, sign](const Eigen::MatrixXd& p) {
    return sign * r.eval(p.col(0), p.col(1), p.col(0), p.col(1));
  };
  obj.gradient = [&r, sign](const Eigen::MatrixXd& p) {
    Eigen::MatrixXd g(p.rows(), 2);
    g.col(0) = sign * 2.0 * r.eval_grad(0, p.col(1), p.col(0), p.col(1));
    g.col(1) = sign * 2.0 * r.eval_grad(1, p.col(0), p.col(0), p.col(1));
    return g;
  };
  return minimize_on_stiefel(obj, to_stiefel(options, salt, r.max_abs()));
}

opt::StiefelResult minimize_component_1234(const CurvatureTensor& r,
                                           double sign,
                                           const MarginOptions& options,
                                           std::uint64_t salt) {
  opt::StiefelObjective obj;
  obj.n = r.dim();
  obj.k = 4;
  obj.value = [&r, sign](const Eigen::MatrixXd& f) {
    return sign * r.eval(f.col(0), f.col(1), f.col(2), f.col(3));
  };
  obj.gradient = [&r, sign](const Eigen::MatrixXd& f) {
    Eigen::MatrixXd g(f.rows(), 4);
    g.col(0) = sign * r.eval_grad(0, f.col(1), f.col(2), f.col(3));
    g.col(1) = sign * r.eval_grad(1, f.col(0), f.col(2), f.col(3));
    g.col(2) = sign * r.eval_grad(2, f.col(0), f.col(1), f.col(3));
    g.col(3) = sign * r.eval_grad(3, f.col(0), f.col(1), f.col(2));
    return g;
  };
  return minimize_on_stiefel(obj, to_stiefel(options, salt, r.max_abs()));
}

ConditionReport degenerate_report(const CurvatureTensor& r,
                                  const ConeId& cone,
                                  const MarginOptions& options) {
  ConditionReport rep;
  rep.cone = cone;
  rep.margin = 0.0;
  rep.degenerate = true;
  rep.converged = true;
  rep.seed = options.seed;
  const int n = r.dim();
  if (cone.needs_frames() && n >= 4) {
    rep.minimizer.frame = Eigen::MatrixXd::Identity(n, 4);
    rep.minimizer.lambda = 0.0;
    rep.minimizer.mu = 0.0;
  } else if (cone.kind == ConeKind::TwoPositive ||
             cone.kind == ConeKind::OperatorNonneg) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n * (n - 1) / 2);
    phi[0] = 1.0;
    rep.minimizer.two_form = phi;
  } else {
    rep.minimizer.plane = Eigen::MatrixXd::Identity(n, 2);
  }
  return rep;
}

}  // namespace

// ============================================================================
// Sectional extremes and pinching
// ============================================================================

SectionalExtremes sectional_extremes(const CurvatureTensor& r,
                                     const MarginOptions& options) {
  if (r.dim() < 2) throw WrongDimension("sectional extremes require n >= 2");
  // All quantities are homogeneous in R; optimize at unit max-norm so the
  // tolerances keep their meaning at every scale.
  const double scale = r.max_abs();
  if (scale != 0.0 && scale != 1.0) {
    SectionalExtremes out = sectional_extremes(r * (1.0 / scale), options);
    out.k_min *= scale;
    out.k_max *= scale;
    return out;
  }
  SectionalExtremes out;
  auto lo = minimize_sectional(r, +1.0, options, 0x21);
  auto hi = minimize_sectional(r, -1.0, options, 0x22);
  out.k_min = lo.value;
  out.k_max = -hi.value;
  out.plane_min = lo.minimizer;
  out.plane_max = hi.minimizer;
  out.restarts_used = lo.restarts_used + hi.restarts_used;
  out.converged = lo.converged && hi.converged;
  return out;
}

double pointwise_pinching_ratio(const SectionalExtremes& extremes) {
  if (!(extremes.k_max > 0.0))
    throw NonpositiveCurvature("pinching ratio requires K_max > 0");
  return extremes.k_min / extremes.k_max;
}

double pointwise_pinching_ratio(const CurvatureTensor& r,
                                const MarginOptions& options) {
  return pointwise_pinching_ratio(sectional_extremes(r, options));
}

// ============================================================================
// cone_margin
// ============================================================================

ConditionReport cone_margin(const CurvatureTensor& r, const ConeId& cone,
                            const MarginOptions& options) {
  if (r.max_abs() == 0.0) return degenerate_report(r, cone, options);

  // Margins are homogeneous degree 1; certificates are scale free. Optimize
  // at unit max-norm and scale the margin back.
  const double scale = r.max_abs();
  if (scale != 1.0) {
    ConditionReport rep = cone_margin(r * (1.0 / scale), cone, options);
    rep.margin *= scale;
    return rep;
  }

  ConditionReport rep;
  rep.cone = cone;
  rep.seed = options.seed;

  switch (cone.kind) {
    case ConeKind::SecNonneg: {
      const auto ext = sectional_extremes(r, options);
      rep.margin = ext.k_min;
      rep.minimizer.plane = ext.plane_min;
      rep.restarts_used = ext.restarts_used;
      rep.converged = ext.converged;
      return rep;
    }
    case ConeKind::PointwisePinched: {
      const auto ext = sectional_extremes(r, options);
      rep.margin = std::min(ext.k_min, ext.k_min - cone.delta * ext.k_max);
      rep.minimizer.plane = ext.plane_min;
      rep.minimizer.plane_b = ext.plane_max;
      rep.restarts_used = ext.restarts_used;
      rep.converged = ext.converged;
      return rep;
    }
    case ConeKind::Pic:
    case ConeKind::Pic1:
    case ConeKind::Pic2: {
      const auto m = minimize_frame_family(r, cone, options);
      rep.margin = m.stiefel.value;
      rep.minimizer.frame = m.stiefel.minimizer;
      rep.minimizer.lambda = m.lambda;
      rep.minimizer.mu = m.mu;
      rep.restarts_used = m.stiefel.restarts_used;
      rep.converged = m.stiefel.converged;
      rep.ambiguous_minimizer = m.stiefel.distinct_near_minimizers > 0;
      return rep;
    }
    case ConeKind::Pic1ScalMargin:
    case ConeKind::Pic2ScalMargin: {
      const auto m = minimize_frame_family(r, cone, options);
      const double scal = core::scalar(r);
      rep.margin = std::min(m.stiefel.value - cone.rho * scal, scal);
      rep.minimizer.frame = m.stiefel.minimizer;
      rep.minimizer.lambda = m.lambda;
      rep.minimizer.mu = m.mu;
      rep.restarts_used = m.stiefel.restarts_used;
      rep.converged = m.stiefel.converged;
      rep.ambiguous_minimizer = m.stiefel.distinct_near_minimizers > 0;
      return rep;
    }
    case ConeKind::TwoPositive:
    case ConeKind::OperatorNonneg: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
          core::operator_matrix(r));
      const auto& values = eig.eigenvalues();
      if (cone.kind == ConeKind::OperatorNonneg) {
        rep.margin = values[0];
        rep.minimizer.two_form = eig.eigenvectors().col(0);
      } else {
        if (values.size() < 2)
          throw WrongDimension("two-positivity needs at least two two-forms");
        rep.margin = values[0] + values[1];
        rep.minimizer.two_form = eig.eigenvectors().col(0);
        rep.minimizer.two_form_b = eig.eigenvectors().col(1);
      }
      rep.converged = true;
      return rep;
    }
    case ConeKind::RicPinched: {
      const Eigen::MatrixXd ric = core::ricci(r);
      const double scal = ric.trace();
      const Eigen::MatrixXd shifted =
          ric - cone.rho * scal *
                    Eigen::MatrixXd::Identity(r.dim(), r.dim());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shifted);
      rep.margin = eig.eigenvalues()[0];
      rep.minimizer.vector = eig.eigenvectors().col(0);
      rep.converged = true;
      return rep;
    }
  }
  throw SpecInvalid("unknown cone");
}

double evaluate_certificate(const CurvatureTensor& r,
                            const ConditionReport& report) {
  const ConeId& cone = report.cone;
  switch (cone.kind) {
    case ConeKind::SecNonneg: {
      const auto& p = *report.minimizer.plane;
      return core::sectional(r, p.col(0), p.col(1));
    }
    case ConeKind::PointwisePinched: {
      const auto& pmin = *report.minimizer.plane;
      const auto& pmax = *report.minimizer.plane_b;
      const double kmin = core::sectional(r, pmin.col(0), pmin.col(1));
      const double kmax = core::sectional(r, pmax.col(0), pmax.col(1));
      return std::min(kmin, kmin - cone.delta * kmax);
    }
    case ConeKind::Pic:
    case ConeKind::Pic1:
    case ConeKind::Pic2: {
      const Frame4 f(*report.minimizer.frame);
      const auto c = core::frame_components(r, f);
      return core::pic2_from(c, report.minimizer.lambda.value_or(1.0),
                             report.minimizer.mu.value_or(1.0));
    }
    case ConeKind::Pic1ScalMargin:
    case ConeKind::Pic2ScalMargin: {
      const Frame4 f(*report.minimizer.frame);
      const auto c = core::frame_components(r, f);
      const double q = core::pic2_from(c, report.minimizer.lambda.value_or(1.0),
                                       report.minimizer.mu.value_or(1.0));
      const double scal = core::scalar(r);
      return std::min(q - cone.rho * scal, scal);
    }
    case ConeKind::OperatorNonneg: {
      const auto& phi = *report.minimizer.two_form;
      return phi.dot(core::operator_matrix(r) * phi);
    }
    case ConeKind::TwoPositive: {
      const auto a = core::operator_matrix(r);
      const auto& phi = *report.minimizer.two_form;
      const auto& psi = *report.minimizer.two_form_b;
      return phi.dot(a * phi) + psi.dot(a * psi);
    }
    case ConeKind::RicPinched: {
      const Eigen::MatrixXd ric = core::ricci(r);
      const double scal = ric.trace();
      const auto& v = *report.minimizer.vector;
      return v.dot((ric - cone.rho * scal *
                              Eigen::MatrixXd::Identity(r.dim(), r.dim())) *
                   v);
    }
  }
  throw SpecInvalid("unknown cone");
}

// ============================================================================
// Implications, Berger bound, quarter-pinch chain
// ============================================================================

ImplicationVerdict implication_check(const CurvatureTensor& r,
                                     const ConeId& stronger,
                                     const ConeId& weaker,
                                     const MarginOptions& options) {
  ImplicationVerdict v{cone_margin(r, stronger, options),
                       cone_margin(r, weaker, options), false};
  const double strict = strictness_threshold(r);
  v.lattice_violation =
      v.stronger.margin > strict && v.weaker.margin < -strict;
  return v;
}

BergerReport berger_bound_residual(const CurvatureTensor& r,
                                   const MarginOptions& options) {
  const double scale = r.max_abs();
  if (scale != 0.0 && scale != 1.0) {
    BergerReport rep = berger_bound_residual(r * (1.0 / scale), options);
    rep.residual *= scale;
    rep.bound *= scale;
    rep.max_component *= scale;
    rep.extremes.k_min *= scale;
    rep.extremes.k_max *= scale;
    return rep;
  }
  BergerReport rep;
  rep.extremes = sectional_extremes(r, options);
  const auto lo = minimize_component_1234(r, +1.0, options, 0x31);
  const auto hi = minimize_component_1234(r, -1.0, options, 0x32);
  rep.max_component = std::max(std::abs(lo.value), std::abs(hi.value));
  rep.bound = (2.0 / 3.0) * (rep.extremes.k_max - rep.extremes.k_min);
  rep.residual = rep.bound - rep.max_component;
  return rep;
}

QuarterPinchChain quarter_pinch_chain(double lambda, double mu, double k_min,
                                      double k_max) {
  const double l = lambda, m = mu;
  const double lhs = (1.0 + l * l + m * m + l * l * m * m) * k_min -
                     (4.0 / 3.0) * l * m * (k_max - k_min);
  const double rhs =
      ((1.0 - l * m) * (1.0 - l * m) + (l - m) * (l - m)) * k_min +
      (4.0 / 3.0) * l * m * (4.0 * k_min - k_max);
  return {lhs, rhs};
}

// ============================================================================
// Complex cross-check
// ============================================================================

CrosscheckVerdict complex_condition_crosscheck(const CurvatureTensor& r,
                                               const ConeId& cone, int samples,
                                               std::uint64_t seed,
                                               const MarginOptions& options) {
  if (cone.kind != ConeKind::Pic && cone.kind != ConeKind::Pic1 &&
      cone.kind != ConeKind::Pic2)
    throw SpecInvalid("complex cross-check covers pic, pic1 and pic2 only");
  if (r.dim() < 4) throw WrongDimension("complex cross-check requires n >= 4");

  MarginOptions opts = options;
  opts.seed = seed;
  const ConditionReport report = cone_margin(r, cone, opts);

  const double lo = core::lambda_lo(cone.range);
  const int n = r.dim();
  Rng rng(derive_seed(seed, 0x77));

  auto complex_value = [&](const Eigen::MatrixXd& frame, double lambda,
                           double mu) {
    core::ComplexVector zeta{frame.col(0), mu * frame.col(1)};
    core::ComplexVector eta{frame.col(2), lambda * frame.col(3)};
    return core::complexify_eval(r, zeta, eta).real();
  };

  double min_sample = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Eigen::MatrixXd f = opt::random_stiefel_point(n, 4, rng);
    double lambda = 1.0, mu = 1.0;
    if (cone.kind == ConeKind::Pic1) lambda = rng.uniform(lo, 1.0);
    if (cone.kind == ConeKind::Pic2) {
      lambda = rng.uniform(lo, 1.0);
      mu = rng.uniform(lo, 1.0);
    }
    min_sample = std::min(min_sample, complex_value(f, lambda, mu));
  }
  // The certificate converts to a complex pair; include it so a negative
  // margin always has a witnessing sample.
  if (report.minimizer.frame) {
    min_sample = std::min(
        min_sample,
        complex_value(*report.minimizer.frame,
                      report.minimizer.lambda.value_or(1.0),
                      report.minimizer.mu.value_or(1.0)));
  }

  CrosscheckVerdict v;
  v.frame_margin = report.margin;
  v.min_sample = min_sample;
  v.worst_discrepancy = min_sample - report.margin;
  v.samples = samples;
  const double strict = strictness_threshold(r);
  if (report.margin >= -strict)
    v.sign_agreement = min_sample >= -10.0 * std::max(strict, 1e-12);
  else
    v.sign_agreement = min_sample <= strict;
  return v;
}

}  // namespace curvlab::conditions
