// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/models.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "curvlab/rng.hpp"

namespace curvlab::models {

using conditions::ConditionReport;
using conditions::ConeKind;
using conditions::MarginOptions;
using core::PairBasis;

// ============================================================================
// ModelSpec
// ============================================================================

ModelSpec ModelSpec::constant(int n, double kappa) {
  if (n < 2) throw SpecInvalid("constant curvature requires n >= 2");
  ModelSpec s;
  s.kind = Kind::ConstantCurvature;
  s.n = n;
  s.kappa = kappa;
  return s;
}

ModelSpec ModelSpec::fubini_study(int m) {
  if (m < 1) throw SpecInvalid("fubini-study requires m >= 1");
  ModelSpec s;
  s.kind = Kind::FubiniStudy;
  s.m = m;
  return s;
}

ModelSpec ModelSpec::product(ModelSpec a, ModelSpec b) {
  ModelSpec s;
  s.kind = Kind::Product;
  s.a = std::make_shared<ModelSpec>(std::move(a));
  s.b = std::make_shared<ModelSpec>(std::move(b));
  return s;
}

ModelSpec ModelSpec::flat_extend(ModelSpec a, int k) {
  if (k < 1) throw SpecInvalid("flat extension requires k >= 1");
  ModelSpec s;
  s.kind = Kind::FlatExtend;
  s.a = std::make_shared<ModelSpec>(std::move(a));
  s.flat_dims = k;
  return s;
}

ModelSpec ModelSpec::random(int n, std::uint64_t seed, double scale) {
  if (n < 2) throw SpecInvalid("random tensors require n >= 2");
  ModelSpec s;
  s.kind = Kind::Random;
  s.n = n;
  s.seed = seed;
  s.scale = scale;
  return s;
}

ModelSpec ModelSpec::shifted(ModelSpec inner, ConeId cone, double target) {
  ModelSpec s;
  s.kind = Kind::Shifted;
  s.a = std::make_shared<ModelSpec>(std::move(inner));
  s.cone = cone;
  s.target_margin = target;
  return s;
}

int ModelSpec::total_dim() const {
  switch (kind) {
    case Kind::ConstantCurvature:
    case Kind::Random: return n;
    case Kind::FubiniStudy: return 2 * m;
    case Kind::Product: return a->total_dim() + b->total_dim();
    case Kind::FlatExtend: return a->total_dim() + flat_dims;
    case Kind::Shifted: return a->total_dim();
  }
  return 0;
}

// ============================================================================
// Builders
// ============================================================================

namespace {

CurvatureTensor constant_curvature(int n, double kappa) {
  const int N = n * (n - 1) / 2;
  return CurvatureTensor(n, kappa * Eigen::MatrixXd::Identity(N, N));
}

CurvatureTensor fubini_study(int m) {
  const int n = 2 * m;
  // Standard complex structure: J e_{2a} = e_{2a+1}, J e_{2a+1} = -e_{2a}.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < m; ++a) {
    J(2 * a + 1, 2 * a) = 1.0;
    J(2 * a, 2 * a + 1) = -1.0;
  }
  // Holomorphic sectional curvature 4, sectional range [1, 4].
  const PairBasis basis(n);
  const int N = basis.size();
  Eigen::MatrixXd mat(N, N);
  auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };
  for (int p = 0; p < N; ++p)
    for (int q = p; q < N; ++q) {
      const auto [i, j] = basis.pair(p);
      const auto [k, l] = basis.pair(q);
      const double v = delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k) +
                       J(i, k) * J(j, l) - J(i, l) * J(j, k) +
                       2.0 * J(i, j) * J(k, l);
      mat(p, q) = v;
      mat(q, p) = v;
    }
  return CurvatureTensor(n, std::move(mat));
}

/// Embeds a tensor into a larger dimension at index offset; all components
/// involving new indices stay zero.
void embed(const CurvatureTensor& src, int offset, const PairBasis& basis,
           Eigen::MatrixXd& mat) {
  const PairBasis& sb = src.pairs();
  for (int p = 0; p < sb.size(); ++p)
    for (int q = p; q < sb.size(); ++q) {
      const auto [i, j] = sb.pair(p);
      const auto [k, l] = sb.pair(q);
      const double v = src.pair_matrix()(p, q);
      const int a = basis.index(i + offset, j + offset);
      const int b = basis.index(k + offset, l + offset);
      mat(a, b) = v;
      mat(b, a) = v;
    }
}

CurvatureTensor product(const CurvatureTensor& a, const CurvatureTensor& b) {
  const int n = a.dim() + b.dim();
  const PairBasis basis(n);
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  embed(a, 0, basis, mat);
  embed(b, a.dim(), basis, mat);
  return CurvatureTensor(n, std::move(mat));
}

CurvatureTensor flat_extend(const CurvatureTensor& a, int k) {
  const int n = a.dim() + k;
  const PairBasis basis(n);
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  embed(a, 0, basis, mat);
  return CurvatureTensor(n, std::move(mat));
}

}  // namespace

CurvatureTensor random_tensor(int n, std::uint64_t seed, double scale) {
  if (n < 2) throw WrongDimension("random tensors require n >= 2");
  Rng rng(seed);
  const PairBasis basis(n);
  const int N = basis.size();
  Eigen::MatrixXd mat(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      const double v = rng.uniform(-scale, scale);
      mat(a, b) = v;
      mat(b, a) = v;
    }
  return CurvatureTensor(n, std::move(mat)).bianchi_projected();
}

CurvatureTensor build(const ModelSpec& spec, const MarginOptions& options) {
  switch (spec.kind) {
    case ModelSpec::Kind::ConstantCurvature:
      return constant_curvature(spec.n, spec.kappa);
    case ModelSpec::Kind::FubiniStudy:
      return fubini_study(spec.m);
    case ModelSpec::Kind::Product:
      return product(build(*spec.a, options), build(*spec.b, options));
    case ModelSpec::Kind::FlatExtend:
      return flat_extend(build(*spec.a, options), spec.flat_dims);
    case ModelSpec::Kind::Random:
      return random_tensor(spec.n, spec.seed, spec.scale);
    case ModelSpec::Kind::Shifted:
      return shift_into_cone(build(*spec.a, options), spec.cone,
                             spec.target_margin, options)
          .tensor;
  }
  throw SpecInvalid("unknown model kind");
}

// ============================================================================
// shift_into_cone
// ============================================================================

namespace {

// Exact margin slope (per unit of added constant curvature) for the cones
// whose margin is an eigenvalue or sectional expression.
double closed_form_slope(const ConeId& cone, int n) {
  switch (cone.kind) {
    case ConeKind::SecNonneg: return 1.0;
    case ConeKind::TwoPositive: return 8.0;
    case ConeKind::OperatorNonneg: return 4.0;
    case ConeKind::RicPinched: return (n - 1) * (1.0 - n * cone.rho);
    default: return 0.0;
  }
}

struct PoolEntry {
  Eigen::MatrixXd frame;
  double lambda, mu;
  double q_r;     // quantity on the base tensor
  double q_c;     // quantity on the unit constant-curvature tensor
};

}  // namespace

ShiftResult shift_into_cone(const CurvatureTensor& r, const ConeId& cone,
                            double target_margin,
                            const MarginOptions& options) {
  const int n = r.dim();
  const CurvatureTensor unit = constant_curvature(n, 1.0);

  ConditionReport base = conditions::cone_margin(r, cone, options);
  if (base.margin >= target_margin)
    return ShiftResult{r, 0.0, std::move(base), base.ambiguous_minimizer};

  // Eigenvalue and sectional margins are exactly affine in the shift.
  const double slope = closed_form_slope(cone, n);
  if (slope != 0.0) {
    if (slope < 0.0)
      throw SpecInvalid("constant curvature does not enter this cone");
    const double c = (target_margin - base.margin) / slope;
    CurvatureTensor shifted = r + unit * c;
    ConditionReport rep = conditions::cone_margin(shifted, cone, options);
    return ShiftResult{std::move(shifted), c, std::move(rep), false};
  }
  if (cone.kind == ConeKind::PointwisePinched) {
    const auto ext = conditions::sectional_extremes(r, options);
    double c = std::max(0.0, target_margin - ext.k_min);
    if (cone.delta < 1.0) {
      c = std::max(c, (target_margin - (ext.k_min - cone.delta * ext.k_max)) /
                          (1.0 - cone.delta));
    } else if (ext.k_min - ext.k_max < target_margin) {
      throw SpecInvalid("delta = 1 pinching margin cannot be raised by shifts");
    }
    CurvatureTensor shifted = r + unit * c;
    ConditionReport rep = conditions::cone_margin(shifted, cone, options);
    return ShiftResult{std::move(shifted), c, std::move(rep), false};
  }

  // Isotropic family: bisection on the shift with a warm-started margin
  // evaluator. Every certificate seen contributes an exact affine upper bound
  // q_r + c * q_c on the margin, which keeps the readings consistent.
  ConditionReport cone_of_unit = conditions::cone_margin(unit, cone, options);
  if (!(cone_of_unit.margin > 0.0))
    throw SpecInvalid("constant curvature is not interior to this cone");
  const double slope_lb = cone_of_unit.margin;
  const double rho = cone.rho;
  const bool scal_margin = cone.kind == ConeKind::Pic1ScalMargin ||
                           cone.kind == ConeKind::Pic2ScalMargin;
  const double scal_r = core::scalar(r);
  const double scal_c = static_cast<double>(n) * (n - 1);

  std::vector<PoolEntry> pool;
  auto add_to_pool = [&](const ConditionReport& rep) {
    if (!rep.minimizer.frame) return;
    PoolEntry e;
    e.frame = *rep.minimizer.frame;
    e.lambda = rep.minimizer.lambda.value_or(1.0);
    e.mu = rep.minimizer.mu.value_or(1.0);
    const core::Frame4 f(e.frame);
    e.q_r = core::pic2_from(core::frame_components(r, f), e.lambda, e.mu);
    e.q_c = core::pic2_from(core::frame_components(unit, f), e.lambda, e.mu);
    pool.push_back(std::move(e));
  };
  add_to_pool(base);

  auto pool_bound = [&](double c) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : pool) {
      double v = e.q_r + c * e.q_c;
      if (scal_margin) v -= rho * (scal_r + c * scal_c);
      m = std::min(m, v);
    }
    if (scal_margin) m = std::min(m, scal_r + c * scal_c);
    return m;
  };

  // Bisection readings lean on the certificate pool; a couple of fresh
  // restarts per evaluation guard against pool staleness, and the final
  // full-budget certification below establishes the margin.
  MarginOptions polish = options;
  polish.restarts = std::max(2, options.restarts / 32);

  int evals = 0;
  auto margin_at = [&](double c) {
    MarginOptions local = polish;
    local.seed = derive_seed(options.seed, 0x500 + evals++);
    local.warm_starts.clear();
    // Newest certificates first; the binding frame moves slowly in c.
    for (auto it = pool.rbegin(); it != pool.rend() && local.warm_starts.size() < 12;
         ++it)
      local.warm_starts.push_back(it->frame);
    ConditionReport rep =
        conditions::cone_margin(r + unit * c, cone, local);
    add_to_pool(rep);
    if (pool.size() > 24) pool.erase(pool.begin(), pool.begin() + 8);
    return std::min(rep.margin, pool_bound(c));
  };

  auto solve = [&](const MarginOptions& certify_opts) -> ShiftResult {
    double lo = 0.0;
    double hi = std::max((target_margin - base.margin) / slope_lb, 1e-6);
    int guard = 0;
    while (margin_at(hi) < target_margin) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 60)
        throw BisectionFailed("shift bracket expansion failed");
    }
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (margin_at(mid) >= target_margin)
        hi = mid;
      else
        lo = mid;
    }
    double c = hi;
    // Full-budget certification with a Newton correction along the binding
    // certificate's affine margin.
    for (int round = 0; round < 8; ++round) {
      CurvatureTensor shifted = r + unit * c;
      MarginOptions certify = certify_opts;
      certify.seed = derive_seed(options.seed, 0x900 + round);
      certify.warm_starts.clear();
      for (const auto& e : pool) certify.warm_starts.push_back(e.frame);
      ConditionReport rep = conditions::cone_margin(shifted, cone, certify);
      add_to_pool(rep);
      const double err = rep.margin - target_margin;
      if (std::abs(err) <= 5e-10 || (round > 0 && err >= 0.0 && err <= 1e-8))
        return ShiftResult{std::move(shifted), c, std::move(rep),
                           rep.ambiguous_minimizer};
      double local_slope = slope_lb;
      if (rep.minimizer.frame) {
        const core::Frame4 f(*rep.minimizer.frame);
        double qc = core::pic2_from(core::frame_components(unit, f),
                                    rep.minimizer.lambda.value_or(1.0),
                                    rep.minimizer.mu.value_or(1.0));
        if (scal_margin) qc -= rho * scal_c;
        if (qc > 1e-6) local_slope = qc;
      }
      c = std::max(0.0, c - err / local_slope);
    }
    throw BisectionFailed("margin readings failed to settle at the target");
  };

  try {
    return solve(options);
  } catch (const BisectionFailed&) {
    // Retry once with a larger restart budget before giving up.
    MarginOptions bigger = options;
    bigger.restarts = options.restarts * 2;
    polish.restarts = std::max(8, bigger.restarts / 16);
    return solve(bigger);
  }
}

// ============================================================================
// Model grammar
// ============================================================================

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    return text[pos];
  }

  void expect(char c) {
    if (peek() != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_'))
      ++pos;
    if (start == pos) throw ParseError("expected an identifier", pos);
    return text.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    const char* begin = text.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("expected a number", pos);
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }

  /// Argument token up to the next ',' or ')' at this nesting depth.
  std::string raw_argument() {
    skip_ws();
    std::size_t start = pos;
    int depth = 0;
    while (pos < text.size()) {
      const char c = text[pos];
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      if (c == ',' && depth == 0) break;
      ++pos;
    }
    std::string out = text.substr(start, pos - start);
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back())))
      out.pop_back();
    return out;
  }

  ModelSpec parse_spec() {
    const std::string head = ident();
    expect('(');
    ModelSpec out;
    if (head == "const") {
      const int n = static_cast<int>(number());
      expect(',');
      const double kappa = number();
      out = ModelSpec::constant(n, kappa);
    } else if (head == "fs") {
      out = ModelSpec::fubini_study(static_cast<int>(number()));
    } else if (head == "prod") {
      ModelSpec a = parse_spec();
      expect(',');
      ModelSpec b = parse_spec();
      out = ModelSpec::product(std::move(a), std::move(b));
    } else if (head == "flat") {
      ModelSpec a = parse_spec();
      expect(',');
      out = ModelSpec::flat_extend(std::move(a), static_cast<int>(number()));
    } else if (head == "rand") {
      const int n = static_cast<int>(number());
      std::uint64_t seed = 0;
      double scale = 1.0;
      int positional = 0;
      while (peek() == ',') {
        ++pos;
        skip_ws();
        std::size_t mark = pos;
        std::string name = ident();
        if (peek() == '=') {
          ++pos;
          const double v = number();
          if (name == "seed")
            seed = static_cast<std::uint64_t>(v);
          else if (name == "scale")
            scale = v;
          else
            throw ParseError("unknown rand parameter '" + name + "'", mark);
        } else {
          pos = mark;
          const double v = number();
          if (positional == 0)
            seed = static_cast<std::uint64_t>(v);
          else if (positional == 1)
            scale = v;
          else
            throw ParseError("too many rand arguments", mark);
          ++positional;
        }
      }
      out = ModelSpec::random(n, seed, scale);
    } else if (head == "shift") {
      ModelSpec inner = parse_spec();
      expect(',');
      const std::size_t cone_pos = pos;
      std::string cone_text = raw_argument();
      ConeId cone;
      try {
        cone = conditions::parse_cone(cone_text);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), cone_pos);
      }
      expect(',');
      const double target = number();
      out = ModelSpec::shifted(std::move(inner), cone, target);
    } else {
      throw ParseError("unknown model '" + head + "'", pos);
    }
    expect(')');
    return out;
  }
};

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ModelSpec parse_model(const std::string& text) {
  Parser p{text};
  ModelSpec spec = p.parse_spec();
  p.skip_ws();
  if (p.pos != text.size())
    throw ParseError("trailing input after model", p.pos);
  return spec;
}

std::string print_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelSpec::Kind::ConstantCurvature:
      return "const(" + std::to_string(spec.n) + "," +
             format_value(spec.kappa) + ")";
    case ModelSpec::Kind::FubiniStudy:
      return "fs(" + std::to_string(spec.m) + ")";
    case ModelSpec::Kind::Product:
      return "prod(" + print_model(*spec.a) + "," + print_model(*spec.b) + ")";
    case ModelSpec::Kind::FlatExtend:
      return "flat(" + print_model(*spec.a) + "," +
             std::to_string(spec.flat_dims) + ")";
    case ModelSpec::Kind::Random:
      return "rand(" + std::to_string(spec.n) +
             ",seed=" + std::to_string(spec.seed) +
             ",scale=" + format_value(spec.scale) + ")";
    case ModelSpec::Kind::Shifted:
      return "shift(" + print_model(*spec.a) + "," + spec.cone.name() + "," +
             format_value(spec.target_margin) + ")";
  }
  throw SpecInvalid("unknown model kind");
}

}  // namespace curvlab::models
