// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "curvlab/experiments.hpp"
#include "curvlab/io.hpp"
#include "curvlab/models.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/rng.hpp"

namespace curvlab::cli {

using conditions::ConeId;
using conditions::ConeKind;
using conditions::MarginOptions;
using core::CurvatureTensor;

namespace {

std::string command_name(Command c) {
  switch (c) {
    case Command::Check: return "check";
    case Command::Evolve: return "evolve";
    case Command::Invariance: return "invariance";
    case Command::Convergence: return "convergence";
    case Command::Boundary: return "boundary";
    case Command::Crosscheck: return "crosscheck";
    case Command::EmitModel: return "emit-model";
  }
  return "?";
}

CurvatureTensor resolve_input(const ExperimentConfig& config) {
  const bool has_model = !config.model.empty();
  const bool has_file = !config.input_path.empty();
  if (has_model == has_file)
    throw ConfigError("exactly one of --model / --input is required");
  if (has_model) {
    MarginOptions opts;
    opts.restarts = config.restarts;
    opts.seed = derive_seed(config.seed, 0xB0);
    return models::build(models::parse_model(config.model), opts);
  }
  return io::read_tensor_file(config.input_path);
}

std::vector<ConeId> resolve_cones(const ExperimentConfig& config) {
  std::vector<ConeId> cones;
  for (const auto& token : config.cones) {
    ConeId cone = conditions::parse_cone(token);
    if ((cone.kind == ConeKind::Pic1 || cone.kind == ConeKind::Pic2) &&
        config.lambda_range == core::LambdaRange::SymmetricOne)
      cone.range = core::LambdaRange::SymmetricOne;
    cones.push_back(cone);
  }
  return cones;
}

void require_seed(const ExperimentConfig& config) {
  if (!config.seed_set)
    throw ConfigError("--seed is required for randomized commands");
}

std::string config_json(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "{\"command\": \"" << command_name(c.command) << "\"";
  if (!c.model.empty()) out << ", \"model\": \"" << c.model << "\"";
  if (!c.input_path.empty()) out << ", \"input\": \"" << c.input_path << "\"";
  if (!c.cones.empty()) {
    out << ", \"cones\": [";
    for (std::size_t i = 0; i < c.cones.size(); ++i) {
      if (i) out << ", ";
      out << "\"" << c.cones[i] << "\"";
    }
    out << "]";
  }
  out << ", \"t_end\": " << io::format_double(c.t_end);
  out << ", \"samples\": " << c.samples;
  out << ", \"dim\": " << c.dim;
  out << ", \"horizon\": " << io::format_double(c.horizon);
  out << ", \"rel_tol\": " << io::format_double(c.rel_tol);
  out << ", \"restarts\": " << c.restarts;
  out << ", \"lambda_range\": \""
      << (c.lambda_range == core::LambdaRange::ZeroOne ? "01" : "sym") << "\"";
  out << ", \"strictness\": 1e-08";
  out << "}";
  return out.str();
}

struct ReportBuilder {
  std::ostringstream items;
  std::ostringstream violations;
  std::ostringstream summary;
  bool first_item = true;
  bool first_violation = true;

  void add_item(const std::string& json) {
    if (!first_item) items << ",\n";
    first_item = false;
    items << "    " << json;
  }
  void add_violation(const std::string& json) {
    if (!first_violation) violations << ", ";
    first_violation = false;
    violations << json;
  }
};

RunReport assemble(const ExperimentConfig& config, ReportBuilder& builder,
                   bool has_violations,
                   std::chrono::steady_clock::time_point started) {
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  std::ostringstream doc;
  doc << "{\n";
  doc << "  \"version\": \"" << kVersion << "\",\n";
  doc << "  \"config\": " << config_json(config) << ",\n";
  doc << "  \"seed\": " << config.seed << ",\n";
  doc << "  \"items\": [\n" << builder.items.str() << "\n  ],\n";
  doc << "  \"violations\": [" << builder.violations.str() << "],\n";
  doc << "  \"wall_time_ms\": " << elapsed.count() << "\n";
  doc << "}\n";

  RunReport report;
  report.exit_code = has_violations ? 2 : 0;
  report.document = doc.str();
  report.human_summary = builder.summary.str();
  if (!config.out_path.empty()) io::atomic_write(config.out_path, report.document);
  return report;
}

// --- check -----------------------------------------------------------------

/// Tensor inputs for check: one model or file, or every *.json tensor in a
/// directory (batch minima over a collection realize the global notion of
/// pinching at desk scale).
std::vector<std::pair<std::string, CurvatureTensor>> resolve_check_inputs(
    const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::string, CurvatureTensor>> inputs;
  if (!config.input_path.empty() && fs::is_directory(config.input_path)) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(config.input_path))
      if (entry.path().extension() == ".json")
        paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty())
      throw InputError("no .json tensor files in '" + config.input_path + "'");
    for (const auto& path : paths)
      inputs.emplace_back(fs::path(path).filename().string(),
                          io::read_tensor_file(path));
    return inputs;
  }
  inputs.emplace_back(config.model.empty() ? config.input_path : config.model,
                      resolve_input(config));
  return inputs;
}

void run_check(const ExperimentConfig& config, ReportBuilder& b) {
  const auto inputs = resolve_check_inputs(config);
  const auto cones = resolve_cones(config);
  if (cones.empty()) throw ConfigError("check requires --cones");
  MarginOptions opts;
  opts.restarts = config.restarts;
  int index = 0;
  for (const auto& cone : cones) {
    opts.seed = derive_seed(config.seed, 0xC0 + index++);
    double batch_min_margin = std::numeric_limits<double>::infinity();
    for (const auto& [label, r] : inputs) {
      const auto report = conditions::cone_margin(r, cone, opts);
      batch_min_margin = std::min(batch_min_margin, report.margin);
      std::ostringstream item;
      item << "{\"kind\": \"margin\", \"input\": \"" << label
           << "\", \"report\": " << io::condition_report_json(report);
      b.summary << "cone " << cone.name() << " [" << label << "]: margin "
                << io::format_double(report.margin);
      if (cone.kind == ConeKind::PointwisePinched) {
        const auto ext = conditions::sectional_extremes(r, opts);
        item << ", \"k_min\": " << io::format_double(ext.k_min)
             << ", \"k_max\": " << io::format_double(ext.k_max);
        if (ext.k_max > 0.0) {
          const double ratio = conditions::pointwise_pinching_ratio(ext);
          item << ", \"pinching_ratio\": " << io::format_double(ratio);
          b.summary << ", pinching ratio " << io::format_double(ratio);
        }
      }
      item << "}";
      b.add_item(item.str());
      b.summary << "\n";
    }
    if (inputs.size() > 1) {
      b.add_item("{\"kind\": \"batch_min\", \"cone\": \"" + cone.name() +
                 "\", \"margin\": " + io::format_double(batch_min_margin) + "}");
      b.summary << "cone " << cone.name() << " batch minimum: "
                << io::format_double(batch_min_margin) << "\n";
    }
  }
}

// --- evolve ------------------------------------------------------------------

void run_evolve(const ExperimentConfig& config, ReportBuilder& b) {
  const CurvatureTensor r = resolve_input(config);
  flow::StepControl control;
  control.rel_tol = config.rel_tol;
  flow::FlowTrajectory traj = flow::integrate(r, config.t_end, control);

  const auto cones = resolve_cones(config);
  MarginOptions opts;
  opts.restarts = config.restarts;
  opts.seed = derive_seed(config.seed, 0xE0);

  std::ostringstream item;
  const char* status = traj.status == flow::FlowStatus::ReachedEnd
                           ? "reached_end"
                           : traj.status == flow::FlowStatus::BlowupReached
                                 ? "blowup_reached"
                                 : "max_steps_exceeded";
  item << "{\"kind\": \"trajectory\", \"status\": \"" << status << "\""
       << ", \"final_t\": " << io::format_double(traj.times.back())
       << ", \"final_scal\": "
       << io::format_double(traj.diagnostics.back().scal)
       << ", \"steps\": " << traj.steps_taken
       << ", \"bianchi_reprojections\": " << traj.bianchi_reprojections;
  if (traj.status == flow::FlowStatus::BlowupReached)
    item << ", \"blowup_estimate\": "
         << io::format_double(traj.blowup_estimate);

  // Columnar per-step records, subsampled to at most 64 rows.
  item << ", \"columns\": [\"t\", \"scal\", \"norm_inf\", \"step\"],"
       << " \"rows\": [";
  const std::size_t count = traj.times.size();
  const std::size_t stride = std::max<std::size_t>(1, count / 64);
  bool first = true;
  for (std::size_t i = 0; i < count; i += stride) {
    const std::size_t idx = std::min(i, count - 1);
    if (!first) item << ", ";
    first = false;
    const auto& s = traj.diagnostics[idx];
    item << "[" << io::format_double(s.t) << ", " << io::format_double(s.scal)
         << ", " << io::format_double(s.norm_inf) << ", "
         << io::format_double(s.step) << "]";
  }
  item << "]";

  if (!cones.empty()) {
    // Requested margins (and the pinching ratio when a pinch cone is
    // requested) at up to 16 checkpoints.
    bool want_ratio = false;
    for (const auto& cone : cones)
      want_ratio = want_ratio || cone.kind == ConeKind::PointwisePinched;
    item << ", \"margin_columns\": [\"t\"";
    for (const auto& cone : cones) item << ", \"" << cone.name() << "\"";
    if (want_ratio) item << ", \"pinching_ratio\"";
    item << "], \"margin_rows\": [";
    const std::size_t mstride = std::max<std::size_t>(1, count / 16);
    bool mfirst = true;
    for (std::size_t i = 0; i < count; i += mstride) {
      const std::size_t idx = std::min(i, count - 1);
      if (!mfirst) item << ", ";
      mfirst = false;
      item << "[" << io::format_double(traj.times[idx]);
      for (const auto& cone : cones) {
        const auto rep = conditions::cone_margin(traj.states[idx], cone, opts);
        item << ", " << io::format_double(rep.margin);
      }
      if (want_ratio) {
        const auto ext = conditions::sectional_extremes(traj.states[idx], opts);
        if (ext.k_max > 0.0)
          item << ", "
               << io::format_double(conditions::pointwise_pinching_ratio(ext));
        else
          item << ", null";  // the ratio is undefined for K_max <= 0
      }
      item << "]";
    }
    item << "]";
  }

  if (config.dump_states_every > 0) {
    item << ", \"states\": [";
    bool sfirst = true;
    for (std::size_t i = 0; i < count;
         i += static_cast<std::size_t>(config.dump_states_every)) {
      if (!sfirst) item << ", ";
      sfirst = false;
      item << "{\"t\": " << io::format_double(traj.times[i]) << ", \"tensor\": "
           << io::write_tensor_string(traj.states[i]);
      item << "}";
    }
    item << "]";
  }
  item << "}";
  b.add_item(item.str());
  b.summary << "evolve: " << status << " at t = "
            << io::format_double(traj.times.back()) << ", scal = "
            << io::format_double(traj.diagnostics.back().scal) << "\n";
}

// --- invariance ----------------------------------------------------------------

bool run_invariance(const ExperimentConfig& config, ReportBuilder& b) {
  require_seed(config);
  flow::InvarianceConfig icfg;
  const auto cones = resolve_cones(config);
  icfg.cone = cones.empty() ? ConeId::pic() : cones.front();
  switch (icfg.cone.kind) {
    case ConeKind::Pic:
    case ConeKind::Pic1:
    case ConeKind::Pic2:
    case ConeKind::TwoPositive:
    case ConeKind::OperatorNonneg:
      break;
    default:
      throw ConfigError("invariance covers the flow-preserved cones: pic, "
                        "pic1, pic2, 2pos, op");
  }
  icfg.samples = config.samples;
  icfg.dim = config.dim;
  icfg.horizon = config.horizon;
  icfg.control.rel_tol = config.rel_tol;
  icfg.seed = config.seed;
  icfg.margin_options.restarts = config.restarts;
  const auto report = flow::invariance_experiment(icfg);

  for (const auto& run : report.runs) {
    std::ostringstream item;
    item << "{\"kind\": \"invariance_run\", \"sample\": " << run.sample
         << ", \"initial_margin\": " << io::format_double(run.initial_margin)
         << ", \"min_margin\": " << io::format_double(run.min_margin)
         << ", \"min_margin_normalized\": "
         << io::format_double(run.min_margin_normalized)
         << ", \"integrated_to\": " << io::format_double(run.integrated_to)
         << ", \"outside_cone\": " << (run.outside_cone ? "true" : "false")
         << ", \"violation\": " << (run.violation ? "true" : "false") << "}";
    b.add_item(item.str());
    if (run.violation)
      b.add_violation("{\"sample\": " + std::to_string(run.sample) +
                      ", \"min_margin_normalized\": " +
                      io::format_double(run.min_margin_normalized) + "}");
  }
  b.summary << "invariance " << icfg.cone.name() << ": " << report.runs.size()
            << " runs, " << report.violations << " violations, "
            << report.outside_cone << " outside-cone inputs\n";
  return report.violations > 0;
}

// --- convergence -----------------------------------------------------------------

bool run_convergence(const ExperimentConfig& config, ReportBuilder& b) {
  const CurvatureTensor r = resolve_input(config);
  flow::ConvergenceConfig ccfg;
  ccfg.control.rel_tol = config.rel_tol;
  ccfg.margin_options.restarts = config.restarts;
  ccfg.margin_options.seed = derive_seed(config.seed, 0xF0);
  const auto report = flow::convergence_experiment(r, ccfg);

  // A strict interior start is expected to pinch toward the round ray; not
  // reaching the threshold inside the integrable window is a violation.
  // Boundary starts (Einstein directions) carry no convergence claim.
  const bool violation =
      !report.boundary_start && !report.ratio_exceeded_threshold;

  std::ostringstream item;
  item << "{\"kind\": \"convergence\", \"initial_margin\": "
       << io::format_double(report.initial_cone_margin)
       << ", \"boundary_start\": "
       << (report.boundary_start ? "true" : "false")
       << ", \"ratio_exceeded\": "
       << (report.ratio_exceeded_threshold ? "true" : "false")
       << ", \"final_ray_distance\": "
       << io::format_double(report.final_ray_distance)
       << ", \"ray_monotone_final_quarter\": "
       << (report.ray_monotone_final_quarter ? "true" : "false")
       << ", \"columns\": [\"t\", \"pinching_ratio\", \"ray_distance\"],"
       << " \"rows\": [";
  for (std::size_t i = 0; i < report.series.size(); ++i) {
    if (i) item << ", ";
    const auto& p = report.series[i];
    item << "[" << io::format_double(p.t) << ", "
         << io::format_double(p.pinching_ratio) << ", "
         << io::format_double(p.ray_distance) << "]";
  }
  item << "]}";
  b.add_item(item.str());
  if (violation)
    b.add_violation(
        "{\"kind\": \"convergence\", \"ratio_last\": " +
        io::format_double(report.series.back().pinching_ratio) + "}");
  b.summary << "convergence: ratio "
            << (report.ratio_exceeded_threshold ? "exceeded" : "did not exceed")
            << " 0.99, final ray distance "
            << io::format_double(report.final_ray_distance) << "\n";
  return violation;
}

// --- boundary ----------------------------------------------------------------

bool run_boundary(const ExperimentConfig& config, ReportBuilder& b) {
  require_seed(config);
  bool violations = false;
  struct BoundaryRow {
    int sample;
    double margin, inward, key_residual, step1, step2;
    bool bad;
  };
  std::function<BoundaryRow(int)> task = [&](int s) -> BoundaryRow {
    const std::uint64_t sample_seed = derive_seed(config.seed, s);
    CurvatureTensor r = models::random_tensor(config.dim, sample_seed, 1.0);
    MarginOptions opts;
    opts.restarts = config.restarts;
    opts.seed = derive_seed(sample_seed, 0x1);
    auto shifted = models::shift_into_cone(r, ConeId::pic(), 0.0, opts);
    const core::Frame4 frame(*shifted.certificate.minimizer.frame);
    const double inward = flow::boundary_inward_value(shifted.tensor, frame);
    const auto key = flow::key_inequality_residual(shifted.tensor, frame);
    const bool bad = inward < -1e-8 || key.residual < -1e-8 ||
                     key.step1_residual > 1e-6 || key.step2_residual > 1e-6;
    return BoundaryRow{s, shifted.certificate.margin, inward, key.residual,
                       key.step1_residual, key.step2_residual, bad};
  };
  const auto rows = parallel_indexed<BoundaryRow>(config.samples, task);
  for (const auto& row : rows) {
    std::ostringstream item;
    item << "{\"kind\": \"boundary_run\", \"sample\": " << row.sample
         << ", \"margin\": " << io::format_double(row.margin)
         << ", \"inward_value\": " << io::format_double(row.inward)
         << ", \"key_residual\": " << io::format_double(row.key_residual)
         << ", \"step1_residual\": " << io::format_double(row.step1)
         << ", \"step2_residual\": " << io::format_double(row.step2)
         << ", \"violation\": " << (row.bad ? "true" : "false") << "}";
    b.add_item(item.str());
    if (row.bad) {
      violations = true;
      b.add_violation("{\"sample\": " + std::to_string(row.sample) + "}");
    }
  }
  b.summary << "boundary: " << rows.size() << " certified boundary tensors, "
            << (violations ? "violations found" : "all inequalities hold")
            << "\n";
  return violations;
}

// --- crosscheck -----------------------------------------------------------------

bool run_crosscheck(const ExperimentConfig& config, ReportBuilder& b) {
  require_seed(config);
  const CurvatureTensor r = resolve_input(config);
  auto cones = resolve_cones(config);
  if (cones.empty()) cones.push_back(ConeId::pic());
  MarginOptions opts;
  opts.restarts = config.restarts;
  bool violations = false;
  int index = 0;
  for (const auto& cone : cones) {
    if (!cone.is_isotropic_family() || cone.kind == ConeKind::Pic1ScalMargin ||
        cone.kind == ConeKind::Pic2ScalMargin)
      throw ConfigError("crosscheck covers pic, pic1, pic2");
    const auto verdict = conditions::complex_condition_crosscheck(
        r, cone, config.samples, derive_seed(config.seed, 0xCC + index++),
        opts);
    std::ostringstream item;
    item << "{\"kind\": \"crosscheck\", \"cone\": \"" << cone.name() << "\""
         << ", \"frame_margin\": " << io::format_double(verdict.frame_margin)
         << ", \"min_sample\": " << io::format_double(verdict.min_sample)
         << ", \"worst_discrepancy\": "
         << io::format_double(verdict.worst_discrepancy)
         << ", \"samples\": " << verdict.samples
         << ", \"sign_agreement\": "
         << (verdict.sign_agreement ? "true" : "false") << "}";
    b.add_item(item.str());
    if (!verdict.sign_agreement) {
      violations = true;
      b.add_violation("{\"cone\": \"" + cone.name() + "\"}");
    }
    b.summary << "crosscheck " << cone.name() << ": frame margin "
              << io::format_double(verdict.frame_margin) << ", min sample "
              << io::format_double(verdict.min_sample) << ", "
              << (verdict.sign_agreement ? "signs agree" : "SIGN MISMATCH")
              << "\n";
  }
  return violations;
}

// --- emit-model ----------------------------------------------------------------

void run_emit_model(const ExperimentConfig& config, ReportBuilder& b) {
  if (config.model.empty()) throw ConfigError("emit-model requires --model");
  if (config.out_path.empty()) throw ConfigError("emit-model requires --out");
  MarginOptions opts;
  opts.restarts = config.restarts;
  opts.seed = derive_seed(config.seed, 0xB0);
  const CurvatureTensor r = models::build(models::parse_model(config.model), opts);
  io::write_tensor_file(config.out_path, r);
  std::ostringstream item;
  item << "{\"kind\": \"emit_model\", \"model\": \"" << config.model
       << "\", \"n\": " << r.dim() << ", \"path\": \"" << config.out_path
       << "\"}";
  b.add_item(item.str());
  b.summary << "emitted " << config.model << " (n = " << r.dim() << ") to "
            << config.out_path << "\n";
}

}  // namespace

RunReport run(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  ReportBuilder builder;
  bool violations = false;
  switch (config.command) {
    case Command::Check: run_check(config, builder); break;
    case Command::Evolve: run_evolve(config, builder); break;
    case Command::Invariance: violations = run_invariance(config, builder); break;
    case Command::Convergence: violations = run_convergence(config, builder); break;
    case Command::Boundary: violations = run_boundary(config, builder); break;
    case Command::Crosscheck: violations = run_crosscheck(config, builder); break;
    case Command::EmitModel: run_emit_model(config, builder); break;
  }
  // emit-model writes the tensor file itself; everything else writes the
  // report document.
  if (config.command == Command::EmitModel) {
    ExperimentConfig no_out = config;
    no_out.out_path.clear();
    return assemble(no_out, builder, violations, started);
  }
  return assemble(config, builder, violations, started);
}

}  // namespace curvlab::cli
