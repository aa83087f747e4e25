// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

// Batch front end: builds model tensors, runs condition checks, flows and
// experiments, and emits machine-readable reports.
//
//   curvlab check --model "fs(2)" --cones pic,pinch
//   curvlab evolve --model "const(3,1.0)" --t-end 0.2
//   curvlab invariance --cones pic --samples 50 --dim 4 --seed 7
//   curvlab boundary --samples 100 --dim 4 --seed 3 --out report.json
//   curvlab crosscheck --model "prod(const(2,1),const(2,1))" --cones pic --seed 1
//   curvlab emit-model --model "shift(rand(4,3,1.0),pic,0.0)" --out t.json
//
// Exit codes: 0 success, 2 violations found, 1 errors.
// CURVLAB_THREADS caps the worker count.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "curvlab/cli.hpp"
#include "curvlab/errors.hpp"

namespace {

void split_cones(const std::string& list, std::vector<std::string>& out) {
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= list.size(); ++i) {
    if (i < list.size() && list[i] == '(') ++depth;
    if (i < list.size() && list[i] == ')') --depth;
    if (i == list.size() || (list[i] == ',' && depth == 0)) {
      if (i > start) out.push_back(list.substr(start, i - start));
      start = i + 1;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvlab - numerical laboratory for algebraic curvature "
               "operators"};
  app.require_subcommand(1);

  curvlab::cli::ExperimentConfig config;
  std::string cones_list;
  std::string lambda_range = "01";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", config.model, "model grammar text");
    cmd->add_option("--input", config.input_path, "tensor file path");
    cmd->add_option("--cones", cones_list,
                    "comma-separated cone list (pic, pic1, pic2, 2pos, op, "
                    "sec, pinch, ricpinch(r), pic1scal(r), pic2scal(r))");
    cmd->add_option("--t-end", config.t_end, "integration horizon");
    cmd->add_option("--samples", config.samples, "sample count");
    cmd->add_option("--dim", config.dim, "dimension for sampled tensors");
    cmd->add_option("--horizon", config.horizon, "experiment horizon");
    cmd->add_option("--seed", config.seed, "base seed")
        ->each([&](const std::string&) { config.seed_set = true; });
    cmd->add_option("--out", config.out_path, "report output path");
    cmd->add_option("--rel-tol", config.rel_tol, "integrator tolerance");
    cmd->add_option("--restarts", config.restarts, "optimizer restarts");
    cmd->add_option("--lambda-range", lambda_range,
                    "weight range for pic1/pic2: 01 or sym");
    cmd->add_option("--dump-states", config.dump_states_every,
                    "evolve: embed states every k steps");
    cmd->add_option("-v,--verbosity", config.verbosity, "0 = quiet");
  };

  using curvlab::cli::Command;
  struct Sub {
    const char* name;
    const char* help;
    Command command;
  };
  const Sub subs[] = {
      {"check", "cone margins and pinching of one tensor", Command::Check},
      {"evolve", "integrate the reaction ODE dR/dt = Q(R)", Command::Evolve},
      {"invariance", "cone invariance along sampled flows",
       Command::Invariance},
      {"convergence", "pinching-ratio convergence of one start",
       Command::Convergence},
      {"boundary", "boundary inequality on certified PIC boundary tensors",
       Command::Boundary},
      {"crosscheck", "complex-vector cross-check of frame margins",
       Command::Crosscheck},
      {"emit-model", "build a model tensor and write the tensor file",
       Command::EmitModel},
  };
  for (const auto& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    add_common(cmd);
    cmd->callback([&, command = sub.command] { config.command = command; });
  }

  CLI11_PARSE(app, argc, argv);

  split_cones(cones_list, config.cones);
  if (lambda_range == "sym")
    config.lambda_range = curvlab::core::LambdaRange::SymmetricOne;
  else if (lambda_range != "01") {
    std::cerr << "error: --lambda-range must be 01 or sym\n";
    return 1;
  }

  try {
    const auto report = curvlab::cli::run(config);
    if (config.verbosity > 0) {
      std::cout << report.human_summary;
      if (config.out_path.empty() && config.verbosity > 1)
        std::cout << report.document;
    }
    return report.exit_code;
  } catch (const curvlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
