// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0
//
// micarray CLI: simulate, preprocess, train, eval, detect, report.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <CLI11.hpp>

#include <iostream>

#include "micarray/commands.hpp"
#include "micarray/common.hpp"
#include "micarray/run_config.hpp"

using namespace micarray;

int main(int argc, char** argv) {
  CLI::App app{"Sparse microphone-array tactile sensing toolkit"};
  app.require_subcommand(1);

  cli::SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Generate synthetic episodes");
  sim->add_option("-o,--out", sim_args.out_dir, "Output directory");
  sim->add_option("--seed", sim_args.seed, "Base RNG seed");
  sim->add_option("--kind", sim_args.kind, "Episode kind: drag or tap")
      ->check(CLI::IsMember({"drag", "tap"}));
  sim->add_option("--drags-per-cell", sim_args.drags_per_cell,
                  "Drags per (texture, velocity) cell");
  sim->add_flag("--paper-scale", sim_args.paper_scale,
                "Use 200 drags per cell instead of the desk-scale default");
  sim->add_option("--textures", sim_args.textures, "Texture ids (a b c d)");
  sim->add_option("--velocities", sim_args.velocities, "Drag velocities, mm/s");
  sim->add_option("--tap-distances", sim_args.tap_distances,
                  "Tap distances from the reference mic, mm");
  sim->add_option("--tap-velocities", sim_args.tap_velocities,
                  "Tap approach velocities, mm/s");
  sim->add_option("--taps-per-cell", sim_args.taps_per_cell,
                  "Taps per (distance, velocity) cell");
  sim->add_option("--reference-mic", sim_args.reference_mic,
                  "Reference microphone index");
  sim->add_flag("-q,--quiet", sim_args.quiet, "Suppress progress output");

  cli::PreprocessArgs pre_args;
  auto* pre = app.add_subcommand("preprocess",
                                 "Build a window dataset from a manifest");
  pre->add_option("-m,--manifest", pre_args.manifest_path, "Manifest path")
      ->required();
  pre->add_option("--task", pre_args.task, "texture | localize | velocity")
      ->check(CLI::IsMember({"texture", "localize", "velocity"}));
  pre->add_option("--window", pre_args.window_len,
                  "Window length override (0 = task default)");
  pre->add_option("--offset", pre_args.offset, "Window offset, samples");
  pre->add_option("-o,--out", pre_args.out_path, "Output dataset path");
  pre->add_flag("!--no-verify", pre_args.verify_hash,
                "Skip content-hash verification");
  pre->add_flag("-q,--quiet", pre_args.quiet, "Suppress progress output");

  cli::TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train fold(s) of a task");
  train->add_option("-d,--dataset", train_args.dataset_path, "Window dataset")
      ->required();
  train->add_option("-o,--out", train_args.run.out_dir, "Run directory");
  train->add_option("--fold", train_args.fold, "Fold index (-1 = all)");
  train->add_option("--split", train_args.run.split,
                    "held-out-velocity | velocity-cv");
  train->add_option("--seed", train_args.run.seed, "Seed");
  train->add_option("--lr", train_args.run.hyper.lr, "Learning rate");
  train->add_option("--batch", train_args.run.hyper.batch_size, "Batch size");
  int epochs_override = 0;
  train->add_option("--epochs", epochs_override, "Max epochs (0 = task default)");
  train->add_option("--max-windows-per-drag",
                    train_args.run.hyper.max_windows_per_drag,
                    "Cap training windows per drag (0 = all)");
  train->add_flag("-q,--quiet", train_args.quiet, "Suppress progress output");

  cli::EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate trained fold(s)");
  eval->add_option("-r,--run", eval_args.run_dir, "Run directory")->required();
  eval->add_option("-d,--dataset", eval_args.dataset_path,
                   "Dataset override (defaults to the run config's)");
  eval->add_option("--position-run", eval_args.position_run_dir,
                   "Position run directory for the velocity baseline");
  eval->add_flag("-q,--quiet", eval_args.quiet, "Suppress progress output");

  cli::DetectArgs det_args;
  auto* det = app.add_subcommand("detect", "Run the response-time study");
  det->add_option("-o,--out", det_args.out_dir, "Output directory");
  det->add_option("-m,--manifest", det_args.manifest_path,
                  "Measure stored tap episodes instead of simulating");
  det->add_option("--distances", det_args.study.distances_mm, "Distances, mm");
  det->add_option("--velocities", det_args.study.velocities_mm_s,
                  "Approach velocities, mm/s");
  det->add_option("--episodes", det_args.study.episodes_per_cell,
                  "Episodes per cell");
  det->add_option("--reference-mic", det_args.study.reference_mic,
                  "Detection channel");
  det->add_option("--seed", det_args.study.base_seed, "Base RNG seed");
  det->add_flag("-q,--quiet", det_args.quiet, "Suppress progress output");

  cli::ReportArgs rep_args;
  auto* rep = app.add_subcommand("report", "Merge run reports into a summary");
  rep->add_option("runs", rep_args.run_dirs, "Run directories")->required();
  rep->add_option("-o,--out", rep_args.out_path, "Summary path (markdown)");
  rep->add_flag("-q,--quiet", rep_args.quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sim) cli::cmd_simulate(sim_args);
    if (*pre) cli::cmd_preprocess(pre_args);
    if (*train) {
      train_args.run.hyper.max_epochs = epochs_override;
      cli::cmd_train(train_args);
    }
    if (*eval) cli::cmd_eval(eval_args);
    if (*det) cli::cmd_detect(det_args);
    if (*rep) cli::cmd_report(rep_args);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
