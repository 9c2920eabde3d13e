// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "micarray/geometry.hpp"
#include "micarray/run_config.hpp"
#include "micarray/sim.hpp"
#include "micarray/study.hpp"

namespace micarray::cli {

struct SimulateArgs {
  std::string out_dir;
  uint64_t seed = 42;
  std::string kind = "drag";  // drag | tap
  // Drag grid.
  int drags_per_cell = 40;
  bool paper_scale = false;  // 200 drags per cell
  std::vector<std::string> textures{"a", "b", "c", "d"};
  std::vector<double> velocities{20, 25, 30, 35, 40, 45, 50, 55, 60};
  // Tap grid.
  std::vector<double> tap_distances{0, 2, 4, 6};
  std::vector<double> tap_velocities{10, 55, 100};
  int taps_per_cell = 30;
  int reference_mic = 0;
  bool quiet = false;
};

/// Generates the episode grid and writes episodes plus manifest.json.
void cmd_simulate(const SimulateArgs& args);

struct PreprocessArgs {
  std::string manifest_path;
  std::string task = "texture";  // texture | localize | velocity
  int window_len = 0;            // 0 = task default
  int offset = 50;
  std::string out_path;
  bool verify_hash = true;
  bool quiet = false;
};

/// Builds the window dataset for a task from a drag manifest.
void cmd_preprocess(const PreprocessArgs& args);

struct TrainArgs {
  std::string dataset_path;
  std::string out_dir;
  int fold = -1;  // -1 = all folds of the plan
  io::RunConfig run;  // task etc. filled from the dataset when empty
  bool quiet = false;
};

/// Trains the configured fold(s); writes checkpoints, curves, run config.
void cmd_train(const TrainArgs& args);

struct EvalArgs {
  std::string run_dir;       // produced by cmd_train
  std::string dataset_path;  // defaults to the one recorded in the run config
  std::string position_run_dir;  // optional: enables the velocity baseline
  bool quiet = false;
};

/// Evaluates every trained fold in a run directory; writes report.json,
/// report.csv, and confusion SVGs.
void cmd_eval(const EvalArgs& args);

struct DetectArgs {
  std::string out_dir;
  std::string manifest_path;  // optional: measure stored tap episodes
  detect::StudyParams study;
  bool quiet = false;
};

/// Runs the response-time study (simulated grid or stored taps); writes the
/// response-time table as CSV/JSON plus per-episode events.
void cmd_detect(const DetectArgs& args);

struct ReportArgs {
  std::vector<std::string> run_dirs;
  std::string out_path;  // markdown summary
  bool quiet = false;
};

/// Merges run reports into a single human-readable summary (and the
/// velocity history-by-bin table when velocity runs are present).
void cmd_report(const ReportArgs& args);

/// Default output root: $MICARRAY_OUT or "./micarray-out".
std::string default_output_root();

}  // namespace micarray::cli
