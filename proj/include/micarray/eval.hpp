// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "micarray/geometry.hpp"
#include "micarray/model.hpp"
#include "micarray/pipeline.hpp"

namespace micarray::harness {

struct TextureEval {
  Eigen::Matrix4i confusion;  // rows = true class, cols = predicted
  double accuracy = 0.0;
  // Share of misclassified samples that landed on a spacing-adjacent class.
  double adjacency_share = 0.0;
  int64_t total = 0;
};

struct LocalizationEval {
  double mean_mm = 0.0;
  double median_mm = 0.0;
  int64_t count = 0;
  std::vector<double> errors;  // per-window Euclidean errors
};

struct VelocityBinStats {
  double bin_mm_s = 0.0;
  double mean = 0.0;
  double median = 0.0;
  int64_t count = 0;
};

struct VelocityEval {
  double history_s = 0.0;
  std::vector<VelocityBinStats> bins;  // only bins with samples
  double overall_mean = 0.0;
  double overall_median = 0.0;
  int64_t count = 0;
  std::vector<double> errors;
};

TextureEval eval_texture(const nn::ModelConfig& config,
                         const nn::ModelParams<float>& params,
                         const pipeline::WindowDataset& dataset,
                         const std::vector<int64_t>& test_indices);

LocalizationEval eval_localization(const nn::ModelConfig& config,
                                   const nn::ModelParams<float>& params,
                                   const pipeline::WindowDataset& dataset,
                                   const std::vector<int64_t>& test_indices);

/// Nearest multiple of `bin_width` (default 5 mm/s).
double velocity_bin(double velocity_mm_s, double bin_width = 5.0);

VelocityEval eval_velocity(const nn::ModelConfig& config,
                           const nn::ModelParams<float>& params,
                           const pipeline::WindowDataset& dataset,
                           const std::vector<int64_t>& test_indices,
                           double history_s);

/// Heuristic localization baseline: position of the microphone with the
/// highest SNR over the window, SNR = channel RMS / per-channel noise-floor
/// RMS. Ties break to the lowest channel index. Throws DataError when the
/// noise floor is missing or non-positive.
Vec2 snr_baseline_localize(const Eigen::MatrixXf& window,
                           const Eigen::Matrix<double, kNumMics, 1>& noise_floor,
                           const SensorLayout& layout);

/// SNR baseline over a test fold, using each drag's stored noise floor.
LocalizationEval eval_snr_baseline(const SensorLayout& layout,
                                   const pipeline::WindowDataset& dataset,
                                   const std::vector<int64_t>& test_indices);

/// Velocity from the position model's estimates over the first and last
/// 100-step sub-windows of a 200-step window: |p_end - p_start| / 0.1 s.
/// Throws std::invalid_argument unless the window has exactly 200 steps and
/// the position model expects 100.
double velocity_from_position_baseline(const nn::ModelConfig& pos_config,
                                       const nn::ModelParams<float>& pos_params,
                                       const Eigen::MatrixXf& window200);

VelocityEval eval_velocity_baseline(const nn::ModelConfig& pos_config,
                                    const nn::ModelParams<float>& pos_params,
                                    const pipeline::WindowDataset& dataset,
                                    const std::vector<int64_t>& test_indices);

}  // namespace micarray::harness
