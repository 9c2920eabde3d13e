// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace micarray::harness {

namespace {

using nn::MatT;

MatT<float> predict(const nn::ModelConfig& config,
                    const nn::ModelParams<float>& params,
                    const pipeline::WindowDataset& dataset,
                    const std::vector<int64_t>& indices) {
  if (indices.empty()) throw DataError("evaluation over an empty test set");
  MatT<float> outputs(indices.size(), config.head_dim());
  constexpr size_t kChunk = 512;
  for (size_t base = 0; base < indices.size(); base += kChunk) {
    const size_t n = std::min(kChunk, indices.size() - base);
    std::vector<const MatT<float>*> windows(n);
    for (size_t i = 0; i < n; ++i) {
      windows[i] = &dataset.samples[indices[base + i]].data;
    }
    outputs.middleRows(base, n) = nn::forward_batch(config, params, windows);
  }
  return outputs;
}

}  // namespace

TextureEval eval_texture(const nn::ModelConfig& config,
                         const nn::ModelParams<float>& params,
                         const pipeline::WindowDataset& dataset,
                         const std::vector<int64_t>& test_indices) {
  const MatT<float> outputs = predict(config, params, dataset, test_indices);
  TextureEval ev;
  ev.confusion.setZero();
  int64_t adjacent = 0, wrong = 0;
  for (size_t i = 0; i < test_indices.size(); ++i) {
    int pred = 0;
    outputs.row(i).maxCoeff(&pred);
    const int truth = dataset.samples[test_indices[i]].texture;
    ev.confusion(truth, pred) += 1;
    if (pred != truth) {
      ++wrong;
      if (std::abs(pred - truth) == 1) ++adjacent;
    }
  }
  ev.total = static_cast<int64_t>(test_indices.size());
  ev.accuracy = static_cast<double>(ev.confusion.trace()) / ev.total;
  ev.adjacency_share =
      wrong == 0 ? 0.0 : static_cast<double>(adjacent) / wrong;
  return ev;
}

LocalizationEval eval_localization(const nn::ModelConfig& config,
                                   const nn::ModelParams<float>& params,
                                   const pipeline::WindowDataset& dataset,
                                   const std::vector<int64_t>& test_indices) {
  const MatT<float> outputs = predict(config, params, dataset, test_indices);
  LocalizationEval ev;
  ev.errors.reserve(test_indices.size());
  for (size_t i = 0; i < test_indices.size(); ++i) {
    const Vec2 pred(outputs(i, 0), outputs(i, 1));
    ev.errors.push_back((pred - dataset.samples[test_indices[i]].pos_mm).norm());
  }
  ev.count = static_cast<int64_t>(ev.errors.size());
  ev.mean_mm =
      std::accumulate(ev.errors.begin(), ev.errors.end(), 0.0) / ev.count;
  ev.median_mm = pipeline::median(ev.errors);
  return ev;
}

double velocity_bin(double velocity_mm_s, double bin_width) {
  return std::round(velocity_mm_s / bin_width) * bin_width;
}

namespace {

VelocityEval summarize_velocity_errors(
    const pipeline::WindowDataset& dataset,
    const std::vector<int64_t>& test_indices, std::vector<double> errors,
    double history_s) {
  VelocityEval ev;
  ev.history_s = history_s;
  ev.errors = std::move(errors);
  ev.count = static_cast<int64_t>(ev.errors.size());
  ev.overall_mean =
      std::accumulate(ev.errors.begin(), ev.errors.end(), 0.0) / ev.count;
  ev.overall_median = pipeline::median(ev.errors);

  std::map<double, std::vector<double>> binned;
  for (size_t i = 0; i < test_indices.size(); ++i) {
    const double bin =
        velocity_bin(dataset.samples[test_indices[i]].nominal_velocity_mm_s);
    binned[bin].push_back(ev.errors[i]);
  }
  for (auto& [bin, errs] : binned) {
    VelocityBinStats stats;
    stats.bin_mm_s = bin;
    stats.count = static_cast<int64_t>(errs.size());
    stats.mean = std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
    stats.median = pipeline::median(errs);
    ev.bins.push_back(stats);
  }
  return ev;
}

}  // namespace

VelocityEval eval_velocity(const nn::ModelConfig& config,
                           const nn::ModelParams<float>& params,
                           const pipeline::WindowDataset& dataset,
                           const std::vector<int64_t>& test_indices,
                           double history_s) {
  const MatT<float> outputs = predict(config, params, dataset, test_indices);
  std::vector<double> errors(test_indices.size());
  for (size_t i = 0; i < test_indices.size(); ++i) {
    errors[i] = std::abs(static_cast<double>(outputs(i, 0)) -
                         dataset.samples[test_indices[i]].vel_mm_s);
  }
  return summarize_velocity_errors(dataset, test_indices, std::move(errors),
                                   history_s);
}

Vec2 snr_baseline_localize(const Eigen::MatrixXf& window,
                           const Eigen::Matrix<double, kNumMics, 1>& noise_floor,
                           const SensorLayout& layout) {
  if (window.cols() != kNumMics) {
    throw std::invalid_argument("snr_baseline_localize: expected 10 channels");
  }
  if ((noise_floor.array() <= 0.0).any()) {
    throw DataError("snr_baseline_localize: missing noise-floor calibration");
  }
  int best = 0;
  double best_snr = -1.0;
  for (int ch = 0; ch < kNumMics; ++ch) {
    const double rms = std::sqrt(
        window.col(ch).cast<double>().array().square().mean());
    const double snr = rms / noise_floor(ch);
    if (snr > best_snr) {  // strict: ties keep the lowest channel index
      best_snr = snr;
      best = ch;
    }
  }
  return layout.mic_positions[best];
}

LocalizationEval eval_snr_baseline(const SensorLayout& layout,
                                   const pipeline::WindowDataset& dataset,
                                   const std::vector<int64_t>& test_indices) {
  if (test_indices.empty()) throw DataError("evaluation over an empty test set");
  LocalizationEval ev;
  ev.errors.reserve(test_indices.size());
  for (const int64_t idx : test_indices) {
    const auto& sample = dataset.samples[idx];
    const Vec2 pred = snr_baseline_localize(
        sample.data, dataset.drags[sample.drag_index].noise_floor, layout);
    ev.errors.push_back((pred - sample.pos_mm).norm());
  }
  ev.count = static_cast<int64_t>(ev.errors.size());
  ev.mean_mm =
      std::accumulate(ev.errors.begin(), ev.errors.end(), 0.0) / ev.count;
  ev.median_mm = pipeline::median(ev.errors);
  return ev;
}

double velocity_from_position_baseline(const nn::ModelConfig& pos_config,
                                       const nn::ModelParams<float>& pos_params,
                                       const Eigen::MatrixXf& window200) {
  if (window200.rows() != 200) {
    throw std::invalid_argument(
        "velocity_from_position_baseline: window must have 200 steps");
  }
  if (pos_config.window_len != 100) {
    throw std::invalid_argument(
        "velocity_from_position_baseline: position model must use 100-step windows");
  }
  const Eigen::MatrixXf start = window200.topRows(100);
  const Eigen::MatrixXf end = window200.bottomRows(100);
  const auto p_start = nn::forward(pos_config, pos_params, start);
  const auto p_end = nn::forward(pos_config, pos_params, end);
  const double dx = static_cast<double>(p_end(0) - p_start(0));
  const double dy = static_cast<double>(p_end(1) - p_start(1));
  return std::sqrt(dx * dx + dy * dy) / 0.10;
}

VelocityEval eval_velocity_baseline(const nn::ModelConfig& pos_config,
                                    const nn::ModelParams<float>& pos_params,
                                    const pipeline::WindowDataset& dataset,
                                    const std::vector<int64_t>& test_indices) {
  if (test_indices.empty()) throw DataError("evaluation over an empty test set");
  std::vector<double> errors(test_indices.size());
  for (size_t i = 0; i < test_indices.size(); ++i) {
    const auto& sample = dataset.samples[test_indices[i]];
    const double est = velocity_from_position_baseline(pos_config, pos_params,
                                                       sample.data);
    errors[i] = std::abs(est - sample.vel_mm_s);
  }
  return summarize_velocity_errors(dataset, test_indices, std::move(errors),
                                   0.10);
}

}  // namespace micarray::harness
