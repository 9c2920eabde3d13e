// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <string>

#include "micarray/geometry.hpp"
#include "micarray/model.hpp"
#include "micarray/train.hpp"

namespace micarray::io {

nlohmann::json model_config_to_json(const nn::ModelConfig& config);
nn::ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json layout_to_json(const SensorLayout& layout);
SensorLayout layout_from_json(const nlohmann::json& j);

nlohmann::json hyper_to_json(const nn::TrainHyper& hyper);
nn::TrainHyper hyper_from_json(const nlohmann::json& j);

/// Everything needed to reproduce one run byte-for-byte.
struct RunConfig {
  std::string task;           // texture | localize | velocity | detect
  int window_len = 0;         // filled from the task default when 0
  int offset = 50;
  std::string split;          // held-out-velocity | velocity-cv
  int fold = -1;              // -1 = all folds
  nn::ModelConfig model;
  nn::TrainHyper hyper;
  uint64_t seed = 42;
  std::string out_dir;
  std::string dataset_path;

  void apply_task_defaults();
  void validate() const;
};

nlohmann::json run_config_to_json(const RunConfig& rc);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& rc);

/// Task defaults: window length, epochs, split strategy, head kind.
int default_window_len(const std::string& task);
int default_epochs(const std::string& task);
std::string default_split(const std::string& task);
nn::HeadKind default_head(const std::string& task);

}  // namespace micarray::io
