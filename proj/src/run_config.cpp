// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/run_config.hpp"

#include <fstream>

#include "micarray/io.hpp"

namespace micarray::io {

using nlohmann::json;

json layout_to_json(const SensorLayout& layout) {
  json mics = json::array();
  for (const auto& p : layout.mic_positions) mics.push_back({p.x(), p.y()});
  return json{{"mic_positions", std::move(mics)},
              {"area_mm", layout.area_mm},
              {"receptive_decay_mm", layout.receptive_decay_mm}};
}

SensorLayout layout_from_json(const json& j) {
  SensorLayout layout;
  const auto& mics = j.at("mic_positions");
  if (mics.size() != kNumMics) throw DataError("layout must have 10 microphones");
  for (int i = 0; i < kNumMics; ++i) {
    layout.mic_positions[i] = {mics[i][0].get<double>(), mics[i][1].get<double>()};
  }
  layout.area_mm = j.at("area_mm").get<double>();
  layout.receptive_decay_mm = j.at("receptive_decay_mm").get<double>();
  return layout;
}

json model_config_to_json(const nn::ModelConfig& c) {
  return json{{"window_len", c.window_len},
              {"in_channels", c.in_channels},
              {"conv_kernels", c.conv_kernels},
              {"conv_strides", c.conv_strides},
              {"latent_channels", c.latent_channels},
              {"enrich_kernel", c.enrich_kernel},
              {"d_model", c.d_model},
              {"n_heads", c.n_heads},
              {"n_layers", c.n_layers},
              {"ff_width", c.ff_width},
              {"head", nn::to_string(c.head)},
              {"n_classes", c.n_classes},
              {"input_scale", c.input_scale},
              {"init_seed", c.init_seed}};
}

nn::ModelConfig model_config_from_json(const json& j) {
  nn::ModelConfig c;
  c.window_len = j.at("window_len").get<int>();
  c.in_channels = j.at("in_channels").get<int>();
  c.conv_kernels = j.at("conv_kernels").get<std::array<int, 3>>();
  c.conv_strides = j.at("conv_strides").get<std::array<int, 3>>();
  c.latent_channels = j.at("latent_channels").get<int>();
  c.enrich_kernel = j.at("enrich_kernel").get<int>();
  c.d_model = j.at("d_model").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.n_layers = j.at("n_layers").get<int>();
  c.ff_width = j.at("ff_width").get<int>();
  c.head = nn::head_from_string(j.at("head").get<std::string>());
  c.n_classes = j.at("n_classes").get<int>();
  c.input_scale = j.at("input_scale").get<double>();
  c.init_seed = j.at("init_seed").get<uint64_t>();
  return c;
}

json hyper_to_json(const nn::TrainHyper& h) {
  return json{{"lr", h.lr},
              {"batch_size", h.batch_size},
              {"max_epochs", h.max_epochs},
              {"weight_decay", h.weight_decay},
              {"beta1", h.beta1},
              {"beta2", h.beta2},
              {"eps", h.eps},
              {"seed", h.seed},
              {"max_windows_per_drag", h.max_windows_per_drag}};
}

nn::TrainHyper hyper_from_json(const json& j) {
  nn::TrainHyper h;
  h.lr = j.at("lr").get<double>();
  h.batch_size = j.at("batch_size").get<int>();
  h.max_epochs = j.at("max_epochs").get<int>();
  h.weight_decay = j.at("weight_decay").get<double>();
  h.beta1 = j.at("beta1").get<double>();
  h.beta2 = j.at("beta2").get<double>();
  h.eps = j.at("eps").get<double>();
  h.seed = j.at("seed").get<uint64_t>();
  h.max_windows_per_drag = j.at("max_windows_per_drag").get<int>();
  return h;
}

int default_window_len(const std::string& task) {
  if (task == "texture") return 500;
  if (task == "localize") return 100;
  if (task == "velocity") return 200;
  throw std::invalid_argument("unknown task: " + task);
}

int default_epochs(const std::string& task) {
  if (task == "texture") return 20;
  if (task == "localize") return 60;
  if (task == "velocity") return 30;
  throw std::invalid_argument("unknown task: " + task);
}

std::string default_split(const std::string& task) {
  return task == "velocity" ? "velocity-cv" : "held-out-velocity";
}

nn::HeadKind default_head(const std::string& task) {
  if (task == "texture") return nn::HeadKind::classify;
  if (task == "localize") return nn::HeadKind::regress2;
  if (task == "velocity") return nn::HeadKind::regress1;
  throw std::invalid_argument("unknown task: " + task);
}

void RunConfig::apply_task_defaults() {
  if (window_len == 0) window_len = default_window_len(task);
  if (split.empty()) split = default_split(task);
  if (hyper.max_epochs == 0) hyper.max_epochs = default_epochs(task);
  model.head = default_head(task);
  model.window_len = window_len;
}

void RunConfig::validate() const {
  if (task != "texture" && task != "localize" && task != "velocity") {
    throw std::invalid_argument("unknown task: " + task);
  }
  if (split != "held-out-velocity" && split != "velocity-cv") {
    throw std::invalid_argument("unknown split strategy: " + split);
  }
  model.validate();
}

json run_config_to_json(const RunConfig& rc) {
  return json{{"task", rc.task},
              {"window_len", rc.window_len},
              {"offset", rc.offset},
              {"split", rc.split},
              {"fold", rc.fold},
              {"model", model_config_to_json(rc.model)},
              {"hyper", hyper_to_json(rc.hyper)},
              {"seed", rc.seed},
              {"out_dir", rc.out_dir},
              {"dataset_path", rc.dataset_path}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig rc;
  rc.task = j.at("task").get<std::string>();
  rc.window_len = j.at("window_len").get<int>();
  rc.offset = j.at("offset").get<int>();
  rc.split = j.at("split").get<std::string>();
  rc.fold = j.at("fold").get<int>();
  rc.model = model_config_from_json(j.at("model"));
  rc.hyper = hyper_from_json(j.at("hyper"));
  rc.seed = j.at("seed").get<uint64_t>();
  rc.out_dir = j.at("out_dir").get<std::string>();
  rc.dataset_path = j.value("dataset_path", "");
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run config " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError("cannot parse run config " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

void save_run_config(const std::string& path, const RunConfig& rc) {
  write_text_file(path, run_config_to_json(rc).dump(2) + "\n");
}

}  // namespace micarray::io
