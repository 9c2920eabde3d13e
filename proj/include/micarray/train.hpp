// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "micarray/model.hpp"
#include "micarray/pipeline.hpp"

namespace micarray::nn {

struct TrainHyper {
  double lr = 1e-4;
  int batch_size = 64;
  int max_epochs = 20;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  uint64_t seed = 42;
  int max_windows_per_drag = 0;  // 0 = use every window
};

/// Decoupled-weight-decay Adam. Bias terms, layer-norm parameters, and
/// positional embeddings are exempt from decay.
template <class T>
class AdamW {
 public:
  AdamW(const ModelConfig& config, const TrainHyper& hyper)
      : hyper_(hyper),
        m_(make_params<T>(config)),
        v_(make_params<T>(config)) {}

  void step(ModelParams<T>& params, const ModelParams<T>& grads);

  int64_t steps_taken() const { return t_; }

 private:
  TrainHyper hyper_;
  ModelParams<T> m_, v_;
  int64_t t_ = 0;
};

struct TrainCurves {
  std::vector<double> train_loss;  // mean minibatch loss per epoch
  std::vector<double> val_loss;    // full validation loss per epoch
  int best_epoch = -1;             // epoch of the selected checkpoint (1-based)
};

struct TrainResult {
  ModelParams<float> params;  // checkpoint with the best validation loss
  TrainCurves curves;
};

/// Indices into dataset.samples for one fold.
struct FoldIndices {
  std::vector<int64_t> train;
  std::vector<int64_t> val;
  std::vector<int64_t> test;
};

/// Trains on the fold's train windows, evaluating validation loss after
/// every epoch and returning the parameters with the lowest validation
/// loss. Throws NumericError when the loss diverges. Deterministic in
/// (config, hyper, dataset, fold).
TrainResult train(const ModelConfig& config,
                  const pipeline::WindowDataset& dataset,
                  const FoldIndices& fold, const TrainHyper& hyper,
                  const std::function<void(int, double, double)>& on_epoch = {});

/// Builds model targets for the given samples.
template <class T>
TaskTargets<T> make_targets(const pipeline::WindowDataset& dataset,
                            const std::vector<int64_t>& indices,
                            HeadKind head);

}  // namespace micarray::nn
