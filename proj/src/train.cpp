// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "micarray/rng.hpp"

namespace micarray::nn {

namespace {

template <class T>
struct TensorRef {
  std::string name;
  T* data;
  int64_t size;
};

template <class T>
std::vector<TensorRef<T>> flatten(ModelParams<T>& p) {
  std::vector<TensorRef<T>> out;
  p.for_each_tensor([&](const std::string& name, auto& t) {
    out.push_back({name, t.data(), t.size()});
  });
  return out;
}

bool decay_exempt(const std::string& name) {
  if (name == "pos") return true;
  if (name.size() > 2 && name.compare(name.size() - 2, 2, ".b") == 0) return true;
  return name.find("gamma") != std::string::npos ||
         name.find("beta") != std::string::npos;
}

}  // namespace

template <class T>
void AdamW<T>::step(ModelParams<T>& params, const ModelParams<T>& grads) {
  ++t_;
  const T lr = static_cast<T>(hyper_.lr);
  const T b1 = static_cast<T>(hyper_.beta1);
  const T b2 = static_cast<T>(hyper_.beta2);
  const T eps = static_cast<T>(hyper_.eps);
  const T wd = static_cast<T>(hyper_.weight_decay);
  const T bc1 = T(1) - std::pow(b1, static_cast<T>(t_));
  const T bc2 = T(1) - std::pow(b2, static_cast<T>(t_));

  auto p_refs = flatten(params);
  auto g_refs = flatten(const_cast<ModelParams<T>&>(grads));
  auto m_refs = flatten(m_);
  auto v_refs = flatten(v_);
  for (size_t k = 0; k < p_refs.size(); ++k) {
    T* p = p_refs[k].data;
    const T* g = g_refs[k].data;
    T* m = m_refs[k].data;
    T* v = v_refs[k].data;
    const T decay = decay_exempt(p_refs[k].name) ? T(0) : wd;
    for (int64_t i = 0; i < p_refs[k].size; ++i) {
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      const T mhat = m[i] / bc1;
      const T vhat = v[i] / bc2;
      p[i] -= lr * (mhat / (std::sqrt(vhat) + eps) + decay * p[i]);
    }
  }
}

template class AdamW<float>;
template class AdamW<double>;

template <class T>
TaskTargets<T> make_targets(const pipeline::WindowDataset& dataset,
                            const std::vector<int64_t>& indices,
                            HeadKind head) {
  TaskTargets<T> t;
  t.kind = head;
  const int b = static_cast<int>(indices.size());
  if (head == HeadKind::classify) {
    t.classes.resize(b);
    for (int i = 0; i < b; ++i) {
      t.classes[i] = dataset.samples[indices[i]].texture;
    }
  } else {
    const int k = head == HeadKind::regress2 ? 2 : 1;
    t.values.resize(b, k);
    for (int i = 0; i < b; ++i) {
      const auto& s = dataset.samples[indices[i]];
      if (head == HeadKind::regress2) {
        t.values(i, 0) = static_cast<T>(s.pos_mm.x());
        t.values(i, 1) = static_cast<T>(s.pos_mm.y());
      } else {
        t.values(i, 0) = static_cast<T>(s.vel_mm_s);
      }
    }
  }
  return t;
}

template TaskTargets<float> make_targets(const pipeline::WindowDataset&,
                                         const std::vector<int64_t>&, HeadKind);
template TaskTargets<double> make_targets(const pipeline::WindowDataset&,
                                          const std::vector<int64_t>&, HeadKind);

namespace {

// Deterministic cap on windows per drag: keeps an evenly spaced subset of
// each drag's windows, preserving order.
std::vector<int64_t> cap_windows_per_drag(
    const pipeline::WindowDataset& dataset, const std::vector<int64_t>& indices,
    int cap) {
  if (cap <= 0) return indices;
  std::map<uint32_t, std::vector<int64_t>> by_drag;
  for (const int64_t idx : indices) {
    by_drag[dataset.samples[idx].drag_index].push_back(idx);
  }
  std::vector<int64_t> out;
  for (auto& [drag, order] : by_drag) {
    const int64_t n = static_cast<int64_t>(order.size());
    if (n <= cap) {
      out.insert(out.end(), order.begin(), order.end());
    } else {
      for (int k = 0; k < cap; ++k) {
        out.push_back(order[k * n / cap]);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TaskTargets<float> make_targets(const ModelConfig& config,
                                const pipeline::WindowDataset& dataset,
                                const std::vector<int64_t>& indices) {
  return make_targets<float>(dataset, indices, config.head);
}

double dataset_loss(const ModelConfig& config, const ModelParams<float>& params,
                    const pipeline::WindowDataset& dataset,
                    const std::vector<int64_t>& indices) {
  if (indices.empty()) return std::numeric_limits<double>::quiet_NaN();
  MatT<float> outputs(indices.size(), config.head_dim());
  constexpr int64_t kChunk = 512;
  for (size_t base = 0; base < indices.size(); base += kChunk) {
    const size_t n = std::min<size_t>(kChunk, indices.size() - base);
    std::vector<const MatT<float>*> windows(n);
    for (size_t i = 0; i < n; ++i) {
      windows[i] = &dataset.samples[indices[base + i]].data;
    }
    outputs.middleRows(base, n) = forward_batch(config, params, windows);
  }
  const auto targets = make_targets(config, dataset, indices);
  return static_cast<double>(loss_value(outputs, targets));
}

}  // namespace

TrainResult train(const ModelConfig& config,
                  const pipeline::WindowDataset& dataset,
                  const FoldIndices& fold, const TrainHyper& hyper,
                  const std::function<void(int, double, double)>& on_epoch) {
  config.validate();
  if (fold.train.empty()) throw DataError("train: fold has no training windows");

  std::vector<int64_t> train_idx =
      cap_windows_per_drag(dataset, fold.train, hyper.max_windows_per_drag);

  ModelParams<float> params = init_params<float>(config, hyper.seed);
  AdamW<float> opt(config, hyper);
  const Rng root(Rng::mix(hyper.seed, 0x7261696e));

  TrainResult result;
  result.params = params;
  double best_val = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
    Rng shuffle_rng = root.stream(epoch);
    shuffle_rng.shuffle(train_idx);

    double epoch_loss = 0.0;
    int64_t batches = 0;
    for (size_t base = 0; base < train_idx.size(); base += hyper.batch_size) {
      const size_t n = std::min<size_t>(hyper.batch_size, train_idx.size() - base);
      std::vector<int64_t> batch(train_idx.begin() + base,
                                 train_idx.begin() + base + n);
      std::vector<const MatT<float>*> windows(n);
      for (size_t i = 0; i < n; ++i) {
        windows[i] = &dataset.samples[batch[i]].data;
      }
      const auto targets = make_targets(config, dataset, batch);
      GradResult<float> gr = loss_and_gradient(config, params, windows, targets);
      if (!std::isfinite(gr.loss)) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                           ", step " + std::to_string(opt.steps_taken() + 1) +
                           ": non-finite loss");
      }
      opt.step(params, gr.grads);
      epoch_loss += gr.loss;
      ++batches;
    }
    epoch_loss /= std::max<int64_t>(1, batches);

    double val_loss = fold.val.empty()
                          ? epoch_loss
                          : dataset_loss(config, params, dataset, fold.val);
    if (!std::isfinite(val_loss)) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                         ": non-finite validation loss");
    }
    result.curves.train_loss.push_back(epoch_loss);
    result.curves.val_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      result.params = params;
      result.curves.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(epoch, epoch_loss, val_loss);
  }
  return result;
}

}  // namespace micarray::nn
