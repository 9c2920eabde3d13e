// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0
//
// Conv + transformer signal encoder with task heads.
//
// Layout of one forward pass over an n-by-10 window:
//   scale -> 3x strided valid conv (GELU between) -> residual conv
//   enrichment -> linear projection to d_model + learned positional
//   embedding -> 2 pre-norm transformer layers -> final layer norm ->
//   self-attention pooling -> linear head.
//
// All layers carry hand-derived reverse-mode gradients; the finite
// difference suite in tests/ is the correctness oracle.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "micarray/common.hpp"
#include "micarray/rng.hpp"

namespace micarray::nn {

template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

enum class HeadKind { classify, regress2, regress1 };

std::string to_string(HeadKind head);
HeadKind head_from_string(const std::string& s);

struct ModelConfig {
  int window_len = 500;
  int in_channels = kNumMics;
  std::array<int, 3> conv_kernels{7, 5, 5};
  std::array<int, 3> conv_strides{4, 2, 2};
  int latent_channels = 10;
  int enrich_kernel = 3;  // odd, same-padded
  int d_model = 32;
  int n_heads = 2;
  int n_layers = 2;
  int ff_width = 64;
  HeadKind head = HeadKind::classify;
  int n_classes = 4;
  double input_scale = 1.0 / 64.0;
  uint64_t init_seed = 42;

  int head_dim() const {
    switch (head) {
      case HeadKind::classify: return n_classes;
      case HeadKind::regress2: return 2;
      case HeadKind::regress1: return 1;
    }
    return 0;
  }

  /// Valid-convolution output length of the conv chain; the token count m.
  int token_len() const { return token_len_for(window_len); }
  int token_len_for(int n) const;

  void validate() const;
};

template <class T>
struct Linear {
  MatT<T> w;  // in x out
  VecT<T> b;
};

template <class T>
struct Conv1d {
  MatT<T> w;  // (kernel * cin) x cout
  VecT<T> b;
};

template <class T>
struct LayerNormP {
  VecT<T> gamma, beta;
};

template <class T>
struct Block {
  LayerNormP<T> ln1;
  Linear<T> wq, wk, wv, wo;
  LayerNormP<T> ln2;
  Linear<T> ff1, ff2;
};

template <class T>
struct ModelParams {
  std::array<Conv1d<T>, 3> conv;
  Conv1d<T> enrich;
  Linear<T> proj;
  MatT<T> pos;  // token_len x d_model
  std::vector<Block<T>> blocks;
  LayerNormP<T> ln_final;
  VecT<T> pool_w;
  Linear<T> head;

  /// Applies f(name, tensor) to every parameter tensor, in a fixed order.
  template <class F>
  void for_each_tensor(F&& f) {
    visit_impl(*this, f);
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    visit_impl(*this, f);
  }

  void set_zero() {
    for_each_tensor([](const std::string&, auto& t) { t.setZero(); });
  }

  /// Elementwise *this += scale * other. Shapes must match.
  void add_scaled(const ModelParams<T>& other, T scale) {
    for (int i = 0; i < 3; ++i) {
      conv[i].w += scale * other.conv[i].w;
      conv[i].b += scale * other.conv[i].b;
    }
    enrich.w += scale * other.enrich.w;
    enrich.b += scale * other.enrich.b;
    proj.w += scale * other.proj.w;
    proj.b += scale * other.proj.b;
    pos += scale * other.pos;
    for (size_t i = 0; i < blocks.size(); ++i) {
      Block<T>& a = blocks[i];
      const Block<T>& o = other.blocks[i];
      a.ln1.gamma += scale * o.ln1.gamma;
      a.ln1.beta += scale * o.ln1.beta;
      a.wq.w += scale * o.wq.w;
      a.wq.b += scale * o.wq.b;
      a.wk.w += scale * o.wk.w;
      a.wk.b += scale * o.wk.b;
      a.wv.w += scale * o.wv.w;
      a.wv.b += scale * o.wv.b;
      a.wo.w += scale * o.wo.w;
      a.wo.b += scale * o.wo.b;
      a.ln2.gamma += scale * o.ln2.gamma;
      a.ln2.beta += scale * o.ln2.beta;
      a.ff1.w += scale * o.ff1.w;
      a.ff1.b += scale * o.ff1.b;
      a.ff2.w += scale * o.ff2.w;
      a.ff2.b += scale * o.ff2.b;
    }
    ln_final.gamma += scale * other.ln_final.gamma;
    ln_final.beta += scale * other.ln_final.beta;
    pool_w += scale * other.pool_w;
    head.w += scale * other.head.w;
    head.b += scale * other.head.b;
  }

  bool all_finite() const {
    bool ok = true;
    for_each_tensor([&](const std::string&, const auto& t) {
      ok = ok && t.allFinite();
    });
    return ok;
  }

  int64_t parameter_count() const {
    int64_t count = 0;
    for_each_tensor([&](const std::string&, const auto& t) { count += t.size(); });
    return count;
  }

  template <class U>
  ModelParams<U> cast() const;

 private:
  template <class Self, class F>
  static void visit_impl(Self& self, F& f) {
    for (int i = 0; i < 3; ++i) {
      const std::string p = "conv" + std::to_string(i);
      f(p + ".w", self.conv[i].w);
      f(p + ".b", self.conv[i].b);
    }
    f("enrich.w", self.enrich.w);
    f("enrich.b", self.enrich.b);
    f("proj.w", self.proj.w);
    f("proj.b", self.proj.b);
    f("pos", self.pos);
    for (size_t i = 0; i < self.blocks.size(); ++i) {
      auto& blk = self.blocks[i];
      const std::string p = "block" + std::to_string(i);
      f(p + ".ln1.gamma", blk.ln1.gamma);
      f(p + ".ln1.beta", blk.ln1.beta);
      f(p + ".wq.w", blk.wq.w);
      f(p + ".wq.b", blk.wq.b);
      f(p + ".wk.w", blk.wk.w);
      f(p + ".wk.b", blk.wk.b);
      f(p + ".wv.w", blk.wv.w);
      f(p + ".wv.b", blk.wv.b);
      f(p + ".wo.w", blk.wo.w);
      f(p + ".wo.b", blk.wo.b);
      f(p + ".ln2.gamma", blk.ln2.gamma);
      f(p + ".ln2.beta", blk.ln2.beta);
      f(p + ".ff1.w", blk.ff1.w);
      f(p + ".ff1.b", blk.ff1.b);
      f(p + ".ff2.w", blk.ff2.w);
      f(p + ".ff2.b", blk.ff2.b);
    }
    f("ln_final.gamma", self.ln_final.gamma);
    f("ln_final.beta", self.ln_final.beta);
    f("pool_w", self.pool_w);
    f("head.w", self.head.w);
    f("head.b", self.head.b);
  }
};

/// Allocates all tensors with the right shapes, zero-filled.
template <class T>
ModelParams<T> make_params(const ModelConfig& config);

/// Scaled-uniform fan-in initialization, zero biases, unit layer-norm gains.
template <class T>
ModelParams<T> init_params(const ModelConfig& config, uint64_t seed);

template <class T>
template <class U>
ModelParams<U> ModelParams<T>::cast() const {
  ModelParams<U> out;
  auto cv = [](const auto& src, auto& dst) { dst = src.template cast<U>(); };
  auto lin = [&](const Linear<T>& src, Linear<U>& dst) {
    cv(src.w, dst.w);
    cv(src.b, dst.b);
  };
  auto ln = [&](const LayerNormP<T>& src, LayerNormP<U>& dst) {
    cv(src.gamma, dst.gamma);
    cv(src.beta, dst.beta);
  };
  for (int i = 0; i < 3; ++i) {
    cv(conv[i].w, out.conv[i].w);
    cv(conv[i].b, out.conv[i].b);
  }
  cv(enrich.w, out.enrich.w);
  cv(enrich.b, out.enrich.b);
  lin(proj, out.proj);
  cv(pos, out.pos);
  out.blocks.resize(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    ln(blocks[i].ln1, out.blocks[i].ln1);
    lin(blocks[i].wq, out.blocks[i].wq);
    lin(blocks[i].wk, out.blocks[i].wk);
    lin(blocks[i].wv, out.blocks[i].wv);
    lin(blocks[i].wo, out.blocks[i].wo);
    ln(blocks[i].ln2, out.blocks[i].ln2);
    lin(blocks[i].ff1, out.blocks[i].ff1);
    lin(blocks[i].ff2, out.blocks[i].ff2);
  }
  ln(ln_final, out.ln_final);
  cv(pool_w, out.pool_w);
  lin(head, out.head);
  return out;
}

// ---------------------------------------------------------------------------
// Activation

template <class T>
inline T gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(M_SQRT1_2)));
}

template <class T>
inline T gelu_grad(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x * T(M_SQRT1_2)));
  const T pdf = std::exp(T(-0.5) * x * x) * T(0.3989422804014327);
  return cdf + x * pdf;
}

// ---------------------------------------------------------------------------
// Forward trace (per sample)

template <class T>
struct BlockTrace {
  MatT<T> in;                  // block input, m x d
  MatT<T> n1;                  // ln1(in)
  VecT<T> mu1, rstd1;          // per-row layer-norm stats
  MatT<T> q, k, v;             // m x d
  std::vector<MatT<T>> attn;   // per-head m x m row-stochastic weights
  MatT<T> att_concat;          // m x d, heads re-assembled
  MatT<T> att_out;             // after wo
  MatT<T> mid;                 // in + att_out
  MatT<T> n2;
  VecT<T> mu2, rstd2;
  MatT<T> ff_pre;              // m x ff_width
  MatT<T> ff_act;
  MatT<T> out;                 // mid + ff2(ff_act)
};

template <class T>
struct ForwardTrace {
  MatT<T> x;                          // scaled input, n x cin
  std::array<MatT<T>, 3> conv_in;     // input to conv i
  std::array<MatT<T>, 3> conv_pre;    // pre-activation output of conv i
  MatT<T> latent;                     // conv chain output, m x C
  MatT<T> enrich_pre;                 // same-padded conv output, m x C
  MatT<T> enriched;                   // latent + gelu(enrich_pre)
  MatT<T> tokens0;                    // proj(enriched) + pos
  std::vector<BlockTrace<T>> blocks;
  MatT<T> enc_pre_ln;                 // last block output
  MatT<T> enc;                        // final layer norm output
  VecT<T> mu_f, rstd_f;
  VecT<T> pool_scores;                // m, softmax weights
  VecT<T> pooled;                     // d
  VecT<T> output;                     // head output
};

// ---------------------------------------------------------------------------
// Spec operations

/// Strided valid 1-D conv stack with GELU between layers (none after the
/// last). Throws std::invalid_argument when the window is too short.
template <class T>
MatT<T> conv_encode(const ModelConfig& config, const ModelParams<T>& params,
                    const MatT<T>& window);

/// latent + gelu(conv1d_same(latent)); shape preserved.
template <class T>
MatT<T> residual_enrich(const ModelConfig& config, const ModelParams<T>& params,
                        const MatT<T>& latent);

/// Pre-norm 2-layer encoder plus final layer norm. Operates on any token
/// count; positional embeddings are added by forward(), not here.
template <class T>
MatT<T> transformer_encode(const ModelConfig& config, const ModelParams<T>& params,
                           const MatT<T>& tokens,
                           std::vector<BlockTrace<T>>* trace = nullptr);

/// softmax(tokens * w) convex combination of tokens.
template <class T>
VecT<T> attention_pool(const ModelParams<T>& params, const MatT<T>& tokens,
                       VecT<T>* scores = nullptr);

/// Full forward pass; fills `trace` when provided.
template <class T>
VecT<T> forward(const ModelConfig& config, const ModelParams<T>& params,
                const MatT<T>& window, ForwardTrace<T>* trace = nullptr);

// ---------------------------------------------------------------------------
// Losses and gradients

template <class T>
struct TaskTargets {
  HeadKind kind = HeadKind::classify;
  std::vector<int> classes;  // classify: one label per sample
  MatT<T> values;            // regress: batch x head_dim
};

/// Mean loss over the batch: log-sum-exp-stable cross-entropy for
/// classification, componentwise MSE for regression. Throws
/// std::invalid_argument on an empty batch.
template <class T>
T loss_value(const MatT<T>& outputs, const TaskTargets<T>& targets);

/// d loss / d outputs, already scaled by 1/batch.
template <class T>
MatT<T> loss_grad(const MatT<T>& outputs, const TaskTargets<T>& targets);

/// Outputs for a batch of windows, one row per sample.
template <class T>
MatT<T> forward_batch(const ModelConfig& config, const ModelParams<T>& params,
                      const std::vector<const MatT<T>*>& windows);

template <class T>
struct GradResult {
  T loss{};
  ModelParams<T> grads;
};

/// Exact reverse-mode gradients of the mean batch loss with respect to every
/// parameter tensor.
template <class T>
GradResult<T> loss_and_gradient(const ModelConfig& config,
                                const ModelParams<T>& params,
                                const std::vector<const MatT<T>*>& windows,
                                const TaskTargets<T>& targets);

/// Backward pass for a single sample; accumulates into `grads` (which must
/// have the model's shapes). d_output is the gradient at the head output.
template <class T>
void backward(const ModelConfig& config, const ModelParams<T>& params,
              const ForwardTrace<T>& trace, const VecT<T>& d_output,
              ModelParams<T>& grads);

}  // namespace micarray::nn

#include "micarray/model_impl.hpp"
