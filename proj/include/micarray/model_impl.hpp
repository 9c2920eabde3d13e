// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

namespace micarray::nn {

namespace detail {

inline constexpr double kLayerNormEps = 1e-5;

template <class T>
void check_finite(const MatT<T>& m, const char* stage) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite values after ") + stage);
  }
}

// im2col for a valid strided 1-D convolution over rows (time).
// col(t, r*cin + c) = x(t*stride + r, c).
template <class T>
MatT<T> im2col(const MatT<T>& x, int kernel, int stride) {
  const int cin = static_cast<int>(x.cols());
  const int m = static_cast<int>((x.rows() - kernel) / stride + 1);
  MatT<T> col(m, kernel * cin);
  for (int t = 0; t < m; ++t) {
    for (int r = 0; r < kernel; ++r) {
      col.block(t, r * cin, 1, cin) = x.row(t * stride + r);
    }
  }
  return col;
}

// Scatter-add of the im2col gradient back onto the input rows.
template <class T>
void col2im_add(const MatT<T>& d_col, int kernel, int stride, MatT<T>& d_x) {
  const int cin = static_cast<int>(d_x.cols());
  for (int t = 0; t < d_col.rows(); ++t) {
    for (int r = 0; r < kernel; ++r) {
      d_x.row(t * stride + r) += d_col.block(t, r * cin, 1, cin);
    }
  }
}

template <class T>
MatT<T> linear_fwd(const MatT<T>& x, const Linear<T>& lin) {
  MatT<T> y = x * lin.w;
  y.rowwise() += lin.b.transpose();
  return y;
}

// dX returned; dW/db accumulated.
template <class T>
MatT<T> linear_bwd(const MatT<T>& x, const Linear<T>& lin, const MatT<T>& d_y,
                   Linear<T>& d_lin) {
  d_lin.w.noalias() += x.transpose() * d_y;
  d_lin.b.noalias() += d_y.colwise().sum().transpose();
  return d_y * lin.w.transpose();
}

template <class T>
MatT<T> layernorm_fwd(const MatT<T>& x, const LayerNormP<T>& ln, VecT<T>& mu,
                      VecT<T>& rstd) {
  const int m = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  mu.resize(m);
  rstd.resize(m);
  MatT<T> y(m, d);
  for (int i = 0; i < m; ++i) {
    const T mean = x.row(i).mean();
    const T var = (x.row(i).array() - mean).square().mean();
    const T r = T(1) / std::sqrt(var + T(kLayerNormEps));
    mu(i) = mean;
    rstd(i) = r;
    y.row(i) = (((x.row(i).array() - mean) * r) * ln.gamma.transpose().array() +
                ln.beta.transpose().array())
                   .matrix();
  }
  return y;
}

template <class T>
MatT<T> layernorm_bwd(const MatT<T>& x, const LayerNormP<T>& ln,
                      const VecT<T>& mu, const VecT<T>& rstd,
                      const MatT<T>& d_y, LayerNormP<T>& d_ln) {
  const int m = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  MatT<T> d_x(m, d);
  for (int i = 0; i < m; ++i) {
    const auto xc = (x.row(i).array() - mu(i)).eval();      // x - mean
    const auto xhat = (xc * rstd(i)).eval();
    d_ln.gamma.array() += (d_y.row(i).transpose().array() * xhat.transpose());
    d_ln.beta += d_y.row(i).transpose();
    const auto d_xhat = (d_y.row(i).array() * ln.gamma.transpose().array()).eval();
    const T mean_dxhat = d_xhat.mean();
    const T mean_dxhat_xhat = (d_xhat * xhat).mean();
    d_x.row(i) =
        ((d_xhat - mean_dxhat - xhat * mean_dxhat_xhat) * rstd(i)).matrix();
  }
  (void)d;
  return d_x;
}

template <class T>
VecT<T> softmax(const VecT<T>& z) {
  const T zmax = z.maxCoeff();
  VecT<T> e = (z.array() - zmax).exp();
  return e / e.sum();
}

// Row-wise softmax backward: d_z = p .* (d_p - rowsum(d_p .* p)).
template <class T>
MatT<T> softmax_rows_bwd(const MatT<T>& p, const MatT<T>& d_p) {
  MatT<T> d_z(p.rows(), p.cols());
  for (int i = 0; i < p.rows(); ++i) {
    const T dot = p.row(i).dot(d_p.row(i));
    d_z.row(i) = (p.row(i).array() * (d_p.row(i).array() - dot)).matrix();
  }
  return d_z;
}

}  // namespace detail

inline int ModelConfig::token_len_for(int n) const {
  int len = n;
  for (int i = 0; i < 3; ++i) {
    len = (len - conv_kernels[i]) / conv_strides[i] + 1;
    if (len < 1) {
      throw std::invalid_argument(
          "window of " + std::to_string(n) +
          " samples is too short for the conv chain (layer " +
          std::to_string(i) + ")");
    }
  }
  return len;
}

inline void ModelConfig::validate() const {
  if (d_model % n_heads != 0) {
    throw std::invalid_argument("d_model must be divisible by n_heads");
  }
  for (int s : conv_strides) {
    if (s < 1) throw std::invalid_argument("conv strides must be >= 1");
  }
  if (enrich_kernel % 2 != 1) {
    throw std::invalid_argument("enrich kernel must be odd");
  }
  token_len();  // throws when the window is too short
}

template <class T>
ModelParams<T> make_params(const ModelConfig& config) {
  ModelParams<T> p;
  const int c = config.latent_channels;
  int cin = config.in_channels;
  for (int i = 0; i < 3; ++i) {
    p.conv[i].w = MatT<T>::Zero(config.conv_kernels[i] * cin, c);
    p.conv[i].b = VecT<T>::Zero(c);
    cin = c;
  }
  p.enrich.w = MatT<T>::Zero(config.enrich_kernel * c, c);
  p.enrich.b = VecT<T>::Zero(c);
  p.proj.w = MatT<T>::Zero(c, config.d_model);
  p.proj.b = VecT<T>::Zero(config.d_model);
  p.pos = MatT<T>::Zero(config.token_len(), config.d_model);
  p.blocks.resize(config.n_layers);
  for (auto& blk : p.blocks) {
    blk.ln1.gamma = VecT<T>::Zero(config.d_model);
    blk.ln1.beta = VecT<T>::Zero(config.d_model);
    for (Linear<T>* lin : {&blk.wq, &blk.wk, &blk.wv, &blk.wo}) {
      lin->w = MatT<T>::Zero(config.d_model, config.d_model);
      lin->b = VecT<T>::Zero(config.d_model);
    }
    blk.ln2.gamma = VecT<T>::Zero(config.d_model);
    blk.ln2.beta = VecT<T>::Zero(config.d_model);
    blk.ff1.w = MatT<T>::Zero(config.d_model, config.ff_width);
    blk.ff1.b = VecT<T>::Zero(config.ff_width);
    blk.ff2.w = MatT<T>::Zero(config.ff_width, config.d_model);
    blk.ff2.b = VecT<T>::Zero(config.d_model);
  }
  p.ln_final.gamma = VecT<T>::Zero(config.d_model);
  p.ln_final.beta = VecT<T>::Zero(config.d_model);
  p.pool_w = VecT<T>::Zero(config.d_model);
  p.head.w = MatT<T>::Zero(config.d_model, config.head_dim());
  p.head.b = VecT<T>::Zero(config.head_dim());
  return p;
}

template <class T>
ModelParams<T> init_params(const ModelConfig& config, uint64_t seed) {
  config.validate();
  ModelParams<T> p = make_params<T>(config);
  const Rng root(seed);
  uint64_t stream = 0;
  p.for_each_tensor([&](const std::string& name, auto& tensor) {
    Rng rng = root.stream(stream++);
    const bool is_gamma = name.find("gamma") != std::string::npos;
    const bool is_bias = name.size() > 2 && name.substr(name.size() - 2) == ".b";
    const bool is_beta = name.find("beta") != std::string::npos;
    if (is_gamma) {
      tensor.setOnes();
    } else if (is_bias || is_beta) {
      tensor.setZero();
    } else if (name == "pos") {
      for (Eigen::Index i = 0; i < tensor.size(); ++i) {
        tensor.data()[i] = static_cast<T>(rng.uniform(-0.02, 0.02));
      }
    } else {
      // Scaled-uniform fan-in over the input dimension (rows for matrices,
      // length for the pooling vector).
      const double fan_in = tensor.cols() == 1
                                ? static_cast<double>(tensor.rows())
                                : static_cast<double>(tensor.rows());
      const double bound = 1.0 / std::sqrt(fan_in);
      for (Eigen::Index i = 0; i < tensor.size(); ++i) {
        tensor.data()[i] = static_cast<T>(rng.uniform(-bound, bound));
      }
    }
  });
  return p;
}

template <class T>
MatT<T> conv_encode(const ModelConfig& config, const ModelParams<T>& params,
                    const MatT<T>& window, ForwardTrace<T>* trace) {
  if (window.cols() != config.in_channels) {
    throw std::invalid_argument("conv_encode: wrong channel count");
  }
  config.token_len_for(static_cast<int>(window.rows()));  // throws when short
  MatT<T> x = window * static_cast<T>(config.input_scale);
  if (trace) trace->x = x;
  for (int i = 0; i < 3; ++i) {
    if (trace) trace->conv_in[i] = x;
    MatT<T> col = detail::im2col(x, config.conv_kernels[i], config.conv_strides[i]);
    MatT<T> z = col * params.conv[i].w;
    z.rowwise() += params.conv[i].b.transpose();
    detail::check_finite(z, "conv");
    if (trace) trace->conv_pre[i] = z;
    if (i < 2) {
      x = z.unaryExpr([](T v) { return gelu(v); });
    } else {
      x = std::move(z);
    }
  }
  if (trace) trace->latent = x;
  return x;
}

template <class T>
MatT<T> conv_encode(const ModelConfig& config, const ModelParams<T>& params,
                    const MatT<T>& window) {
  return conv_encode(config, params, window, static_cast<ForwardTrace<T>*>(nullptr));
}

template <class T>
MatT<T> residual_enrich(const ModelConfig& config, const ModelParams<T>& params,
                        const MatT<T>& latent, ForwardTrace<T>* trace) {
  const int pad = config.enrich_kernel / 2;
  MatT<T> padded = MatT<T>::Zero(latent.rows() + 2 * pad, latent.cols());
  padded.middleRows(pad, latent.rows()) = latent;
  MatT<T> col = detail::im2col(padded, config.enrich_kernel, 1);
  MatT<T> z = col * params.enrich.w;
  z.rowwise() += params.enrich.b.transpose();
  detail::check_finite(z, "residual enrichment conv");
  if (trace) trace->enrich_pre = z;
  MatT<T> out = latent + z.unaryExpr([](T v) { return gelu(v); });
  if (trace) trace->enriched = out;
  return out;
}

template <class T>
MatT<T> residual_enrich(const ModelConfig& config, const ModelParams<T>& params,
                        const MatT<T>& latent) {
  return residual_enrich(config, params, latent,
                         static_cast<ForwardTrace<T>*>(nullptr));
}

template <class T>
MatT<T> transformer_encode(const ModelConfig& config, const ModelParams<T>& params,
                           const MatT<T>& tokens,
                           std::vector<BlockTrace<T>>* trace) {
  const int d = config.d_model;
  const int h = config.n_heads;
  const int dh = d / h;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  if (tokens.cols() != d) {
    throw std::invalid_argument("transformer_encode: tokens must be m x d_model");
  }
  const int m = static_cast<int>(tokens.rows());
  if (m < 1) throw std::invalid_argument("transformer_encode: empty token set");

  if (trace) trace->resize(params.blocks.size());
  MatT<T> x = tokens;
  for (size_t li = 0; li < params.blocks.size(); ++li) {
    const Block<T>& blk = params.blocks[li];
    BlockTrace<T> local;
    BlockTrace<T>& bt = trace ? (*trace)[li] : local;
    bt.in = x;
    bt.n1 = detail::layernorm_fwd(x, blk.ln1, bt.mu1, bt.rstd1);
    bt.q = detail::linear_fwd(bt.n1, blk.wq);
    bt.k = detail::linear_fwd(bt.n1, blk.wk);
    bt.v = detail::linear_fwd(bt.n1, blk.wv);
    bt.attn.resize(h);
    bt.att_concat.resize(m, d);
    for (int head = 0; head < h; ++head) {
      const auto qh = bt.q.middleCols(head * dh, dh);
      const auto kh = bt.k.middleCols(head * dh, dh);
      const auto vh = bt.v.middleCols(head * dh, dh);
      MatT<T> scores = qh * kh.transpose() * scale;
      MatT<T>& p = bt.attn[head];
      p.resize(m, m);
      for (int i = 0; i < m; ++i) {
        p.row(i) = detail::softmax<T>(scores.row(i).transpose()).transpose();
      }
      bt.att_concat.middleCols(head * dh, dh) = p * vh;
    }
    bt.att_out = detail::linear_fwd(bt.att_concat, blk.wo);
    detail::check_finite(bt.att_out, "attention");
    bt.mid = bt.in + bt.att_out;
    bt.n2 = detail::layernorm_fwd(bt.mid, blk.ln2, bt.mu2, bt.rstd2);
    bt.ff_pre = detail::linear_fwd(bt.n2, blk.ff1);
    bt.ff_act = bt.ff_pre.unaryExpr([](T v) { return gelu(v); });
    bt.out = bt.mid + detail::linear_fwd(bt.ff_act, blk.ff2);
    detail::check_finite(bt.out, "feed-forward");
    x = bt.out;
  }
  return x;
}

template <class T>
VecT<T> attention_pool(const ModelParams<T>& params, const MatT<T>& tokens,
                       VecT<T>* scores) {
  if (tokens.rows() < 1) {
    throw std::invalid_argument("attention_pool: empty token set");
  }
  const VecT<T> z = tokens * params.pool_w;
  const VecT<T> s = detail::softmax<T>(z);
  if (scores) *scores = s;
  return tokens.transpose() * s;
}

template <class T>
VecT<T> forward(const ModelConfig& config, const ModelParams<T>& params,
                const MatT<T>& window, ForwardTrace<T>* trace) {
  if (window.rows() != config.window_len) {
    throw std::invalid_argument(
        "forward: window length " + std::to_string(window.rows()) +
        " does not match config window_len " + std::to_string(config.window_len));
  }
  ForwardTrace<T> local;
  ForwardTrace<T>& tr = trace ? *trace : local;

  const MatT<T> latent = conv_encode(config, params, window, &tr);
  const MatT<T> enriched = residual_enrich(config, params, latent, &tr);
  tr.tokens0 = detail::linear_fwd(enriched, params.proj) + params.pos;
  tr.enc_pre_ln = transformer_encode(config, params, tr.tokens0, &tr.blocks);
  tr.enc = detail::layernorm_fwd(tr.enc_pre_ln, params.ln_final, tr.mu_f, tr.rstd_f);
  tr.pooled = attention_pool(params, tr.enc, &tr.pool_scores);
  tr.output = params.head.w.transpose() * tr.pooled + params.head.b;
  if (!tr.output.allFinite()) throw NumericError("non-finite values after head");
  return tr.output;
}

template <class T>
void backward(const ModelConfig& config, const ModelParams<T>& params,
              const ForwardTrace<T>& trace, const VecT<T>& d_output,
              ModelParams<T>& grads) {
  const int d = config.d_model;
  const int h = config.n_heads;
  const int dh = d / h;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  const int m = static_cast<int>(trace.enc.rows());

  // Head.
  grads.head.w.noalias() += trace.pooled * d_output.transpose();
  grads.head.b += d_output;
  const VecT<T> d_pooled = params.head.w * d_output;

  // Attention pooling: pooled = enc^T s, s = softmax(enc pool_w).
  MatT<T> d_enc = trace.pool_scores * d_pooled.transpose();  // m x d
  const VecT<T> ds = trace.enc * d_pooled;
  const T dot = trace.pool_scores.dot(ds);
  const VecT<T> dz =
      (trace.pool_scores.array() * (ds.array() - dot)).matrix();
  grads.pool_w.noalias() += trace.enc.transpose() * dz;
  d_enc.noalias() += dz * params.pool_w.transpose();

  // Final layer norm.
  MatT<T> d_x = detail::layernorm_bwd(trace.enc_pre_ln, params.ln_final,
                                      trace.mu_f, trace.rstd_f, d_enc,
                                      grads.ln_final);

  // Transformer blocks, reversed.
  for (int li = static_cast<int>(params.blocks.size()) - 1; li >= 0; --li) {
    const Block<T>& blk = params.blocks[li];
    Block<T>& gblk = grads.blocks[li];
    const BlockTrace<T>& bt = trace.blocks[li];

    // out = mid + ff2(gelu(ff1(n2)))
    MatT<T> d_mid = d_x;
    MatT<T> d_ff_act = detail::linear_bwd(bt.ff_act, blk.ff2, d_x, gblk.ff2);
    MatT<T> d_ff_pre =
        (d_ff_act.array() * bt.ff_pre.unaryExpr([](T v) { return gelu_grad(v); }).array())
            .matrix();
    MatT<T> d_n2 = detail::linear_bwd(bt.n2, blk.ff1, d_ff_pre, gblk.ff1);
    d_mid += detail::layernorm_bwd(bt.mid, blk.ln2, bt.mu2, bt.rstd2, d_n2,
                                   gblk.ln2);

    // mid = in + wo(att_concat)
    MatT<T> d_in = d_mid;
    MatT<T> d_att_concat =
        detail::linear_bwd(bt.att_concat, blk.wo, d_mid, gblk.wo);

    MatT<T> d_q = MatT<T>::Zero(m, d);
    MatT<T> d_k = MatT<T>::Zero(m, d);
    MatT<T> d_v = MatT<T>::Zero(m, d);
    for (int head = 0; head < h; ++head) {
      const auto qh = bt.q.middleCols(head * dh, dh);
      const auto kh = bt.k.middleCols(head * dh, dh);
      const auto vh = bt.v.middleCols(head * dh, dh);
      const MatT<T>& p = bt.attn[head];
      const auto d_oh = d_att_concat.middleCols(head * dh, dh);
      const MatT<T> d_p = d_oh * vh.transpose();
      d_v.middleCols(head * dh, dh).noalias() += p.transpose() * d_oh;
      const MatT<T> d_s = detail::softmax_rows_bwd(p, d_p) * scale;
      d_q.middleCols(head * dh, dh).noalias() += d_s * kh;
      d_k.middleCols(head * dh, dh).noalias() += d_s.transpose() * qh;
    }
    MatT<T> d_n1 = detail::linear_bwd(bt.n1, blk.wq, d_q, gblk.wq);
    d_n1 += detail::linear_bwd(bt.n1, blk.wk, d_k, gblk.wk);
    d_n1 += detail::linear_bwd(bt.n1, blk.wv, d_v, gblk.wv);
    d_in += detail::layernorm_bwd(bt.in, blk.ln1, bt.mu1, bt.rstd1, d_n1,
                                  gblk.ln1);
    d_x = std::move(d_in);
  }

  // tokens0 = proj(enriched) + pos
  grads.pos += d_x;
  MatT<T> d_enriched = detail::linear_bwd(trace.enriched, params.proj, d_x, grads.proj);

  // enriched = latent + gelu(enrich_conv(latent))
  MatT<T> d_latent = d_enriched;
  {
    const int pad = config.enrich_kernel / 2;
    MatT<T> d_z =
        (d_enriched.array() *
         trace.enrich_pre.unaryExpr([](T v) { return gelu_grad(v); }).array())
            .matrix();
    MatT<T> padded = MatT<T>::Zero(trace.latent.rows() + 2 * pad, trace.latent.cols());
    padded.middleRows(pad, trace.latent.rows()) = trace.latent;
    const MatT<T> col = detail::im2col(padded, config.enrich_kernel, 1);
    grads.enrich.w.noalias() += col.transpose() * d_z;
    grads.enrich.b += d_z.colwise().sum().transpose();
    const MatT<T> d_col = d_z * params.enrich.w.transpose();
    MatT<T> d_padded = MatT<T>::Zero(padded.rows(), padded.cols());
    detail::col2im_add(d_col, config.enrich_kernel, 1, d_padded);
    d_latent += d_padded.middleRows(pad, trace.latent.rows());
  }

  // Conv chain, reversed. conv_in[i] holds the input of layer i.
  MatT<T> d_out = std::move(d_latent);
  for (int i = 2; i >= 0; --i) {
    MatT<T> d_z;
    if (i < 2) {
      // GELU was applied to conv_pre[i] to make conv_in[i + 1].
      d_z = (d_out.array() *
             trace.conv_pre[i].unaryExpr([](T v) { return gelu_grad(v); }).array())
                .matrix();
    } else {
      d_z = std::move(d_out);
    }
    const MatT<T> col =
        detail::im2col(trace.conv_in[i], config.conv_kernels[i], config.conv_strides[i]);
    grads.conv[i].w.noalias() += col.transpose() * d_z;
    grads.conv[i].b += d_z.colwise().sum().transpose();
    const MatT<T> d_col = d_z * params.conv[i].w.transpose();
    MatT<T> d_x_conv = MatT<T>::Zero(trace.conv_in[i].rows(), trace.conv_in[i].cols());
    detail::col2im_add(d_col, config.conv_kernels[i], config.conv_strides[i], d_x_conv);
    d_out = std::move(d_x_conv);
  }
  // d_out now holds the gradient at the scaled input; nothing learnable below.
}

template <class T>
T loss_value(const MatT<T>& outputs, const TaskTargets<T>& targets) {
  const int b = static_cast<int>(outputs.rows());
  if (b == 0) throw std::invalid_argument("loss over an empty batch");
  T total = T(0);
  if (targets.kind == HeadKind::classify) {
    for (int i = 0; i < b; ++i) {
      const VecT<T> logits = outputs.row(i).transpose();
      const T zmax = logits.maxCoeff();
      const T lse = zmax + std::log((logits.array() - zmax).exp().sum());
      total += lse - logits(targets.classes[i]);
    }
  } else {
    for (int i = 0; i < b; ++i) {
      total += (outputs.row(i) - targets.values.row(i)).array().square().mean();
    }
  }
  return total / static_cast<T>(b);
}

template <class T>
MatT<T> loss_grad(const MatT<T>& outputs, const TaskTargets<T>& targets) {
  const int b = static_cast<int>(outputs.rows());
  if (b == 0) throw std::invalid_argument("loss over an empty batch");
  MatT<T> d(outputs.rows(), outputs.cols());
  const T inv_b = T(1) / static_cast<T>(b);
  if (targets.kind == HeadKind::classify) {
    for (int i = 0; i < b; ++i) {
      const VecT<T> p = detail::softmax<T>(outputs.row(i).transpose());
      d.row(i) = p.transpose() * inv_b;
      d(i, targets.classes[i]) -= inv_b;
    }
  } else {
    const T k = static_cast<T>(outputs.cols());
    d = (outputs - targets.values) * (T(2) * inv_b / k);
  }
  return d;
}

namespace detail {

// Runs fn(i) for i in [0, n) across threads, collecting the first exception.
// Results must be written to per-index slots so that any later reduction is
// independent of the thread schedule.
template <class F>
void parallel_for(int n, F&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

template <class T>
MatT<T> forward_batch(const ModelConfig& config, const ModelParams<T>& params,
                      const std::vector<const MatT<T>*>& windows) {
  MatT<T> out(windows.size(), config.head_dim());
  detail::parallel_for(static_cast<int>(windows.size()), [&](int i) {
    out.row(i) = forward(config, params, *windows[i]).transpose();
  });
  return out;
}

template <class T>
GradResult<T> loss_and_gradient(const ModelConfig& config,
                                const ModelParams<T>& params,
                                const std::vector<const MatT<T>*>& windows,
                                const TaskTargets<T>& targets) {
  const int b = static_cast<int>(windows.size());
  if (b == 0) throw std::invalid_argument("gradient over an empty batch");

  MatT<T> outputs(b, config.head_dim());
  std::vector<ForwardTrace<T>> traces(b);
  detail::parallel_for(b, [&](int i) {
    outputs.row(i) = forward(config, params, *windows[i], &traces[i]).transpose();
  });

  GradResult<T> result;
  result.loss = loss_value(outputs, targets);
  const MatT<T> d_out = loss_grad(outputs, targets);

  // Per-sample gradient buffers reduced in sample order: the result is
  // bit-identical regardless of thread count.
  std::vector<ModelParams<T>> sample_grads(b);
  detail::parallel_for(b, [&](int i) {
    sample_grads[i] = make_params<T>(config);
    backward(config, params, traces[i], VecT<T>(d_out.row(i).transpose()),
             sample_grads[i]);
  });
  result.grads = make_params<T>(config);
  for (int i = 0; i < b; ++i) {
    result.grads.add_scaled(sample_grads[i], T(1));
  }
  return result;
}

}  // namespace micarray::nn
