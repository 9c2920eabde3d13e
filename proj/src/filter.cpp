// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/filter.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace micarray::dsp {

namespace {

using cplx = std::complex<double>;

// Expands a polynomial from its roots; returns real coefficients, highest
// degree first, leading coefficient 1.
std::vector<double> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> coeffs{cplx(1.0, 0.0)};
  for (const cplx& r : roots) {
    std::vector<cplx> next(coeffs.size() + 1, cplx(0.0, 0.0));
    for (size_t i = 0; i < coeffs.size(); ++i) {
      next[i] += coeffs[i];
      next[i + 1] -= coeffs[i] * r;
    }
    coeffs = std::move(next);
  }
  std::vector<double> out(coeffs.size());
  for (size_t i = 0; i < coeffs.size(); ++i) out[i] = coeffs[i].real();
  return out;
}

}  // namespace

IirCoeffs butter_highpass(int order, double cutoff_hz, double sample_rate_hz) {
  if (order < 1) throw std::invalid_argument("filter order must be >= 1");
  if (cutoff_hz <= 0 || cutoff_hz >= sample_rate_hz / 2) {
    throw std::invalid_argument("cutoff must lie in (0, fs/2)");
  }

  // Analog low-pass prototype poles on the unit circle, left half plane.
  std::vector<cplx> poles(order);
  for (int k = 0; k < order; ++k) {
    const double theta = M_PI * (2.0 * k + order + 1.0) / (2.0 * order);
    poles[k] = std::exp(cplx(0.0, theta));
  }

  // Pre-warped analog cutoff so the bilinear transform maps it exactly.
  const double fs2 = 2.0 * sample_rate_hz;
  const double warped = fs2 * std::tan(M_PI * cutoff_hz / sample_rate_hz);

  // Low-pass to high-pass: poles -> wc / p, zeros -> n zeros at s = 0.
  // The prototype gain is prod(-p) = 1, and the transform leaves the
  // high-frequency gain at 1.
  std::vector<cplx> hp_poles(order);
  for (int k = 0; k < order; ++k) hp_poles[k] = warped / poles[k];
  std::vector<cplx> hp_zeros(order, cplx(0.0, 0.0));

  // Bilinear transform of zeros, poles, and gain.
  std::vector<cplx> z_d(order), p_d(order);
  cplx num(1.0, 0.0), den(1.0, 0.0);
  for (int k = 0; k < order; ++k) {
    z_d[k] = (fs2 + hp_zeros[k]) / (fs2 - hp_zeros[k]);
    p_d[k] = (fs2 + hp_poles[k]) / (fs2 - hp_poles[k]);
    num *= fs2 - hp_zeros[k];
    den *= fs2 - hp_poles[k];
  }
  const double gain = (num / den).real();

  IirCoeffs c;
  c.b = poly_from_roots(z_d);
  for (double& v : c.b) v *= gain;
  c.a = poly_from_roots(p_d);
  return c;
}

std::vector<double> lfilter(const IirCoeffs& c, const std::vector<double>& x,
                            const std::vector<double>& zi) {
  const size_t nt = c.a.size();
  if (c.b.size() != nt) throw std::invalid_argument("b/a size mismatch");
  std::vector<double> state(nt - 1, 0.0);
  if (!zi.empty()) {
    if (zi.size() != nt - 1) throw std::invalid_argument("bad zi length");
    state = zi;
  }
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = c.b[0] * xi + state[0];
    for (size_t j = 0; j + 1 < state.size(); ++j) {
      state[j] = c.b[j + 1] * xi - c.a[j + 1] * yi + state[j + 1];
    }
    state.back() = c.b[nt - 1] * xi - c.a[nt - 1] * yi;
    y[i] = yi;
  }
  return y;
}

std::vector<double> lfilter_zi(const IirCoeffs& c) {
  const int n = static_cast<int>(c.a.size()) - 1;
  // Solve (I - A^T) zi = B for the transposed direct-form-II state such
  // that a unit-step input produces the steady-state output from sample 0.
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, 0) += c.a[i + 1];  // companion first column
    if (i + 1 < n) m(i, i + 1) -= 1.0;
  }
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = c.b[i + 1] - c.a[i + 1] * c.b[0];
  const Eigen::VectorXd zi = m.partialPivLu().solve(rhs);
  return std::vector<double>(zi.data(), zi.data() + n);
}

std::vector<double> filtfilt(const IirCoeffs& c, const std::vector<double>& x) {
  const int pad = 3 * static_cast<int>(c.a.size());
  const int n = static_cast<int>(x.size());
  if (n <= pad) {
    throw std::invalid_argument(
        "filtfilt: input must be longer than the edge padding (" +
        std::to_string(pad) + " samples)");
  }

  // Odd reflection about the first and last samples.
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (int i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (int i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const std::vector<double> zi = lfilter_zi(c);
  auto scaled = [&zi](double v) {
    std::vector<double> s(zi.size());
    for (size_t i = 0; i < zi.size(); ++i) s[i] = zi[i] * v;
    return s;
  };

  std::vector<double> y = lfilter(c, ext, scaled(ext.front()));
  std::reverse(y.begin(), y.end());
  y = lfilter(c, y, scaled(y.front()));
  std::reverse(y.begin(), y.end());

  return std::vector<double>(y.begin() + pad, y.begin() + pad + n);
}

Mat filtfilt(const IirCoeffs& c, const Mat& x) {
  Mat out(x.rows(), x.cols());
  std::vector<double> col(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::VectorXd::Map(col.data(), x.rows()) = x.col(j);
    const std::vector<double> f = filtfilt(c, col);
    out.col(j) = Eigen::VectorXd::Map(f.data(), x.rows());
  }
  return out;
}

double butter_highpass_mag2(int order, double cutoff_hz, double f_hz) {
  return 1.0 / (1.0 + std::pow(cutoff_hz / f_hz, 2.0 * order));
}

}  // namespace micarray::dsp
