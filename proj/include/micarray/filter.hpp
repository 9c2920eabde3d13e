// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "micarray/common.hpp"

namespace micarray::dsp {

/// Direct-form transfer function coefficients, a[0] normalized to 1.
struct IirCoeffs {
  std::vector<double> b;
  std::vector<double> a;

  int order() const { return static_cast<int>(a.size()) - 1; }
};

/// Digital Butterworth high-pass via the analog prototype, low-pass to
/// high-pass transform, and bilinear transform with frequency pre-warping.
IirCoeffs butter_highpass(int order, double cutoff_hz, double sample_rate_hz);

/// Causal direct-form-II-transposed filter with initial state zi (may be
/// empty for zero initial conditions).
std::vector<double> lfilter(const IirCoeffs& c, const std::vector<double>& x,
                            const std::vector<double>& zi = {});

/// Steady-state initial conditions for a unit step, as used to suppress the
/// startup transient in zero-phase filtering.
std::vector<double> lfilter_zi(const IirCoeffs& c);

/// Zero-phase forward-backward filtering with odd-reflection edge padding of
/// length 3 * (order + 1). Requires x.size() > pad length; throws
/// std::invalid_argument otherwise. The effective magnitude response is
/// |H(f)|^2 and the phase response is identically zero.
std::vector<double> filtfilt(const IirCoeffs& c, const std::vector<double>& x);

/// Column-wise filtfilt over an n-by-k matrix (rows = time).
Mat filtfilt(const IirCoeffs& c, const Mat& x);

/// Squared magnitude of the analog order-n Butterworth high-pass at
/// frequency f: 1 / (1 + (fc/f)^(2n)). Reference response for tests.
double butter_highpass_mag2(int order, double cutoff_hz, double f_hz);

}  // namespace micarray::dsp
