// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0
//
// The oracle for the digital filter is the squared analog Butterworth
// magnitude |H(f)|^2 = 1 / (1 + (fc/f)^(2n)); bilinear discretization with
// pre-warping matches it closely far from Nyquist.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "micarray/filter.hpp"

using namespace micarray;
using namespace micarray::dsp;

namespace {

constexpr double kFs = 2000.0;
constexpr double kFc = 3.0;

std::vector<double> sine(double freq, int n, double fs = kFs) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(2.0 * M_PI * freq * i / fs);
  return x;
}

// Amplitude of the `freq` component by projection onto the complex
// exponential (exact for integer cycle counts).
double amplitude_at(const std::vector<double>& x, double freq, double fs = kFs) {
  std::complex<double> acc(0.0, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    acc += x[i] * std::exp(std::complex<double>(0.0, -2.0 * M_PI * freq * i / fs));
  }
  return 2.0 * std::abs(acc) / x.size();
}

}  // namespace

TEST_CASE("designed coefficients behave as a third-order high-pass") {
  const IirCoeffs c = butter_highpass(3, kFc, kFs);
  REQUIRE(c.b.size() == 4);
  REQUIRE(c.a.size() == 4);
  CHECK(c.a[0] == doctest::Approx(1.0));
  // H(z=1) = 0 (DC blocked), H(z=-1) ~ 1 (passband).
  const double b_dc = c.b[0] + c.b[1] + c.b[2] + c.b[3];
  CHECK(std::abs(b_dc) < 1e-12);
  const double b_ny = c.b[0] - c.b[1] + c.b[2] - c.b[3];
  const double a_ny = c.a[0] - c.a[1] + c.a[2] - c.a[3];
  CHECK(b_ny / a_ny == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("digital magnitude matches the analog oracle across the band") {
  const IirCoeffs c = butter_highpass(3, kFc, kFs);
  for (const double f : {1.0, 2.0, 3.0, 5.0, 10.0, 50.0, 100.0, 400.0}) {
    const std::complex<double> z =
        std::exp(std::complex<double>(0.0, 2.0 * M_PI * f / kFs));
    std::complex<double> num(0, 0), den(0, 0);
    for (int k = 0; k < 4; ++k) {
      num += c.b[k] * std::pow(z, -k);
      den += c.a[k] * std::pow(z, -k);
    }
    const double mag = std::abs(num / den);
    const double oracle = std::sqrt(butter_highpass_mag2(3, kFc, f));
    CHECK(mag == doctest::Approx(oracle).epsilon(5e-3));
  }
}

TEST_CASE("filtfilt rejects DC to 1e-6 relative") {
  const IirCoeffs c = butter_highpass(3, kFc, kFs);
  const std::vector<double> x(1500, 1241.0);
  const std::vector<double> y = filtfilt(c, x);
  double max_abs = 0.0;
  for (const double v : y) max_abs = std::max(max_abs, std::abs(v));
  CHECK(max_abs <= 1e-6 * 1241.0);
}

TEST_CASE("filtfilt passes 100 Hz within 1 percent of unity") {
  const IirCoeffs c = butter_highpass(3, kFc, kFs);
  const std::vector<double> y = filtfilt(c, sine(100.0, 2000));
  CHECK(amplitude_at(y, 100.0) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("filtfilt attenuates a 1 Hz sine to at most 0.002") {
  // |H(1 Hz)|^2 = 1 / (1 + 3^6) ~ 0.00137. The steady-state amplitude is
  // measured over interior whole cycles, past the edge transients.
  const IirCoeffs c = butter_highpass(3, kFc, kFs);
  const std::vector<double> y = filtfilt(c, sine(1.0, 8000));
  const std::vector<double> interior(y.begin() + 2000, y.begin() + 6000);
  CHECK(amplitude_at(interior, 1.0) <= 0.002);
  CHECK(butter_highpass_mag2(3, kFc, 1.0) == doctest::Approx(1.0 / 730.0));
}

TEST_CASE("zero phase: cross-correlation of passband content peaks at lag 0") {
  const IirCoeffs c = butter_highpass(3, kFc, kFs);
  std::vector<double> x(3000);
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * M_PI * 50.0 * i / kFs) +
           0.5 * std::sin(2.0 * M_PI * 120.0 * i / kFs + 0.7);
  }
  const std::vector<double> y = filtfilt(c, x);
  int best_lag = -999;
  double best = -1e300;
  for (int lag = -20; lag <= 20; ++lag) {
    double acc = 0.0;
    for (int i = 100; i < 2900; ++i) acc += x[i] * y[i + lag];
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 0);
}

TEST_CASE("filtfilt requires more samples than the padding") {
  const IirCoeffs c = butter_highpass(3, kFc, kFs);
  CHECK_THROWS_AS(filtfilt(c, std::vector<double>(12, 0.0)),
                  std::invalid_argument);
  CHECK_NOTHROW(filtfilt(c, std::vector<double>(13, 0.0)));
}

TEST_CASE("lfilter matches a hand-rolled difference equation") {
  IirCoeffs c;
  c.b = {0.5, -0.3, 0.2};
  c.a = {1.0, -0.4, 0.1};
  const std::vector<double> x{1.0, 0.0, 0.0, 2.0, -1.0};
  const std::vector<double> y = lfilter(c, x);
  std::vector<double> ref(x.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    double acc = 0.0;
    for (size_t k = 0; k < c.b.size(); ++k) {
      if (i >= k) acc += c.b[k] * x[i - k];
    }
    for (size_t k = 1; k < c.a.size(); ++k) {
      if (i >= k) acc -= c.a[k] * ref[i - k];
    }
    ref[i] = acc;
  }
  for (size_t i = 0; i < x.size(); ++i) {
    CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("lfilter_zi yields a transient-free step response") {
  const IirCoeffs c = butter_highpass(3, kFc, kFs);
  const std::vector<double> zi = lfilter_zi(c);
  std::vector<double> scaled(zi.size());
  for (size_t i = 0; i < zi.size(); ++i) scaled[i] = 5.0 * zi[i];
  const std::vector<double> y = lfilter(c, std::vector<double>(100, 5.0), scaled);
  // Steady state of a high-pass driven by a constant is ~0 from sample one.
  for (const double v : y) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("matrix filtfilt filters each column independently") {
  const IirCoeffs c = butter_highpass(3, kFc, kFs);
  Mat x(600, 2);
  for (int i = 0; i < 600; ++i) {
    x(i, 0) = std::sin(2.0 * M_PI * 40.0 * i / kFs);
    x(i, 1) = 7.0;
  }
  const Mat y = filtfilt(c, x);
  std::vector<double> col0(600);
  for (int i = 0; i < 600; ++i) col0[i] = x(i, 0);
  const std::vector<double> ref = filtfilt(c, col0);
  for (int i = 0; i < 600; ++i) {
    CHECK(y(i, 0) == doctest::Approx(ref[i]).epsilon(1e-12));
    CHECK(std::abs(y(i, 1)) < 1e-5);
  }
}
