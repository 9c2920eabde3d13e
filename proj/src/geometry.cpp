// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace micarray {

int SensorLayout::nearest_mic(const Vec2& p) const {
  int best = 0;
  double best_d = (mic_positions[0] - p).norm();
  for (int i = 1; i < kNumMics; ++i) {
    const double d = (mic_positions[i] - p).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

SensorLayout build_layout(const LayoutConfig& config) {
  if (config.inner_side_mm <= 0 || config.outer_offset_mm <= 0 ||
      config.area_mm <= 0) {
    throw std::invalid_argument("layout: all lengths must be positive");
  }
  if (config.receptive_decay_mm <= 0) {
    throw std::invalid_argument("layout: receptive_decay_mm must be positive");
  }

  const double s = config.inner_side_mm / 2.0;  // inner half-side
  const double h = config.area_mm / 2.0;        // area half-extent
  const double off = config.outer_offset_mm;

  if (s > h) {
    throw std::invalid_argument(
        "layout: inner square does not fit inside the sensing area");
  }

  // Outer microphones sit on the area border, offset exactly `off` from the
  // nearest inner mic. With g the border-to-inner-column gap, the border
  // placement requires off > g, and the along-border coordinate s + q must
  // stay inside the area.
  const double g = h - s;
  if (off <= g) {
    throw std::invalid_argument(
        "layout: outer offset too small to reach the sensing-area border");
  }
  const double q = std::sqrt(off * off - g * g);
  if (s + q > h + 1e-12) {
    throw std::invalid_argument(
        "layout: outer microphones fall outside the sensing area");
  }

  SensorLayout layout;
  layout.area_mm = config.area_mm;
  layout.receptive_decay_mm = config.receptive_decay_mm;

  // Inner square, counter-clockwise from SW.
  layout.mic_positions[0] = {-s, -s};
  layout.mic_positions[1] = {s, -s};
  layout.mic_positions[2] = {s, s};
  layout.mic_positions[3] = {-s, s};

  // Outer ring: two per vertical border, one on each horizontal border,
  // point-symmetric about the center.
  const double t = s + q;
  layout.mic_positions[4] = {-h, -t};
  layout.mic_positions[5] = {-h, t};
  layout.mic_positions[6] = {h, -t};
  layout.mic_positions[7] = {h, t};
  layout.mic_positions[8] = {t, h};
  layout.mic_positions[9] = {-t, -h};

  for (const auto& p : layout.mic_positions) {
    if (!layout.contains(p)) {
      throw std::invalid_argument(
          "layout: microphone outside the sensing area");
    }
  }
  return layout;
}

}  // namespace micarray
