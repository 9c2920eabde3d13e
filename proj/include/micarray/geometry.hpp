// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "micarray/common.hpp"

namespace micarray {

struct LayoutConfig {
  double inner_side_mm = 8.0;    // side of the inner microphone square
  double outer_offset_mm = 9.0;  // distance from each outer mic to its nearest inner mic
  double area_mm = 24.0;         // square sensing area side length
  double receptive_decay_mm = 2.0;
};

/// Planar microphone array: 10 microphones inside a square sensing area
/// centered on the origin. Indices 0-3 are the inner square
/// (SW, SE, NE, NW); 4-9 are the outer ring.
struct SensorLayout {
  std::array<Vec2, kNumMics> mic_positions;  // mm
  double area_mm = 24.0;
  double receptive_decay_mm = 2.0;

  double half_extent() const { return area_mm / 2.0; }

  bool contains(const Vec2& p, double tol = 1e-9) const {
    const double h = half_extent() + tol;
    return std::abs(p.x()) <= h && std::abs(p.y()) <= h;
  }

  /// Index of the microphone closest to p (lowest index wins ties).
  int nearest_mic(const Vec2& p) const;
};

/// Builds the 4 + 6 layout deterministically from the config. Throws
/// std::invalid_argument when the requested geometry does not fit inside the
/// sensing area or the offset constraint cannot be met.
SensorLayout build_layout(const LayoutConfig& config = {});

}  // namespace micarray
