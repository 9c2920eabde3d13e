// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "micarray/common.hpp"
#include "micarray/texture.hpp"

namespace micarray {

enum class EpisodeKind { drag, tap };

std::string to_string(EpisodeKind kind);
EpisodeKind episode_kind_from_string(const std::string& s);

/// Ground-truth bookkeeping the simulator attaches to each episode. Real
/// recordings would not have most of these; evaluation code treats them as
/// oracle data only.
struct SimMeta {
  Vec2 path_start_mm{0, 0};
  Vec2 path_end_mm{0, 0};
  double normal_force_n = 0.0;
  double accel_mm_s2 = 0.0;
  double z_rotation_deg = 0.0;   // recorded but has no signal effect
  int64_t motion_start_index = 0;
  int64_t motion_end_index = 0;
  // Tap-only fields.
  Vec2 tap_location_mm{0, 0};
  double contact_time_s = -1.0;  // ground-truth contact onset, -1 for drags
  double approach_velocity_mm_s = 0.0;
  double plateau_force_n = 0.0;
};

/// One time-aligned multichannel recording (drag or tap).
struct DragEpisode {
  std::string episode_id;
  TextureId texture = TextureId::a;
  double nominal_velocity_mm_s = 0.0;
  double sample_rate_hz = 0.0;
  MatU16 mic_counts;      // T x 10, ADC counts in [0, 4095]
  Mat robot_pos_mm;       // T x 3
  Mat robot_vel_mm_s;     // T x 3
  Mat ft_n;               // T x 6: fx fy fz tx ty tz (forces N, torques N*mm)
  uint64_t rng_seed = 0;
  EpisodeKind kind = EpisodeKind::drag;
  SimMeta meta;

  int64_t length() const { return mic_counts.rows(); }
  double duration_s() const { return length() / sample_rate_hz; }

  /// Planar speed of the robot at sample t.
  double planar_speed(int64_t t) const {
    return robot_vel_mm_s.block<1, 2>(t, 0).norm();
  }
};

}  // namespace micarray
