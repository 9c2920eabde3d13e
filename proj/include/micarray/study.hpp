// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "micarray/detect.hpp"
#include "micarray/geometry.hpp"
#include "micarray/sim.hpp"

namespace micarray::detect {

struct StudyParams {
  std::vector<double> distances_mm{0, 2, 4, 6};
  std::vector<double> velocities_mm_s{10, 55, 100};
  int episodes_per_cell = 30;
  int reference_mic = 0;          // channel used for detection
  double detection_rate_floor = 0.5;  // cells below this report "-"
  double mic_threshold_counts = 18.0;
  int mic_history = 20;
  uint64_t base_seed = 42;
  sim::TapSimParams tap;
};

struct StudyCell {
  double distance_mm = 0.0;
  double velocity_mm_s = 0.0;
  int episodes = 0;
  int detected = 0;
  double detection_rate = 0.0;
  double mean_ms = 0.0;  // over detected episodes
  double std_ms = 0.0;
  bool reported = false;  // false renders as "-"

  /// "3.0 (1.3)" or "-".
  std::string format() const;
};

/// Per-episode measurement within a study cell.
struct TapMeasurement {
  std::string episode_id;
  std::optional<ContactEvent> mic_event;
  std::optional<ContactEvent> ft_event;
  std::optional<double> response_ms;
  double ground_truth_contact_s = 0.0;
  double distance_mm = 0.0;
  double velocity_mm_s = 0.0;
};

struct StudyTable {
  std::vector<double> distances_mm;
  std::vector<double> velocities_mm_s;
  std::vector<StudyCell> cells;  // velocity-major order
  std::vector<TapMeasurement> measurements;

  const StudyCell& at(size_t vel_idx, size_t dist_idx) const {
    return cells[vel_idx * distances_mm.size() + dist_idx];
  }
};

/// Measures both detectors on one tap episode using the given mic channel.
TapMeasurement measure_tap(const DragEpisode& episode, int mic_channel,
                           double mic_threshold_counts = 18.0,
                           int mic_history = 20,
                           const FtHeuristicParams& ft_params = {});

/// Simulates taps over the distance x velocity grid and aggregates relative
/// response times per cell. Tap locations sit `distance` mm from the
/// reference mic toward the center of the sensing area. Episode seeds are
/// shared across velocities within a (distance, index) pair.
StudyTable response_time_study(const SensorLayout& layout,
                               const StudyParams& params = {});

}  // namespace micarray::detect
