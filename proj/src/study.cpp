// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/study.hpp"

#include <cmath>
#include <cstdio>

#include "micarray/rng.hpp"

namespace micarray::detect {

std::string StudyCell::format() const {
  if (!reported) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f (%.1f)", mean_ms, std_ms);
  return buf;
}

TapMeasurement measure_tap(const DragEpisode& episode, int mic_channel,
                           double mic_threshold_counts, int mic_history,
                           const FtHeuristicParams& ft_params) {
  TapMeasurement m;
  m.episode_id = episode.episode_id;
  m.ground_truth_contact_s = episode.meta.contact_time_s;

  MicContactDetector det(mic_threshold_counts, mic_history);
  for (int64_t t = 0; t < episode.length(); ++t) {
    if (auto hit = det.feed(episode.mic_counts(t, mic_channel))) {
      ContactEvent ev;
      ev.time_index = *hit;
      ev.time_s = *hit / episode.sample_rate_hz;
      ev.mic_channel = mic_channel;
      ev.method = DetectMethod::realtime_mic;
      m.mic_event = ev;
      break;
    }
  }

  const Eigen::VectorXd fz = episode.ft_n.col(2);
  if (auto idx = ft_contact_detect_offline(
          std::span<const double>(fz.data(), fz.size()), ft_params)) {
    ContactEvent ev;
    ev.time_index = *idx;
    ev.time_s = *idx / episode.sample_rate_hz;
    ev.mic_channel = -1;
    ev.method = DetectMethod::offline_ft;
    m.ft_event = ev;
  }

  if (m.mic_event && m.ft_event) {
    m.response_ms = relative_response_time(*m.mic_event, *m.ft_event);
  }
  return m;
}

StudyTable response_time_study(const SensorLayout& layout,
                               const StudyParams& params) {
  StudyTable table;
  table.distances_mm = params.distances_mm;
  table.velocities_mm_s = params.velocities_mm_s;

  const Vec2 ref = layout.mic_positions[params.reference_mic];
  // Offset direction pointing at the sensing-area center keeps every tap
  // location inside the area for the default grid.
  Vec2 dir = -ref;
  if (dir.norm() < 1e-12) dir = Vec2(1.0, 0.0);
  dir.normalize();

  for (const double vel : params.velocities_mm_s) {
    for (const double dist : params.distances_mm) {
      StudyCell cell;
      cell.distance_mm = dist;
      cell.velocity_mm_s = vel;
      const Vec2 location = ref + dist * dir;

      std::vector<double> responses;
      for (int k = 0; k < params.episodes_per_cell; ++k) {
        // Seeds are paired across velocities for a given (distance, index)
        // so that cell-to-cell comparisons share noise realizations.
        const uint64_t seed = Rng::mix(
            params.base_seed, static_cast<uint64_t>(dist * 1000.0) * 1000 + k);
        const DragEpisode ep =
            sim::simulate_tap(layout, location, vel, seed, params.tap);
        TapMeasurement m =
            measure_tap(ep, params.reference_mic, params.mic_threshold_counts,
                        params.mic_history);
        m.distance_mm = dist;
        m.velocity_mm_s = vel;
        if (m.response_ms) responses.push_back(*m.response_ms);
        table.measurements.push_back(std::move(m));
      }

      cell.episodes = params.episodes_per_cell;
      cell.detected = static_cast<int>(responses.size());
      cell.detection_rate =
          static_cast<double>(cell.detected) / cell.episodes;
      if (cell.detection_rate >= params.detection_rate_floor &&
          !responses.empty()) {
        cell.reported = true;
        double mean = 0.0;
        for (const double r : responses) mean += r;
        mean /= responses.size();
        double var = 0.0;
        for (const double r : responses) var += (r - mean) * (r - mean);
        var = responses.size() > 1 ? var / (responses.size() - 1) : 0.0;
        cell.mean_ms = mean;
        cell.std_ms = std::sqrt(var);
      }
      table.cells.push_back(cell);
    }
  }
  return table;
}

}  // namespace micarray::detect
