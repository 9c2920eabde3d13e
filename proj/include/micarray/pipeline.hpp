// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "micarray/episode.hpp"
#include "micarray/filter.hpp"
#include "micarray/geometry.hpp"

namespace micarray::pipeline {

struct PipelineConfig {
  int baseline_samples = 200;      // B: per-channel baseline = mean of first B
  double vel_threshold_mm_s = 5.0; // segmentation speed threshold
  int min_segment_len = 500;       // runs shorter than the largest window drop
  int filter_order = 3;
  double filter_cutoff_hz = 3.0;
};

/// Episode with real-valued, baseline-subtracted microphone channels.
struct CenteredEpisode {
  const DragEpisode* source = nullptr;
  Mat mic;  // T x 10, counts minus per-channel baseline
  bool onset_in_baseline = false;  // motion began inside the baseline window
};

/// Subtracts the per-channel mean of the first `baseline_samples` samples.
/// Flags (not fails) episodes whose motion onset falls inside the baseline
/// window, since the baseline estimate is then biased. Throws DataError when
/// the episode is shorter than the baseline window.
CenteredEpisode subtract_baseline(const DragEpisode& episode,
                                  int baseline_samples = 200);

struct Segment {
  std::string drag_id;
  int64_t begin = 0;  // inclusive
  int64_t end = 0;    // exclusive

  int64_t length() const { return end - begin; }
};

/// Maximal contiguous runs where the planar robot speed is at least
/// vel_threshold. Runs shorter than min_segment_len are dropped.
std::vector<Segment> segment_drags(const DragEpisode& episode,
                                   double vel_threshold_mm_s = 5.0,
                                   int min_segment_len = 500);

/// Start offsets of length-n windows placed every `offset` samples within a
/// segment of length `segment_len`: floor((L - n) / offset) + 1 windows, or
/// none when L < n.
std::vector<int64_t> window_starts(int64_t segment_len, int n, int offset);

/// Third-order bidirectional Butterworth high-pass (fc = 3 Hz default) over
/// an n-by-10 window; zero phase, DC removed.
Mat highpass(const Mat& window, double sample_rate_hz,
             double cutoff_hz = 3.0, int order = 3);

struct WindowLabels {
  int texture = 0;
  Vec2 pos_mm{0, 0};     // encoder position at the window's last timestep
  double vel_mm_s = 0.0; // median planar speed within the window
};

/// Labels for the window [begin, begin + n) of an episode. Throws DataError
/// when the robot stream does not cover the span.
WindowLabels label_window(const DragEpisode& episode, int64_t begin, int n);

/// One filtered training sample.
struct WindowSample {
  Eigen::MatrixXf data;  // n x 10, filtered, zero-mean per channel
  int texture = 0;
  Vec2 pos_mm{0, 0};
  double vel_mm_s = 0.0;
  uint32_t drag_index = 0;          // into WindowDataset::drags
  double nominal_velocity_mm_s = 0; // episode-level commanded velocity
};

struct DragMeta {
  std::string drag_id;
  std::string episode_id;
  int texture = 0;
  double nominal_velocity_mm_s = 0.0;
  Eigen::Matrix<double, kNumMics, 1> noise_floor;  // filtered pre-drag RMS
};

struct WindowDataset {
  std::string task;
  int window_len = 0;
  int offset = 0;
  double sample_rate_hz = 0.0;
  SensorLayout layout;  // geometry the episodes were generated with
  std::vector<DragMeta> drags;
  std::vector<WindowSample> samples;
};

/// Runs baseline subtraction, segmentation, windowing, filtering, and
/// labeling over one episode, appending to `out`. Returns the number of
/// windows produced.
int64_t extract_windows(const DragEpisode& episode, int window_len, int offset,
                        const PipelineConfig& config, WindowDataset& out);

/// Median of a vector (mean of the two central order statistics for even n).
double median(std::vector<double> values);

}  // namespace micarray::pipeline
