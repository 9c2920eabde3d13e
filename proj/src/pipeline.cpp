// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace micarray::pipeline {

CenteredEpisode subtract_baseline(const DragEpisode& episode,
                                  int baseline_samples) {
  const int64_t n = episode.length();
  if (n < baseline_samples) {
    throw DataError("subtract_baseline: episode shorter than baseline window (" +
                    std::to_string(n) + " < " +
                    std::to_string(baseline_samples) + ")");
  }
  CenteredEpisode out;
  out.source = &episode;
  out.mic = episode.mic_counts.cast<double>();
  const Eigen::RowVectorXd baseline =
      out.mic.topRows(baseline_samples).colwise().mean();
  out.mic.rowwise() -= baseline;

  // The baseline is only sound if nothing was happening yet: flag motion
  // (drags) or ground-truth/contact onset (taps) inside the window.
  const int64_t onset = episode.meta.motion_start_index;
  out.onset_in_baseline = onset >= 0 && onset < baseline_samples;
  return out;
}

std::vector<Segment> segment_drags(const DragEpisode& episode,
                                   double vel_threshold_mm_s,
                                   int min_segment_len) {
  std::vector<Segment> segments;
  const int64_t n = episode.length();
  int64_t begin = -1;
  int seg_index = 0;
  for (int64_t t = 0; t <= n; ++t) {
    const bool moving = t < n && episode.planar_speed(t) >= vel_threshold_mm_s;
    if (moving && begin < 0) {
      begin = t;
    } else if (!moving && begin >= 0) {
      if (t - begin >= min_segment_len) {
        Segment s;
        s.begin = begin;
        s.end = t;
        s.drag_id = episode.episode_id + "#" + std::to_string(seg_index++);
        segments.push_back(std::move(s));
      }
      begin = -1;
    }
  }
  return segments;
}

std::vector<int64_t> window_starts(int64_t segment_len, int n, int offset) {
  if (n < 1 || offset < 1) {
    throw std::invalid_argument("window_starts: n and offset must be >= 1");
  }
  std::vector<int64_t> starts;
  if (segment_len < n) return starts;
  const int64_t count = (segment_len - n) / offset + 1;
  starts.reserve(count);
  for (int64_t k = 0; k < count; ++k) starts.push_back(k * offset);
  return starts;
}

Mat highpass(const Mat& window, double sample_rate_hz, double cutoff_hz,
             int order) {
  const dsp::IirCoeffs c = dsp::butter_highpass(order, cutoff_hz, sample_rate_hz);
  return dsp::filtfilt(c, window);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty range");
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + mid));
  }
  return m;
}

WindowLabels label_window(const DragEpisode& episode, int64_t begin, int n) {
  if (begin < 0 || begin + n > episode.length()) {
    throw DataError("label_window: robot stream does not cover the span");
  }
  WindowLabels labels;
  labels.texture = static_cast<int>(episode.texture);
  const int64_t last = begin + n - 1;
  labels.pos_mm = {episode.robot_pos_mm(last, 0), episode.robot_pos_mm(last, 1)};
  std::vector<double> speeds(n);
  for (int k = 0; k < n; ++k) speeds[k] = episode.planar_speed(begin + k);
  labels.vel_mm_s = median(std::move(speeds));
  return labels;
}

int64_t extract_windows(const DragEpisode& episode, int window_len, int offset,
                        const PipelineConfig& config, WindowDataset& out) {
  const CenteredEpisode centered =
      subtract_baseline(episode, config.baseline_samples);
  const std::vector<Segment> segments = segment_drags(
      episode, config.vel_threshold_mm_s, config.min_segment_len);
  if (segments.empty()) return 0;

  const dsp::IirCoeffs coeffs = dsp::butter_highpass(
      config.filter_order, config.filter_cutoff_hz, episode.sample_rate_hz);

  // Per-episode noise floor: RMS of the filtered quiet region before motion.
  Eigen::Matrix<double, kNumMics, 1> noise_floor =
      Eigen::Matrix<double, kNumMics, 1>::Ones();
  const int64_t quiet = std::min<int64_t>(episode.meta.motion_start_index,
                                          config.baseline_samples);
  const int min_quiet = 3 * (config.filter_order + 1) + 2;
  if (quiet >= min_quiet) {
    const Mat quiet_f = dsp::filtfilt(coeffs, centered.mic.topRows(quiet));
    noise_floor = (quiet_f.array().square().colwise().mean()).sqrt().transpose();
  }

  int64_t produced = 0;
  for (const Segment& seg : segments) {
    const uint32_t drag_index = static_cast<uint32_t>(out.drags.size());
    DragMeta meta;
    meta.drag_id = seg.drag_id;
    meta.episode_id = episode.episode_id;
    meta.texture = static_cast<int>(episode.texture);
    meta.nominal_velocity_mm_s = episode.nominal_velocity_mm_s;
    meta.noise_floor = noise_floor;
    out.drags.push_back(std::move(meta));

    for (const int64_t rel : window_starts(seg.length(), window_len, offset)) {
      const int64_t begin = seg.begin + rel;
      const Mat raw = centered.mic.middleRows(begin, window_len);
      const Mat filtered = dsp::filtfilt(coeffs, raw);
      const WindowLabels labels = label_window(episode, begin, window_len);

      WindowSample sample;
      sample.data = filtered.cast<float>();
      sample.texture = labels.texture;
      sample.pos_mm = labels.pos_mm;
      sample.vel_mm_s = labels.vel_mm_s;
      sample.drag_index = drag_index;
      sample.nominal_velocity_mm_s = episode.nominal_velocity_mm_s;
      out.samples.push_back(std::move(sample));
      ++produced;
    }
  }
  return produced;
}

}  // namespace micarray::pipeline
