// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "micarray/episode.hpp"

namespace micarray::detect {

enum class DetectMethod { realtime_mic, offline_ft, ground_truth_sim };

struct ContactEvent {
  int64_t time_index = 0;
  double time_s = 0.0;
  int mic_channel = -1;  // -1 for F/T events
  DetectMethod method = DetectMethod::realtime_mic;
};

/// Realtime per-channel onset detector: fires at the first sample that is at
/// least `threshold` counts above the median of the previous `history`
/// samples. Strictly causal; one instance owns one channel's stream.
class MicContactDetector {
 public:
  explicit MicContactDetector(double threshold_counts = 18.0, int history = 20);

  /// Feeds one sample; returns the sample's stream index when this sample
  /// triggers detection. Further samples keep returning nothing.
  std::optional<int64_t> feed(uint16_t count);

  void reset();

  double threshold() const { return threshold_; }
  int history() const { return history_; }

 private:
  double median_of_history() const;

  double threshold_;
  int history_;
  std::deque<uint16_t> window_;
  int64_t index_ = 0;
  bool fired_ = false;
};

/// Batch convenience wrapper over MicContactDetector.
std::optional<int64_t> mic_contact_detect(std::span<const uint16_t> counts,
                                          double threshold_counts = 18.0,
                                          int history = 20);

struct FtHeuristicParams {
  int window = 30;            // sliding window length, samples
  double contact_n = -1.0;    // condition 1: some point below this
  int decrease_within = 4;    // condition 3: a drop within this many steps
  int drop_horizon = 25;      // condition 4: checked this many steps later
  double drop_n = 0.5;        // condition 4: required drop magnitude
};

/// Offline F/T contact labeling: earliest index i where, within the window
/// [i, i+window), (1) some point is below contact_n, (2) every later point
/// is below the value at i, (3) the curve starts decreasing within
/// decrease_within steps, and (4) the curve has dropped by at least drop_n
/// at i + drop_horizon. Looks ahead in the data; not usable in realtime.
/// Returns nothing when no index qualifies (flagged for manual review).
std::optional<int64_t> ft_contact_detect_offline(
    std::span<const double> fz_n, const FtHeuristicParams& params = {});

/// Subtracts the mean of [quiet_begin, quiet_end) from every F/T channel.
/// Throws DataError when the detected contact (on the tared z force) falls
/// inside the quiet span.
DragEpisode bias_episode(const DragEpisode& episode, int64_t quiet_begin,
                         int64_t quiet_end,
                         const FtHeuristicParams& params = {});

/// Drops episodes in which any F/T channel repeats the same value for at
/// least `flat_run` consecutive samples within the contact region (from the
/// offline contact label to the end). Episodes without a detectable contact
/// are kept.
std::vector<DragEpisode> remove_flatline(std::vector<DragEpisode> episodes,
                                         int flat_run = 12,
                                         const FtHeuristicParams& params = {});

/// (mic time - F/T time) in milliseconds; negative when the microphone led.
/// Both events must come from the same episode and time base; the method
/// fields are checked.
double relative_response_time(const ContactEvent& mic_event,
                              const ContactEvent& ft_event);

}  // namespace micarray::detect
