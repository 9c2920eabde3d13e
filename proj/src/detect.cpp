// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/detect.hpp"

#include <algorithm>
#include <cmath>

namespace micarray::detect {

MicContactDetector::MicContactDetector(double threshold_counts, int history)
    : threshold_(threshold_counts), history_(history) {
  if (history < 1) throw std::invalid_argument("history must be >= 1");
}

double MicContactDetector::median_of_history() const {
  std::vector<uint16_t> sorted(window_.begin(), window_.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

std::optional<int64_t> MicContactDetector::feed(uint16_t count) {
  const int64_t idx = index_++;
  std::optional<int64_t> event;
  if (!fired_ && static_cast<int>(window_.size()) == history_) {
    if (count - median_of_history() >= threshold_) {
      fired_ = true;
      event = idx;
    }
  }
  window_.push_back(count);
  if (static_cast<int>(window_.size()) > history_) window_.pop_front();
  return event;
}

void MicContactDetector::reset() {
  window_.clear();
  index_ = 0;
  fired_ = false;
}

std::optional<int64_t> mic_contact_detect(std::span<const uint16_t> counts,
                                          double threshold_counts, int history) {
  MicContactDetector det(threshold_counts, history);
  for (const uint16_t c : counts) {
    if (auto hit = det.feed(c)) return hit;
  }
  return std::nullopt;
}

std::optional<int64_t> ft_contact_detect_offline(std::span<const double> fz_n,
                                                 const FtHeuristicParams& params) {
  const int64_t n = static_cast<int64_t>(fz_n.size());
  const int64_t w = params.window;
  if (n < w) return std::nullopt;

  for (int64_t i = 0; i + w <= n; ++i) {
    // 1) at least one point in the window below the contact threshold
    bool below = false;
    for (int64_t j = i; j < i + w; ++j) {
      if (fz_n[j] < params.contact_n) {
        below = true;
        break;
      }
    }
    if (!below) continue;

    // 2) every future point in the window below the current value
    const double current = fz_n[i];
    bool all_less = true;
    for (int64_t j = i + 1; j < i + w; ++j) {
      if (fz_n[j] >= current) {
        all_less = false;
        break;
      }
    }
    if (!all_less) continue;

    // 3) the curve starts decreasing within the next few steps
    bool decreasing = false;
    for (int64_t j = i + 1; j <= i + params.decrease_within && j < n; ++j) {
      if (fz_n[j] < current) {
        decreasing = true;
        break;
      }
    }
    if (!decreasing) continue;

    // 4) a significant drop a fixed horizon later
    const int64_t look = i + params.drop_horizon;
    if (look >= n) continue;
    if (fz_n[look] > current - params.drop_n) continue;

    return i;
  }
  return std::nullopt;
}

DragEpisode bias_episode(const DragEpisode& episode, int64_t quiet_begin,
                         int64_t quiet_end, const FtHeuristicParams& params) {
  if (quiet_begin < 0 || quiet_end <= quiet_begin ||
      quiet_end > episode.length()) {
    throw std::invalid_argument("bias_episode: bad quiet span");
  }
  DragEpisode out = episode;
  const int64_t n = quiet_end - quiet_begin;
  for (int ch = 0; ch < 6; ++ch) {
    const double mean = out.ft_n.col(ch).segment(quiet_begin, n).mean();
    out.ft_n.col(ch).array() -= mean;
  }

  const Eigen::VectorXd fz = out.ft_n.col(2);
  const auto contact = ft_contact_detect_offline(
      std::span<const double>(fz.data(), fz.size()), params);
  if (contact && *contact < quiet_end) {
    throw DataError("bias_episode: quiet span overlaps detected contact in " +
                    episode.episode_id);
  }
  return out;
}

namespace {

bool has_flat_run(const Eigen::VectorXd& channel, int64_t begin, int64_t end,
                  int flat_run) {
  int64_t run = 1;
  for (int64_t t = begin + 1; t < end; ++t) {
    if (channel(t) == channel(t - 1)) {
      if (++run >= flat_run) return true;
    } else {
      run = 1;
    }
  }
  return false;
}

}  // namespace

std::vector<DragEpisode> remove_flatline(std::vector<DragEpisode> episodes,
                                         int flat_run,
                                         const FtHeuristicParams& params) {
  std::vector<DragEpisode> kept;
  kept.reserve(episodes.size());
  for (auto& ep : episodes) {
    const Eigen::VectorXd fz = ep.ft_n.col(2);
    const auto contact = ft_contact_detect_offline(
        std::span<const double>(fz.data(), fz.size()), params);
    bool drop = false;
    if (contact) {
      for (int ch = 0; ch < 6 && !drop; ++ch) {
        const Eigen::VectorXd col = ep.ft_n.col(ch);
        drop = has_flat_run(col, *contact, ep.length(), flat_run);
      }
    }
    if (!drop) kept.push_back(std::move(ep));
  }
  return kept;
}

double relative_response_time(const ContactEvent& mic_event,
                              const ContactEvent& ft_event) {
  if (mic_event.method != DetectMethod::realtime_mic ||
      ft_event.method != DetectMethod::offline_ft) {
    throw std::invalid_argument(
        "relative_response_time: expected (realtime mic, offline F/T) events");
  }
  return (mic_event.time_s - ft_event.time_s) * 1000.0;
}

}  // namespace micarray::detect
