// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "micarray/episode.hpp"
#include "micarray/geometry.hpp"
#include "micarray/texture.hpp"

namespace micarray::sim {

/// Amplifier + 12-bit ADC model: counts = clamp(round((5.5 v + 1) / 3.3 * 4095)).
uint16_t adc_quantize(double voltage);

inline constexpr double kAdcGain = 5.5;
inline constexpr double kAdcBiasV = 1.0;
inline constexpr double kAdcRailV = 3.3;
inline constexpr int kAdcMaxCount = 4095;

/// Counts produced per volt of microphone signal (slope of the ADC model).
inline constexpr double kCountsPerVolt = kAdcGain / kAdcRailV * kAdcMaxCount;

struct DragSimParams {
  double sample_rate_hz = 2000.0;
  double pre_roll_s = 0.15;   // quiet contact-at-rest period before motion
  double post_roll_s = 0.05;  // quiet tail after motion stops
  double min_path_mm = 15.0;
  double accel_min_mm_s2 = 300.0;
  double accel_max_mm_s2 = 400.0;
  double force_min_n = 1.0;
  double force_max_n = 5.0;
  double z_rot_max_deg = 45.0;

  // Signal model: bump-crossing harmonic train + velocity-scaled broadband
  // friction noise + Gaussian sensor noise + per-mic DC bias, all shaped by
  // the exponential receptive field and the ADC model.
  double bump_amp_v = 0.05;          // base excitation at reference force/velocity
  double force_ref_n = 3.0;
  double vel_ref_mm_s = 40.0;
  std::array<double, 3> harmonic_ratios{1.0, 0.2, 0.08};
  double harmonic_jitter = 0.1;      // slow multiplicative amplitude modulation
  double texture_amp_exponent = 0.5; // amplitude scales with (spacing/3mm)^exp
  double friction_amp_v = 0.003;     // broadband friction noise at vel_ref
  double sensor_noise_counts = 2.0;
  double mic_bias_v = 0.02;          // per-mic constant bias, uniform in +/- this
  double contact_stiffness_n_mm = 4.0;  // maps normal force to z depth proxy
};

struct TapSimParams {
  double sample_rate_hz = 2300.0;
  double pre_contact_s = 0.35;
  double hold_s = 0.6;
  double plateau_min_n = 2.0;
  double plateau_max_n = 3.0;
  double ramp_depth_mm = 0.12;  // F/T ramp time = ramp_depth / approach velocity

  // Elastomer latency: per-mic onset delay in ms is
  //   base + vel_lag / v + tau * distance.
  double latency_base_ms = 0.6;
  double latency_vel_lag_mm = 30.0;
  double latency_tau_ms_per_mm = 0.4;

  double tap_amp_v = 0.134;        // burst amplitude at d = 0, v = vel_amp_ref
  double vel_amp_ref_mm_s = 100.0;
  double vel_amp_exponent = 0.6;
  double ring_freq_hz = 300.0;
  double ring_decay_ms = 8.0;
  double attack_ms = 0.15;
  double ft_noise_n = 0.02;
  double sensor_noise_counts = 2.0;
  double mic_bias_v = 0.02;
};

/// Simulates one straight-line drag between two random border points at the
/// given nominal velocity. Deterministic in (layout, texture, velocity,
/// seed, params). Throws std::invalid_argument for non-positive velocity.
DragEpisode simulate_drag(const SensorLayout& layout, const TextureSpec& texture,
                          double velocity_mm_s, uint64_t seed,
                          const DragSimParams& params = {});

/// Simulates one vertical tap at `location`. Ground-truth contact time is
/// stored in meta.contact_time_s. Throws std::invalid_argument for locations
/// outside the sensing area or non-positive approach velocity.
DragEpisode simulate_tap(const SensorLayout& layout, const Vec2& location,
                         double approach_velocity_mm_s, uint64_t seed,
                         const TapSimParams& params = {});

/// Mic index with the smallest mean distance to the contact point over the
/// motion phase of a drag.
int nearest_mic_over_drag(const SensorLayout& layout, const DragEpisode& ep);

}  // namespace micarray::sim
