// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "micarray/rng.hpp"

namespace micarray::sim {

namespace {

// Stream ids for the per-purpose RNG split. Path, force, bias, and noise
// draws must not depend on the texture so that episodes sharing a seed are
// comparable across textures.
enum Stream : uint64_t {
  kPath = 1,
  kForce = 2,
  kBias = 3,
  kJitter = 4,
  kHarmonic = 5,
  kFriction = 6,
  kFt = 7,
  kTap = 8,
  kMicNoiseBase = 100,  // + mic index
};

// Straight-line trapezoidal (or triangular, for short paths) motion profile.
struct MotionProfile {
  double length = 0.0;
  double accel = 0.0;
  double peak_v = 0.0;
  double t_acc = 0.0;
  double t_cruise = 0.0;

  double total_time() const { return 2.0 * t_acc + t_cruise; }

  double distance(double t) const {
    t = std::clamp(t, 0.0, total_time());
    if (t < t_acc) return 0.5 * accel * t * t;
    const double d_acc = 0.5 * accel * t_acc * t_acc;
    if (t < t_acc + t_cruise) return d_acc + peak_v * (t - t_acc);
    const double r = total_time() - t;
    return length - 0.5 * accel * r * r;
  }

  double speed(double t) const {
    if (t < 0.0 || t > total_time()) return 0.0;
    if (t < t_acc) return accel * t;
    if (t < t_acc + t_cruise) return peak_v;
    return accel * (total_time() - t);
  }
};

MotionProfile make_profile(double length, double velocity, double accel) {
  MotionProfile p;
  p.length = length;
  p.accel = accel;
  const double d_acc = velocity * velocity / (2.0 * accel);
  if (length >= 2.0 * d_acc) {
    p.peak_v = velocity;
    p.t_acc = velocity / accel;
    p.t_cruise = (length - 2.0 * d_acc) / velocity;
  } else {
    p.peak_v = std::sqrt(accel * length);
    p.t_acc = p.peak_v / accel;
    p.t_cruise = 0.0;
  }
  return p;
}

// Point on the border of the square [-h, h]^2 at perimeter parameter
// u in [0, 8h).
Vec2 border_point(double u, double h) {
  const double side = 2.0 * h;
  if (u < side) return {-h + u, -h};
  u -= side;
  if (u < side) return {h, -h + u};
  u -= side;
  if (u < side) return {h - u, h};
  u -= side;
  return {-h, h - u};
}

double sensor_noise_v(Rng& rng, double noise_counts) {
  return rng.normal(0.0, noise_counts / kCountsPerVolt);
}

}  // namespace

uint16_t adc_quantize(double voltage) {
  const double scaled =
      (kAdcGain * voltage + kAdcBiasV) / kAdcRailV * kAdcMaxCount;
  const long long counts = std::llround(scaled);
  return static_cast<uint16_t>(std::clamp<long long>(counts, 0, kAdcMaxCount));
}

DragEpisode simulate_drag(const SensorLayout& layout, const TextureSpec& texture,
                          double velocity_mm_s, uint64_t seed,
                          const DragSimParams& params) {
  if (velocity_mm_s <= 0.0) {
    throw std::invalid_argument("simulate_drag: velocity must be positive");
  }
  if (texture.bump_spacing_mm < 0.0 || texture.bump_spacing_mm > 4.5) {
    throw std::invalid_argument("simulate_drag: texture spacing out of range");
  }
  const Rng root(seed);

  // Path: two border points at least min_path_mm apart.
  Rng path_rng = root.stream(kPath);
  const double h = layout.half_extent();
  Vec2 p0, p1;
  do {
    p0 = border_point(path_rng.uniform(0.0, 8.0 * h), h);
    p1 = border_point(path_rng.uniform(0.0, 8.0 * h), h);
  } while ((p1 - p0).norm() < params.min_path_mm);
  const double path_len = (p1 - p0).norm();
  const Vec2 dir = (p1 - p0) / path_len;

  Rng force_rng = root.stream(kForce);
  const double force_n = force_rng.uniform(params.force_min_n, params.force_max_n);
  const double accel = force_rng.uniform(params.accel_min_mm_s2, params.accel_max_mm_s2);
  const double z_rot = force_rng.uniform(0.0, params.z_rot_max_deg);
  const double depth_mm = force_n / params.contact_stiffness_n_mm;

  const MotionProfile profile = make_profile(path_len, velocity_mm_s, accel);
  const double fs = params.sample_rate_hz;
  const double duration =
      params.pre_roll_s + profile.total_time() + params.post_roll_s;
  const int64_t n = std::llround(duration * fs);
  const double t_start = params.pre_roll_s;

  Rng bias_rng = root.stream(kBias);
  std::array<double, kNumMics> mic_bias;
  for (auto& b : mic_bias) b = bias_rng.uniform(-params.mic_bias_v, params.mic_bias_v);

  // Bump-train parameters (textured indenters only).
  Rng harm_rng = root.stream(kHarmonic);
  std::array<double, 3> harm_phase{}, jitter_freq{}, jitter_phase{};
  for (int k = 0; k < 3; ++k) {
    harm_phase[k] = harm_rng.uniform(0.0, 2.0 * M_PI);
    jitter_freq[k] = harm_rng.uniform(0.5, 2.0);
    jitter_phase[k] = harm_rng.uniform(0.0, 2.0 * M_PI);
  }
  const double tex_gain =
      texture.flat() ? 0.0
                     : std::pow(texture.bump_spacing_mm / 3.0,
                                params.texture_amp_exponent);

  Rng friction_rng = root.stream(kFriction);
  Rng ft_rng = root.stream(kFt);
  std::array<Rng, kNumMics> mic_noise;
  for (int i = 0; i < kNumMics; ++i) mic_noise[i] = root.stream(kMicNoiseBase + i);

  DragEpisode ep;
  {
    std::ostringstream id;
    id << "drag_" << to_string(texture.id) << "_v"
       << static_cast<int>(std::lround(velocity_mm_s)) << "_s" << seed;
    ep.episode_id = id.str();
  }
  ep.texture = texture.id;
  ep.nominal_velocity_mm_s = velocity_mm_s;
  ep.sample_rate_hz = fs;
  ep.rng_seed = seed;
  ep.kind = EpisodeKind::drag;
  ep.mic_counts.resize(n, kNumMics);
  ep.robot_pos_mm.resize(n, 3);
  ep.robot_vel_mm_s.resize(n, 3);
  ep.ft_n.resize(n, 6);

  const double spacing = texture.bump_spacing_mm;
  const double decay = layout.receptive_decay_mm;
  const double mu = 0.5;  // kinetic friction proxy for the F/T channels

  for (int64_t t = 0; t < n; ++t) {
    const double time = t / fs;
    const double tm = time - t_start;  // time within the motion profile
    const double s = profile.distance(tm);
    const double v = profile.speed(tm);
    const Vec2 pos = p0 + s * dir;

    ep.robot_pos_mm(t, 0) = pos.x();
    ep.robot_pos_mm(t, 1) = pos.y();
    ep.robot_pos_mm(t, 2) = -depth_mm;
    ep.robot_vel_mm_s(t, 0) = v * dir.x();
    ep.robot_vel_mm_s(t, 1) = v * dir.y();
    ep.robot_vel_mm_s(t, 2) = 0.0;

    // Contact-sourced excitation, shared across microphones before the
    // per-mic receptive-field decay.
    double source_v = 0.0;
    const double vel_gain = v / params.vel_ref_mm_s;
    if (!texture.flat() && v > 0.0) {
      const double theta = 2.0 * M_PI * s / spacing;
      const double amp = params.bump_amp_v * (force_n / params.force_ref_n) *
                         vel_gain * tex_gain;
      for (int k = 0; k < 3; ++k) {
        const double jitter =
            1.0 + params.harmonic_jitter *
                      std::sin(2.0 * M_PI * jitter_freq[k] * time + jitter_phase[k]);
        source_v += amp * params.harmonic_ratios[k] * jitter *
                    std::sin((k + 1) * theta + harm_phase[k]);
      }
    }
    const double friction_draw = friction_rng.normal();
    if (v > 0.0) {
      source_v += params.friction_amp_v * vel_gain * friction_draw;
    }

    for (int i = 0; i < kNumMics; ++i) {
      const double d = (layout.mic_positions[i] - pos).norm();
      const double gain = std::exp(-d / decay);
      const double volts = mic_bias[i] + gain * source_v +
                           sensor_noise_v(mic_noise[i], params.sensor_noise_counts);
      ep.mic_counts(t, i) = adc_quantize(volts);
    }

    const double fz = -force_n;
    const double moving = v > 0.0 ? 1.0 : 0.0;
    const double fx = moving * mu * force_n * dir.x();
    const double fy = moving * mu * force_n * dir.y();
    ep.ft_n(t, 0) = fx + ft_rng.normal(0.0, 0.02);
    ep.ft_n(t, 1) = fy + ft_rng.normal(0.0, 0.02);
    ep.ft_n(t, 2) = fz + ft_rng.normal(0.0, 0.02);
    ep.ft_n(t, 3) = pos.y() * fz + ft_rng.normal(0.0, 0.2);
    ep.ft_n(t, 4) = -pos.x() * fz + ft_rng.normal(0.0, 0.2);
    ep.ft_n(t, 5) = (pos.x() * fy - pos.y() * fx) + ft_rng.normal(0.0, 0.2);
  }

  ep.meta.path_start_mm = p0;
  ep.meta.path_end_mm = p1;
  ep.meta.normal_force_n = force_n;
  ep.meta.accel_mm_s2 = accel;
  ep.meta.z_rotation_deg = z_rot;
  ep.meta.motion_start_index = std::llround(t_start * fs);
  ep.meta.motion_end_index =
      std::min<int64_t>(n - 1, std::llround((t_start + profile.total_time()) * fs));
  return ep;
}

DragEpisode simulate_tap(const SensorLayout& layout, const Vec2& location,
                         double approach_velocity_mm_s, uint64_t seed,
                         const TapSimParams& params) {
  if (!layout.contains(location)) {
    throw std::invalid_argument("simulate_tap: location outside sensing area");
  }
  if (approach_velocity_mm_s <= 0.0) {
    throw std::invalid_argument("simulate_tap: approach velocity must be positive");
  }
  const Rng root(seed);
  const double fs = params.sample_rate_hz;
  const double v = approach_velocity_mm_s;

  Rng tap_rng = root.stream(kTap);
  const double t_c = params.pre_contact_s + tap_rng.uniform(0.0, 0.02);
  const double plateau_n = tap_rng.uniform(params.plateau_min_n, params.plateau_max_n);
  const double ring_phase = tap_rng.uniform(0.0, 2.0 * M_PI);

  Rng bias_rng = root.stream(kBias);
  std::array<double, kNumMics> mic_bias;
  for (auto& b : mic_bias) b = bias_rng.uniform(-params.mic_bias_v, params.mic_bias_v);

  Rng ft_rng = root.stream(kFt);
  std::array<Rng, kNumMics> mic_noise;
  for (int i = 0; i < kNumMics; ++i) mic_noise[i] = root.stream(kMicNoiseBase + i);

  const int64_t n = std::llround((t_c + params.hold_s) * fs);
  const double ramp_s = params.ramp_depth_mm / v;
  const double decay = layout.receptive_decay_mm;
  const double amp_base =
      params.tap_amp_v * std::pow(v / params.vel_amp_ref_mm_s, params.vel_amp_exponent);

  std::array<double, kNumMics> onset_s, amp;
  for (int i = 0; i < kNumMics; ++i) {
    const double d = (layout.mic_positions[i] - location).norm();
    onset_s[i] = t_c + (params.latency_base_ms + params.latency_vel_lag_mm / v +
                        params.latency_tau_ms_per_mm * d) /
                           1000.0;
    amp[i] = amp_base * std::exp(-d / decay);
  }

  DragEpisode ep;
  {
    std::ostringstream id;
    id << "tap_v" << static_cast<int>(std::lround(v)) << "_s" << seed;
    ep.episode_id = id.str();
  }
  ep.texture = TextureId::a;
  ep.nominal_velocity_mm_s = v;
  ep.sample_rate_hz = fs;
  ep.rng_seed = seed;
  ep.kind = EpisodeKind::tap;
  ep.mic_counts.resize(n, kNumMics);
  ep.robot_pos_mm.resize(n, 3);
  ep.robot_vel_mm_s.resize(n, 3);
  ep.ft_n.resize(n, 6);

  const double attack_s = params.attack_ms / 1000.0;
  const double ring_decay_s = params.ring_decay_ms / 1000.0;
  const double omega = 2.0 * M_PI * params.ring_freq_hz;

  for (int64_t t = 0; t < n; ++t) {
    const double time = t / fs;

    for (int i = 0; i < kNumMics; ++i) {
      double volts = mic_bias[i] +
                     sensor_noise_v(mic_noise[i], params.sensor_noise_counts);
      const double dt = time - onset_s[i];
      if (dt >= 0.0) {
        const double env =
            (1.0 - std::exp(-dt / attack_s)) * std::exp(-dt / ring_decay_s);
        volts += amp[i] * env * std::sin(omega * dt + ring_phase);
      }
      ep.mic_counts(t, i) = adc_quantize(volts);
    }

    double fz = ft_rng.normal(0.0, params.ft_noise_n);
    if (time >= t_c) {
      fz -= plateau_n * std::min(1.0, (time - t_c) / ramp_s);
    }
    ep.ft_n(t, 0) = ft_rng.normal(0.0, params.ft_noise_n);
    ep.ft_n(t, 1) = ft_rng.normal(0.0, params.ft_noise_n);
    ep.ft_n(t, 2) = fz;
    ep.ft_n(t, 3) = ft_rng.normal(0.0, 0.1);
    ep.ft_n(t, 4) = ft_rng.normal(0.0, 0.1);
    ep.ft_n(t, 5) = ft_rng.normal(0.0, 0.1);

    // Vertical approach at constant velocity, then a short ram into the
    // elastomer mirrored by the force ramp.
    double z, vz;
    if (time < t_c) {
      z = v * (t_c - time);
      vz = -v;
    } else {
      const double frac = std::min(1.0, (time - t_c) / ramp_s);
      z = -params.ramp_depth_mm * frac;
      vz = frac < 1.0 ? -v : 0.0;
    }
    ep.robot_pos_mm(t, 0) = location.x();
    ep.robot_pos_mm(t, 1) = location.y();
    ep.robot_pos_mm(t, 2) = z;
    ep.robot_vel_mm_s(t, 0) = 0.0;
    ep.robot_vel_mm_s(t, 1) = 0.0;
    ep.robot_vel_mm_s(t, 2) = vz;
  }

  ep.meta.tap_location_mm = location;
  ep.meta.contact_time_s = t_c;
  ep.meta.approach_velocity_mm_s = v;
  ep.meta.plateau_force_n = plateau_n;
  ep.meta.motion_start_index = std::llround(t_c * fs);
  ep.meta.motion_end_index = n - 1;
  return ep;
}

int nearest_mic_over_drag(const SensorLayout& layout, const DragEpisode& ep) {
  std::array<double, kNumMics> mean_d{};
  int64_t count = 0;
  for (int64_t t = ep.meta.motion_start_index; t <= ep.meta.motion_end_index; ++t) {
    const Vec2 pos(ep.robot_pos_mm(t, 0), ep.robot_pos_mm(t, 1));
    for (int i = 0; i < kNumMics; ++i) {
      mean_d[i] += (layout.mic_positions[i] - pos).norm();
    }
    ++count;
  }
  int best = 0;
  for (int i = 1; i < kNumMics; ++i) {
    if (mean_d[i] < mean_d[best]) best = i;
  }
  (void)count;
  return best;
}

}  // namespace micarray::sim
