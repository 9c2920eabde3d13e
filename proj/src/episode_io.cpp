// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>

#include <set>

#include "binary_io.hpp"
#include "micarray/io.hpp"
#include "micarray/run_config.hpp"

namespace micarray::io {

namespace {

using nlohmann::json;
constexpr char kEpisodeMagic[9] = "MICAEP01";

json meta_to_json(const SimMeta& m) {
  return json{{"path_start_mm", {m.path_start_mm.x(), m.path_start_mm.y()}},
              {"path_end_mm", {m.path_end_mm.x(), m.path_end_mm.y()}},
              {"normal_force_n", m.normal_force_n},
              {"accel_mm_s2", m.accel_mm_s2},
              {"z_rotation_deg", m.z_rotation_deg},
              {"motion_start_index", m.motion_start_index},
              {"motion_end_index", m.motion_end_index},
              {"tap_location_mm", {m.tap_location_mm.x(), m.tap_location_mm.y()}},
              {"contact_time_s", m.contact_time_s},
              {"approach_velocity_mm_s", m.approach_velocity_mm_s},
              {"plateau_force_n", m.plateau_force_n}};
}

SimMeta meta_from_json(const json& j) {
  SimMeta m;
  m.path_start_mm = Vec2(j["path_start_mm"][0].get<double>(),
                         j["path_start_mm"][1].get<double>());
  m.path_end_mm = Vec2(j["path_end_mm"][0].get<double>(),
                       j["path_end_mm"][1].get<double>());
  m.normal_force_n = j["normal_force_n"];
  m.accel_mm_s2 = j["accel_mm_s2"];
  m.z_rotation_deg = j["z_rotation_deg"];
  m.motion_start_index = j["motion_start_index"];
  m.motion_end_index = j["motion_end_index"];
  m.tap_location_mm = Vec2(j["tap_location_mm"][0].get<double>(),
                           j["tap_location_mm"][1].get<double>());
  m.contact_time_s = j["contact_time_s"];
  m.approach_velocity_mm_s = j["approach_velocity_mm_s"];
  m.plateau_force_n = j["plateau_force_n"];
  return m;
}

void append_f64_block(std::string& out, const Mat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) detail::put_f64(out, m(r, c));
  }
}

Mat read_f64_block(detail::Reader& reader, int64_t rows, int64_t cols) {
  Mat m(rows, cols);
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < cols; ++c) m(r, c) = reader.f64();
  }
  return m;
}

}  // namespace

void write_episode(const std::filesystem::path& path, const DragEpisode& ep) {
  const json header{{"format_version", 1},
                    {"episode_id", ep.episode_id},
                    {"kind", micarray::to_string(ep.kind)},
                    {"texture", micarray::to_string(ep.texture)},
                    {"nominal_velocity_mm_s", ep.nominal_velocity_mm_s},
                    {"sample_rate_hz", ep.sample_rate_hz},
                    {"rng_seed", ep.rng_seed},
                    {"length", ep.length()},
                    {"channels",
                     {{"mic_counts", "u16[Tx10]"},
                      {"robot_pos_mm", "f64[Tx3]"},
                      {"robot_vel_mm_s", "f64[Tx3]"},
                      {"ft_n", "f64[Tx6]"}}},
                    {"meta", meta_to_json(ep.meta)}};
  const std::string header_str = header.dump();

  std::string out;
  out.reserve(64 + header_str.size() + ep.length() * (20 + 8 * 12));
  out.append(kEpisodeMagic, 8);
  detail::put_u32(out, static_cast<uint32_t>(header_str.size()));
  out += header_str;
  for (Eigen::Index r = 0; r < ep.mic_counts.rows(); ++r) {
    for (int c = 0; c < kNumMics; ++c) detail::put_u16(out, ep.mic_counts(r, c));
  }
  append_f64_block(out, ep.robot_pos_mm);
  append_f64_block(out, ep.robot_vel_mm_s);
  append_f64_block(out, ep.ft_n);
  detail::write_file_bytes(path.string(), out);
}

DragEpisode read_episode(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file_bytes(path.string());
  detail::Reader reader(bytes.data(), bytes.size());
  if (reader.bytes(8) != std::string(kEpisodeMagic, 8)) {
    throw DataError("not an episode file: " + path.string());
  }
  const uint32_t header_len = reader.u32();
  const json header = json::parse(reader.bytes(header_len));
  if (header.at("format_version").get<int>() != 1) {
    throw DataError("unsupported episode format version in " + path.string());
  }

  DragEpisode ep;
  ep.episode_id = header.at("episode_id").get<std::string>();
  ep.kind = episode_kind_from_string(header.at("kind").get<std::string>());
  ep.texture = texture_from_string(header.at("texture").get<std::string>());
  ep.nominal_velocity_mm_s = header.at("nominal_velocity_mm_s").get<double>();
  ep.sample_rate_hz = header.at("sample_rate_hz").get<double>();
  ep.rng_seed = header.at("rng_seed").get<uint64_t>();
  ep.meta = meta_from_json(header.at("meta"));
  const int64_t t = header.at("length").get<int64_t>();

  ep.mic_counts.resize(t, kNumMics);
  for (int64_t r = 0; r < t; ++r) {
    for (int c = 0; c < kNumMics; ++c) ep.mic_counts(r, c) = reader.u16();
  }
  ep.robot_pos_mm = read_f64_block(reader, t, 3);
  ep.robot_vel_mm_s = read_f64_block(reader, t, 3);
  ep.ft_n = read_f64_block(reader, t, 6);
  if (reader.remaining() != 0) {
    throw DataError("trailing bytes in episode file " + path.string());
  }
  return ep;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  json j{{"format_version", manifest.format_version},
         {"layout", layout_to_json(manifest.layout)},
         {"episodes", json::array()}};
  for (const auto& e : manifest.episodes) {
    j["episodes"].push_back({{"episode_id", e.episode_id},
                             {"path", e.path},
                             {"texture", e.texture},
                             {"nominal_velocity_mm_s", e.nominal_velocity_mm_s},
                             {"kind", e.kind},
                             {"seed", e.seed},
                             {"sample_rate_hz", e.sample_rate_hz},
                             {"sha256", e.sha256}});
  }
  write_text_file(path, j.dump(2) + "\n");
}

Manifest read_manifest(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(detail::read_file_bytes(path.string()));
  } catch (const std::exception& e) {
    throw DataError("cannot parse manifest " + path.string() + ": " + e.what());
  }
  Manifest m;
  m.format_version = j.at("format_version").get<int>();
  m.layout = layout_from_json(j.at("layout"));
  std::set<std::string> ids;
  for (const auto& e : j.at("episodes")) {
    ManifestEntry entry;
    entry.episode_id = e.at("episode_id").get<std::string>();
    entry.path = e.at("path").get<std::string>();
    entry.texture = e.at("texture").get<std::string>();
    entry.nominal_velocity_mm_s = e.at("nominal_velocity_mm_s").get<double>();
    entry.kind = e.at("kind").get<std::string>();
    entry.seed = e.at("seed").get<uint64_t>();
    entry.sample_rate_hz = e.at("sample_rate_hz").get<double>();
    entry.sha256 = e.at("sha256").get<std::string>();
    if (!ids.insert(entry.episode_id).second) {
      throw DataError("duplicate episode_id in manifest: " + entry.episode_id);
    }
    m.episodes.push_back(std::move(entry));
  }
  return m;
}

DragEpisode load_manifest_episode(const std::filesystem::path& manifest_path,
                                  const ManifestEntry& entry, bool verify_hash) {
  const auto file = manifest_path.parent_path() / entry.path;
  if (verify_hash) {
    const std::string actual = sha256_file(file);
    if (actual != entry.sha256) {
      throw DataError("content hash mismatch for " + entry.episode_id + " (" +
                      file.string() + ")");
    }
  }
  return read_episode(file);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  detail::write_file_bytes(path.string(), text);
}

}  // namespace micarray::io

namespace micarray {

std::string to_string(EpisodeKind kind) {
  return kind == EpisodeKind::drag ? "drag" : "tap";
}

EpisodeKind episode_kind_from_string(const std::string& s) {
  if (s == "drag") return EpisodeKind::drag;
  if (s == "tap") return EpisodeKind::tap;
  throw std::invalid_argument("unknown episode kind: " + s);
}

}  // namespace micarray
