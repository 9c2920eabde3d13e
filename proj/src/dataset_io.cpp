// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>

#include "binary_io.hpp"
#include "micarray/io.hpp"
#include "micarray/run_config.hpp"

namespace micarray::io {

namespace {

using nlohmann::json;
constexpr char kDatasetMagic[9] = "MICAWD01";

}  // namespace

void write_window_dataset(const std::filesystem::path& path,
                          const pipeline::WindowDataset& dataset) {
  json drags = json::array();
  for (const auto& d : dataset.drags) {
    std::vector<double> floor(d.noise_floor.data(), d.noise_floor.data() + kNumMics);
    drags.push_back({{"drag_id", d.drag_id},
                     {"episode_id", d.episode_id},
                     {"texture", d.texture},
                     {"nominal_velocity_mm_s", d.nominal_velocity_mm_s},
                     {"noise_floor", floor}});
  }
  const json header{{"format_version", 1},
                    {"task", dataset.task},
                    {"window_len", dataset.window_len},
                    {"offset", dataset.offset},
                    {"sample_rate_hz", dataset.sample_rate_hz},
                    {"layout", layout_to_json(dataset.layout)},
                    {"sample_count", dataset.samples.size()},
                    {"drags", std::move(drags)}};
  const std::string header_str = header.dump();

  std::string out;
  const size_t per_sample = 4 + 4 + 8 * 4 + 4ull * dataset.window_len * kNumMics;
  out.reserve(64 + header_str.size() + per_sample * dataset.samples.size());
  out.append(kDatasetMagic, 8);
  detail::put_u32(out, static_cast<uint32_t>(header_str.size()));
  out += header_str;

  for (const auto& s : dataset.samples) {
    detail::put_u32(out, s.drag_index);
    detail::put_u32(out, static_cast<uint32_t>(s.texture));
    detail::put_f64(out, s.pos_mm.x());
    detail::put_f64(out, s.pos_mm.y());
    detail::put_f64(out, s.vel_mm_s);
    detail::put_f64(out, s.nominal_velocity_mm_s);
    for (Eigen::Index r = 0; r < s.data.rows(); ++r) {
      for (int c = 0; c < kNumMics; ++c) detail::put_f32(out, s.data(r, c));
    }
  }
  detail::write_file_bytes(path.string(), out);
}

pipeline::WindowDataset read_window_dataset(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file_bytes(path.string());
  detail::Reader reader(bytes.data(), bytes.size());
  if (reader.bytes(8) != std::string(kDatasetMagic, 8)) {
    throw DataError("not a window dataset file: " + path.string());
  }
  const json header = json::parse(reader.bytes(reader.u32()));
  if (header.at("format_version").get<int>() != 1) {
    throw DataError("unsupported dataset format version in " + path.string());
  }

  pipeline::WindowDataset ds;
  ds.task = header.at("task").get<std::string>();
  ds.window_len = header.at("window_len").get<int>();
  ds.offset = header.at("offset").get<int>();
  ds.sample_rate_hz = header.at("sample_rate_hz").get<double>();
  ds.layout = layout_from_json(header.at("layout"));
  for (const auto& d : header.at("drags")) {
    pipeline::DragMeta meta;
    meta.drag_id = d.at("drag_id").get<std::string>();
    meta.episode_id = d.at("episode_id").get<std::string>();
    meta.texture = d.at("texture").get<int>();
    meta.nominal_velocity_mm_s = d.at("nominal_velocity_mm_s").get<double>();
    const auto floor = d.at("noise_floor").get<std::vector<double>>();
    for (int i = 0; i < kNumMics; ++i) meta.noise_floor(i) = floor.at(i);
    ds.drags.push_back(std::move(meta));
  }

  const size_t count = header.at("sample_count").get<size_t>();
  ds.samples.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    pipeline::WindowSample s;
    s.drag_index = reader.u32();
    s.texture = static_cast<int>(reader.u32());
    const double x = reader.f64();
    const double y = reader.f64();
    s.pos_mm = {x, y};
    s.vel_mm_s = reader.f64();
    s.nominal_velocity_mm_s = reader.f64();
    s.data.resize(ds.window_len, kNumMics);
    for (int r = 0; r < ds.window_len; ++r) {
      for (int c = 0; c < kNumMics; ++c) s.data(r, c) = reader.f32();
    }
    if (s.drag_index >= ds.drags.size()) {
      throw DataError("dataset sample references unknown drag");
    }
    ds.samples.push_back(std::move(s));
  }
  if (reader.remaining() != 0) {
    throw DataError("trailing bytes in dataset file " + path.string());
  }
  return ds;
}

}  // namespace micarray::io
