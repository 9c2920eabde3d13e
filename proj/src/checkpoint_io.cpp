// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>

#include "binary_io.hpp"
#include "micarray/io.hpp"
#include "micarray/run_config.hpp"

namespace micarray::io {

namespace {

using nlohmann::json;
constexpr char kCheckpointMagic[9] = "MICACP01";

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  json tensors = json::array();
  ckpt.params.for_each_tensor([&](const std::string& name, const auto& t) {
    tensors.push_back({{"name", name},
                       {"rows", t.rows()},
                       {"cols", t.cols()}});
  });
  const json header{{"format_version", 1},
                    {"model", model_config_to_json(ckpt.config)},
                    {"seed", ckpt.seed},
                    {"dtype", "f32le"},
                    {"order", "column-major"},
                    {"tensors", std::move(tensors)}};
  const std::string header_str = header.dump();

  std::string out;
  out.append(kCheckpointMagic, 8);
  detail::put_u32(out, static_cast<uint32_t>(header_str.size()));
  out += header_str;
  ckpt.params.for_each_tensor([&](const std::string&, const auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      detail::put_f32(out, static_cast<float>(t.data()[i]));
    }
  });
  detail::write_file_bytes(path.string(), out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file_bytes(path.string());
  detail::Reader reader(bytes.data(), bytes.size());
  if (reader.bytes(8) != std::string(kCheckpointMagic, 8)) {
    throw DataError("not a checkpoint file: " + path.string());
  }
  const json header = json::parse(reader.bytes(reader.u32()));
  if (header.at("format_version").get<int>() != 1) {
    throw DataError("unsupported checkpoint format version in " + path.string());
  }

  Checkpoint ckpt;
  ckpt.config = model_config_from_json(header.at("model"));
  ckpt.seed = header.at("seed").get<uint64_t>();
  ckpt.params = nn::make_params<float>(ckpt.config);

  size_t i = 0;
  const auto& tensors = header.at("tensors");
  ckpt.params.for_each_tensor([&](const std::string& name, auto& t) {
    if (i >= tensors.size()) throw DataError("checkpoint tensor list too short");
    const auto& desc = tensors[i++];
    if (desc.at("name").get<std::string>() != name ||
        desc.at("rows").get<Eigen::Index>() != t.rows() ||
        desc.at("cols").get<Eigen::Index>() != t.cols()) {
      throw DataError("checkpoint tensor mismatch at " + name);
    }
    for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = reader.f32();
  });
  if (i != tensors.size() || reader.remaining() != 0) {
    throw DataError("checkpoint payload size mismatch in " + path.string());
  }
  return ckpt;
}

}  // namespace micarray::io
