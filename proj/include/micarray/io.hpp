// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0
//
// On-disk formats. All containers are self-describing: an 8-byte magic, a
// little-endian u32 header length, a JSON header, then raw little-endian
// payload blocks. Round trips are bit-exact.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "micarray/episode.hpp"
#include "micarray/eval.hpp"
#include "micarray/geometry.hpp"
#include "micarray/model.hpp"
#include "micarray/pipeline.hpp"
#include "micarray/study.hpp"
#include "micarray/train.hpp"

namespace micarray::io {

// --- hashing ---------------------------------------------------------------

std::string sha256_hex(const void* data, size_t size);
std::string sha256_file(const std::filesystem::path& path);

// --- episode container -----------------------------------------------------

void write_episode(const std::filesystem::path& path, const DragEpisode& ep);
DragEpisode read_episode(const std::filesystem::path& path);

// --- dataset manifest ------------------------------------------------------

struct ManifestEntry {
  std::string episode_id;
  std::string path;  // relative to the manifest's directory
  std::string texture;
  double nominal_velocity_mm_s = 0.0;
  std::string kind;
  uint64_t seed = 0;
  double sample_rate_hz = 0.0;
  std::string sha256;
};

struct Manifest {
  int format_version = 1;
  SensorLayout layout;
  std::vector<ManifestEntry> episodes;
};

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

/// Reads the episode behind a manifest entry, verifying its content hash.
/// Throws DataError on mismatch.
DragEpisode load_manifest_episode(const std::filesystem::path& manifest_path,
                                  const ManifestEntry& entry,
                                  bool verify_hash = true);

// --- window dataset --------------------------------------------------------

void write_window_dataset(const std::filesystem::path& path,
                          const pipeline::WindowDataset& dataset);
pipeline::WindowDataset read_window_dataset(const std::filesystem::path& path);

// --- model checkpoint ------------------------------------------------------

struct Checkpoint {
  nn::ModelConfig config;
  nn::ModelParams<float> params;
  uint64_t seed = 0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// --- reports ---------------------------------------------------------------

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// 4x4 confusion matrix as a row-normalized SVG heatmap.
void write_confusion_svg(const std::filesystem::path& path,
                         const Eigen::Matrix4i& confusion,
                         const std::vector<std::string>& class_names);

void write_curves_csv(const std::filesystem::path& path,
                      const nn::TrainCurves& curves);

/// Response-time table: velocity rows x distance columns of "mean (std)"
/// cells, "-" for undetected cells, plus a per-cell detection-rate table.
void write_study_csv(const std::filesystem::path& path,
                     const detect::StudyTable& table);

}  // namespace micarray::io
