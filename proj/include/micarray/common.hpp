// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace micarray {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using MatU16 = Eigen::Matrix<uint16_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr int kNumMics = 10;

/// Raised when an input file, manifest, or dataset is malformed or
/// inconsistent (CLI exit code 2).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a computation produces non-finite values or diverges
/// (CLI exit code 3).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace micarray
