// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "micarray/pipeline.hpp"
#include "micarray/train.hpp"

namespace micarray::harness {

struct Fold {
  std::vector<uint32_t> train_drags;
  std::vector<uint32_t> val_drags;
  std::vector<uint32_t> test_drags;
  std::optional<double> held_out_velocity_mm_s;
};

struct SplitPlan {
  std::string task;
  std::vector<Fold> folds;
};

/// One fold per held-out velocity: the fold's test set is every drag at that
/// velocity; the remaining drags split 90/10 into train/val by drag.
/// Throws DataError when the dataset lacks one of the velocities.
SplitPlan make_held_out_velocity_splits(
    const pipeline::WindowDataset& dataset,
    const std::vector<double>& velocities = {20, 30, 40, 50, 60},
    double val_frac = 0.1, uint64_t seed = 42);

/// `rounds` folds with disjoint test sets covering every drag, stratified so
/// each test set draws from every velocity. Throws DataError when any
/// velocity has fewer drags than `rounds`.
SplitPlan make_velocity_cv_splits(const pipeline::WindowDataset& dataset,
                                  int rounds = 10, double val_frac = 0.1,
                                  uint64_t seed = 42);

/// Expands a fold's drag sets into window-sample indices.
nn::FoldIndices fold_window_indices(const pipeline::WindowDataset& dataset,
                                    const Fold& fold);

/// Asserts the fold invariants: no drag is in more than one of
/// train/val/test and held-out test sets are velocity-pure. Throws
/// DataError on violation.
void check_split_hygiene(const pipeline::WindowDataset& dataset,
                         const SplitPlan& plan);

}  // namespace micarray::harness
