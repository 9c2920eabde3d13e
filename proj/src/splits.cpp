// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "micarray/rng.hpp"

namespace micarray::harness {

namespace {

bool same_velocity(double a, double b) { return std::abs(a - b) < 1e-9; }

std::map<double, std::vector<uint32_t>> drags_by_velocity(
    const pipeline::WindowDataset& dataset) {
  std::map<double, std::vector<uint32_t>> by_vel;
  for (uint32_t i = 0; i < dataset.drags.size(); ++i) {
    by_vel[dataset.drags[i].nominal_velocity_mm_s].push_back(i);
  }
  return by_vel;
}

// Seeded 90/10-style split of `drags` into (train, val), at least one
// validation drag when there are two or more.
void split_train_val(std::vector<uint32_t> drags, double val_frac, Rng rng,
                     Fold& fold) {
  rng.shuffle(drags);
  size_t n_val = static_cast<size_t>(std::llround(drags.size() * val_frac));
  if (n_val == 0 && drags.size() >= 2) n_val = 1;
  fold.val_drags.assign(drags.begin(), drags.begin() + n_val);
  fold.train_drags.assign(drags.begin() + n_val, drags.end());
  std::sort(fold.val_drags.begin(), fold.val_drags.end());
  std::sort(fold.train_drags.begin(), fold.train_drags.end());
}

}  // namespace

SplitPlan make_held_out_velocity_splits(const pipeline::WindowDataset& dataset,
                                        const std::vector<double>& velocities,
                                        double val_frac, uint64_t seed) {
  const auto by_vel = drags_by_velocity(dataset);
  SplitPlan plan;
  plan.task = dataset.task;
  const Rng root(seed);

  for (size_t k = 0; k < velocities.size(); ++k) {
    const double held = velocities[k];
    Fold fold;
    fold.held_out_velocity_mm_s = held;
    std::vector<uint32_t> rest;
    bool found = false;
    for (const auto& [vel, drags] : by_vel) {
      if (same_velocity(vel, held)) {
        fold.test_drags = drags;
        found = true;
      } else {
        rest.insert(rest.end(), drags.begin(), drags.end());
      }
    }
    if (!found || fold.test_drags.empty()) {
      throw DataError("held-out velocity " + std::to_string(held) +
                      " mm/s not present in the dataset");
    }
    split_train_val(std::move(rest), val_frac, root.stream(k), fold);
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

SplitPlan make_velocity_cv_splits(const pipeline::WindowDataset& dataset,
                                  int rounds, double val_frac, uint64_t seed) {
  if (rounds < 2) throw std::invalid_argument("rounds must be >= 2");
  const auto by_vel = drags_by_velocity(dataset);
  for (const auto& [vel, drags] : by_vel) {
    if (static_cast<int>(drags.size()) < rounds) {
      throw DataError("velocity " + std::to_string(vel) + " mm/s has only " +
                      std::to_string(drags.size()) + " drags; need >= " +
                      std::to_string(rounds) + " for " +
                      std::to_string(rounds) + "-fold cross-validation");
    }
  }

  const Rng root(seed);
  // Stratified test chunks: shuffle each velocity's drags once, then deal
  // them round-robin into the `rounds` test sets.
  std::vector<std::vector<uint32_t>> tests(rounds);
  uint64_t stream = 0;
  for (const auto& [vel, drags] : by_vel) {
    std::vector<uint32_t> shuffled = drags;
    Rng rng = root.stream(stream++);
    rng.shuffle(shuffled);
    for (size_t i = 0; i < shuffled.size(); ++i) {
      tests[i % rounds].push_back(shuffled[i]);
    }
  }

  SplitPlan plan;
  plan.task = dataset.task;
  for (int k = 0; k < rounds; ++k) {
    Fold fold;
    fold.test_drags = tests[k];
    std::sort(fold.test_drags.begin(), fold.test_drags.end());
    std::vector<uint32_t> rest;
    for (int j = 0; j < rounds; ++j) {
      if (j == k) continue;
      rest.insert(rest.end(), tests[j].begin(), tests[j].end());
    }
    split_train_val(std::move(rest), val_frac, root.stream(1000 + k), fold);
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

nn::FoldIndices fold_window_indices(const pipeline::WindowDataset& dataset,
                                    const Fold& fold) {
  std::vector<uint8_t> role(dataset.drags.size(), 0);
  for (uint32_t d : fold.train_drags) role[d] = 1;
  for (uint32_t d : fold.val_drags) role[d] = 2;
  for (uint32_t d : fold.test_drags) role[d] = 3;
  nn::FoldIndices idx;
  for (int64_t i = 0; i < static_cast<int64_t>(dataset.samples.size()); ++i) {
    switch (role[dataset.samples[i].drag_index]) {
      case 1: idx.train.push_back(i); break;
      case 2: idx.val.push_back(i); break;
      case 3: idx.test.push_back(i); break;
      default: break;
    }
  }
  return idx;
}

void check_split_hygiene(const pipeline::WindowDataset& dataset,
                         const SplitPlan& plan) {
  for (size_t k = 0; k < plan.folds.size(); ++k) {
    const Fold& fold = plan.folds[k];
    std::set<uint32_t> seen;
    size_t total = 0;
    for (const auto* group :
         {&fold.train_drags, &fold.val_drags, &fold.test_drags}) {
      seen.insert(group->begin(), group->end());
      total += group->size();
    }
    if (seen.size() != total) {
      throw DataError("fold " + std::to_string(k) +
                      ": a drag appears in more than one of train/val/test");
    }
    if (fold.held_out_velocity_mm_s) {
      const double held = *fold.held_out_velocity_mm_s;
      for (uint32_t d : fold.test_drags) {
        if (!same_velocity(dataset.drags[d].nominal_velocity_mm_s, held)) {
          throw DataError("fold " + std::to_string(k) +
                          ": test drag at a non-held-out velocity");
        }
      }
      for (const auto* group : {&fold.train_drags, &fold.val_drags}) {
        for (uint32_t d : *group) {
          if (same_velocity(dataset.drags[d].nominal_velocity_mm_s, held)) {
            throw DataError("fold " + std::to_string(k) +
                            ": held-out velocity leaked into train/val");
          }
        }
      }
    }
  }
}

}  // namespace micarray::harness
