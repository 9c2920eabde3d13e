// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "micarray/geometry.hpp"
#include "micarray/texture.hpp"

using namespace micarray;

TEST_CASE("default layout places the inner square at (+-4, +-4)") {
  const SensorLayout layout = build_layout();
  std::set<std::pair<double, double>> inner;
  for (int i = 0; i < 4; ++i) {
    inner.insert({layout.mic_positions[i].x(), layout.mic_positions[i].y()});
  }
  const std::set<std::pair<double, double>> expected{
      {-4, -4}, {4, -4}, {4, 4}, {-4, 4}};
  CHECK(inner == expected);
}

TEST_CASE("inner pairwise distances are 8 or 8*sqrt(2)") {
  const SensorLayout layout = build_layout();
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double d = (layout.mic_positions[i] - layout.mic_positions[j]).norm();
      const bool side = std::abs(d - 8.0) < 1e-12;
      const bool diagonal = std::abs(d - 8.0 * std::sqrt(2.0)) < 1e-12;
      CHECK((side || diagonal));
    }
  }
}

TEST_CASE("every outer mic is exactly 9 mm from its nearest inner mic") {
  const SensorLayout layout = build_layout();
  for (int i = 4; i < kNumMics; ++i) {
    double nearest = 1e9;
    for (int j = 0; j < 4; ++j) {
      nearest = std::min(
          nearest, (layout.mic_positions[i] - layout.mic_positions[j]).norm());
    }
    CHECK(nearest == doctest::Approx(9.0).epsilon(1e-12));
  }
}

TEST_CASE("all mics lie inside the sensing area") {
  const SensorLayout layout = build_layout();
  for (const auto& p : layout.mic_positions) {
    CHECK(layout.contains(p));
  }
}

TEST_CASE("oversized inner square is rejected") {
  LayoutConfig config;
  config.inner_side_mm = 30.0;
  CHECK_THROWS_AS(build_layout(config), std::invalid_argument);
}

TEST_CASE("non-positive receptive decay is rejected") {
  LayoutConfig config;
  config.receptive_decay_mm = 0.0;
  CHECK_THROWS_AS(build_layout(config), std::invalid_argument);
}

TEST_CASE("layout construction is deterministic") {
  const SensorLayout a = build_layout();
  const SensorLayout b = build_layout();
  for (int i = 0; i < kNumMics; ++i) {
    CHECK(a.mic_positions[i] == b.mic_positions[i]);
  }
}

TEST_CASE("nearest_mic breaks ties toward the lowest index") {
  const SensorLayout layout = build_layout();
  CHECK(layout.nearest_mic(Vec2(0, 0)) == 0);  // equidistant from all four
  CHECK(layout.nearest_mic(layout.mic_positions[7]) == 7);
}

TEST_CASE("texture table follows the contact-area-preserving diameter rule") {
  const double k = std::sqrt(2.0 / M_PI);
  CHECK(texture_spec(TextureId::a).bump_spacing_mm == 0.0);
  CHECK(texture_spec(TextureId::a).bump_diameter_mm == 0.0);
  for (TextureId id : {TextureId::b, TextureId::c, TextureId::d}) {
    const TextureSpec spec = texture_spec(id);
    CHECK(spec.bump_spacing_mm > 0.0);
    CHECK(spec.bump_spacing_mm <= 4.5);
    CHECK(spec.bump_diameter_mm ==
          doctest::Approx(spec.bump_spacing_mm * k).epsilon(1e-15));
  }
  CHECK(texture_spec(TextureId::d).bump_spacing_mm == 4.5);
}
