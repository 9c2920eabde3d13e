// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>

namespace micarray {

enum class TextureId { a = 0, b = 1, c = 2, d = 3 };

inline constexpr int kNumTextures = 4;

/// Hemispherical-bump indenter texture. The flat texture (a) has zero
/// spacing and zero diameter; for the others the bump diameter follows
/// spacing * sqrt(2/pi), which keeps the contact area constant across
/// textures.
struct TextureSpec {
  TextureId id;
  double bump_spacing_mm;
  double bump_diameter_mm;

  bool flat() const { return bump_spacing_mm == 0.0; }
};

TextureSpec texture_spec(TextureId id);
TextureId texture_from_string(const std::string& name);
std::string to_string(TextureId id);

}  // namespace micarray
