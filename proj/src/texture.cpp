// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/texture.hpp"

#include <stdexcept>

namespace micarray {

namespace {
constexpr double kSpacingMm[kNumTextures] = {0.0, 1.5, 3.0, 4.5};
}

TextureSpec texture_spec(TextureId id) {
  const int idx = static_cast<int>(id);
  if (idx < 0 || idx >= kNumTextures) {
    throw std::invalid_argument("unknown texture id");
  }
  const double spacing = kSpacingMm[idx];
  return TextureSpec{id, spacing, spacing * std::sqrt(2.0 / M_PI)};
}

TextureId texture_from_string(const std::string& name) {
  if (name == "a") return TextureId::a;
  if (name == "b") return TextureId::b;
  if (name == "c") return TextureId::c;
  if (name == "d") return TextureId::d;
  throw std::invalid_argument("unknown texture id: " + name);
}

std::string to_string(TextureId id) {
  switch (id) {
    case TextureId::a: return "a";
    case TextureId::b: return "b";
    case TextureId::c: return "c";
    case TextureId::d: return "d";
  }
  throw std::invalid_argument("unknown texture id");
}

}  // namespace micarray
