// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/model.hpp"

#include <stdexcept>

namespace micarray::nn {

std::string to_string(HeadKind head) {
  switch (head) {
    case HeadKind::classify: return "classify";
    case HeadKind::regress2: return "regress2";
    case HeadKind::regress1: return "regress1";
  }
  throw std::invalid_argument("unknown head kind");
}

HeadKind head_from_string(const std::string& s) {
  if (s == "classify") return HeadKind::classify;
  if (s == "regress2") return HeadKind::regress2;
  if (s == "regress1") return HeadKind::regress1;
  throw std::invalid_argument("unknown head kind: " + s);
}

}  // namespace micarray::nn
