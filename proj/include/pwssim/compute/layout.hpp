// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>

namespace pwssim::compute {

/// Bit-interleaved index of (row, col): at each bit position the row bit is
/// placed above the column bit, giving quadrant order TL, TR, BL, BR.
constexpr std::uint64_t bi_index(std::uint64_t row, std::uint64_t col) {
  std::uint64_t out = 0;
  for (int b = 0; b < 32; ++b) {
    out |= ((col >> b) & 1u) << (2 * b);
    out |= ((row >> b) & 1u) << (2 * b + 1);
  }
  return out;
}

/// Inverse of bi_index: returns (row, col).
constexpr std::pair<std::uint64_t, std::uint64_t> bi_coords(std::uint64_t i) {
  std::uint64_t r = 0, c = 0;
  for (int b = 0; b < 32; ++b) {
    c |= ((i >> (2 * b)) & 1u) << b;
    r |= ((i >> (2 * b + 1)) & 1u) << b;
  }
  return {r, c};
}

/// BI index of the transposed element.
constexpr std::uint64_t bi_transpose(std::uint64_t i) {
  constexpr std::uint64_t even = 0x5555555555555555ull;
  return ((i & even) << 1) | ((i >> 1) & even);
}

/// In-order position of the leaf i in the fork tree over [0, n): 2i.
constexpr std::uint64_t inorder_leaf(std::uint64_t i) { return 2 * i; }

/// In-order position of the internal node over [lo, hi) (hi - lo >= 2), whose
/// left child is [lo, mid) with mid = lo + ceil((hi - lo) / 2).
constexpr std::uint64_t inorder_node(std::uint64_t lo, std::uint64_t hi) {
  return 2 * (lo + (hi - lo + 1) / 2) - 1;
}

/// Number of cells of an in-order laid-out tree over n leaves.
constexpr std::uint64_t inorder_cells(std::uint64_t n) { return 2 * n - 1; }

}  // namespace pwssim::compute
