// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "pwssim/algos/algos.hpp"
#include "pwssim/compute/layout.hpp"

namespace pwssim::algos::oracle {

using compute::bi_coords;
using compute::bi_index;

std::vector<Word> prefix_sums(const std::vector<Word>& a) {
  std::vector<Word> out(a.size());
  Word s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s += a[i];
  return out;
}

std::vector<Word> transpose_bi(const std::vector<Word>& a, std::uint64_t side) {
  std::vector<Word> out(a.size());
  for (std::uint64_t r = 0; r < side; ++r)
    for (std::uint64_t c = 0; c < side; ++c) out[bi_index(c, r)] = a[bi_index(r, c)];
  return out;
}

std::vector<Word> rm_to_bi(const std::vector<Word>& a, std::uint64_t side) {
  std::vector<Word> out(a.size());
  for (std::uint64_t r = 0; r < side; ++r)
    for (std::uint64_t c = 0; c < side; ++c) out[bi_index(r, c)] = a[r * side + c];
  return out;
}

std::vector<Word> bi_to_rm(const std::vector<Word>& a, std::uint64_t side) {
  std::vector<Word> out(a.size());
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    auto [r, c] = bi_coords(i);
    out[r * side + c] = a[i];
  }
  return out;
}

std::vector<Word> matmul_bi(const std::vector<Word>& a, const std::vector<Word>& b, std::uint64_t side) {
  std::vector<Word> out(side * side, 0);
  for (std::uint64_t r = 0; r < side; ++r)
    for (std::uint64_t k = 0; k < side; ++k) {
      Word x = a[bi_index(r, k)];
      for (std::uint64_t c = 0; c < side; ++c) out[bi_index(r, c)] += x * b[bi_index(k, c)];
    }
  return out;
}

std::vector<cplx> dft(const std::vector<cplx>& x) {
  std::size_t n = x.size();
  std::vector<cplx> roots(n);
  for (std::size_t m = 0; m < n; ++m)
    roots[m] = std::polar(1.0, -2 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s = 0;
    for (std::size_t j = 0; j < n; ++j) s += x[j] * roots[j * k % n];
    out[k] = s;
  }
  return out;
}

}  // namespace pwssim::algos::oracle
