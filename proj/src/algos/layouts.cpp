// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels.hpp"
#include "pwssim/compute/layout.hpp"

namespace pwssim::algos {

using compute::bi_coords;
using compute::bi_index;
using compute::bi_transpose;
using compute::make_fanout;
using compute::RangeNode;

namespace detail {

JobPtr map_job(std::uint64_t n, std::uint64_t words, MapKernel::Fn fn) {
  return std::make_unique<RangeNode>(std::make_shared<MapKernel>(std::move(fn), words), 0, n);
}

JobPtr copy_job(Addr in, Addr out, std::uint64_t n, unsigned w,
                std::function<std::uint64_t(std::uint64_t)> src,
                std::function<std::uint64_t(std::uint64_t)> dst) {
  return map_job(n, 2 * w, [=](Ctx& c, std::uint64_t i) {
    Addr s = in + src(i) * w, d = out + dst(i) * w;
    for (unsigned k = 0; k < w; ++k) c.wr(d + k, c.rd(s + k));
  });
}

JobPtr rm_to_tiled_job(Addr in, Addr out, Tiles t, unsigned w) {
  std::uint64_t s2 = t.s * t.s;
  return copy_job(
      in, out, t.elems(), w,
      [t, s2](std::uint64_t i) {
        std::uint64_t q = i / s2;
        auto [tr, tc] = bi_coords(i % s2);
        return ((q / t.gc) * t.s + tr) * t.cols + (q % t.gc) * t.s + tc;
      },
      [](std::uint64_t i) { return i; });
}

JobPtr mt_tiled_job(Addr in, Addr out, Tiles t, unsigned w) {
  std::uint64_t s2 = t.s * t.s;
  return copy_job(
      in, out, t.elems(), w, [](std::uint64_t i) { return i; },
      [t, s2](std::uint64_t i) {
        std::uint64_t q = i / s2;
        std::uint64_t dq = (q % t.gc) * t.gr + q / t.gc;
        return dq * s2 + bi_transpose(i % s2);
      });
}

JobPtr tiled_to_rm_job(Addr in, Addr out, Tiles t, unsigned w) {
  std::uint64_t s2 = t.s * t.s;
  std::uint64_t tiles = t.gr * t.gc;
  if (t.gc == 1) {
    return make_fanout(
        [=](std::uint64_t q) { return bi_to_rm_fft_job(in + q * s2 * w, out + q * s2 * w, t.s, w); },
        tiles);
  }
  return std::make_unique<Staged>(
      2 * t.elems() * w, t.elems() * w,
      std::vector<Staged::Builder>{
          [=](Addr tmp) {
            return make_fanout(
                [=](std::uint64_t q) {
                  return bi_to_rm_fft_job(in + q * s2 * w, tmp + q * s2 * w, t.s, w);
                },
                tiles);
          },
          [=](Addr tmp) {
            return copy_job(
                tmp, out, t.elems(), w,
                [t, s2](std::uint64_t j) {
                  std::uint64_t r = j / t.cols, c = j % t.cols;
                  std::uint64_t q = (r / t.s) * t.gc + c / t.s;
                  return q * s2 + (r % t.s) * t.s + c % t.s;
                },
                [](std::uint64_t j) { return j; });
          }});
}

JobPtr transpose_job(Addr in, Addr out, std::uint64_t rows, std::uint64_t cols, unsigned w) {
  Tiles src(rows, cols), dst(cols, rows);
  std::uint64_t words = rows * cols * w;
  return std::make_unique<Staged>(
      2 * words, 2 * words,
      std::vector<Staged::Builder>{
          [=](Addr s) { return rm_to_tiled_job(in, s, src, w); },
          [=](Addr s) { return mt_tiled_job(s, s + words, src, w); },
          [=](Addr s) { return tiled_to_rm_job(s + words, out, dst, w); }});
}

}  // namespace detail

using namespace detail;

JobPtr mt_bi_job(Addr in, Addr out, std::uint64_t side, unsigned w) {
  return copy_job(in, out, side * side, w, [](std::uint64_t i) { return i; },
                  [](std::uint64_t i) { return bi_transpose(i); });
}

JobPtr rm_to_bi_job(Addr in, Addr out, std::uint64_t side, unsigned w) {
  return copy_job(
      in, out, side * side, w,
      [side](std::uint64_t i) {
        auto [r, c] = bi_coords(i);
        return r * side + c;
      },
      [](std::uint64_t i) { return i; });
}

JobPtr bi_to_rm_direct_job(Addr in, Addr out, std::uint64_t side, unsigned w) {
  return copy_job(in, out, side * side, w, [](std::uint64_t i) { return i; },
                  [side](std::uint64_t i) {
                    auto [r, c] = bi_coords(i);
                    return r * side + c;
                  });
}

JobPtr bi_to_rm_fft_job(Addr in, Addr out, std::uint64_t side, unsigned w) {
  std::uint64_t n2 = side * side;
  if (side <= 4) {
    return std::make_unique<Leaf0>(2 * n2 * w, [=](Ctx& c) {
      for (std::uint64_t i = 0; i < n2; ++i) {
        auto [r, col] = bi_coords(i);
        for (unsigned k = 0; k < w; ++k) c.wr(out + (r * side + col) * w + k, c.rd(in + i * w + k));
      }
    });
  }
  std::uint64_t t = std::uint64_t{1} << (floor_log2(side) / 2);
  std::uint64_t t2 = t * t;
  std::uint64_t tiles = n2 / t2;
  return std::make_unique<Staged>(
      2 * n2 * w, n2 * w,
      std::vector<Staged::Builder>{
          [=](Addr tmp) {
            return make_fanout(
                [=](std::uint64_t q) { return bi_to_rm_fft_job(in + q * t2 * w, tmp + q * t2 * w, t, w); },
                tiles);
          },
          [=](Addr tmp) {
            return copy_job(
                tmp, out, n2, w,
                [=](std::uint64_t j) {
                  std::uint64_t r = j / side, c = j % side;
                  return bi_index(r / t, c / t) * t2 + (r % t) * t + c % t;
                },
                [](std::uint64_t j) { return j; });
          }});
}

std::uint64_t GapLayout::gap(std::uint64_t r) {
  if (r < 16) return 0;
  auto l = static_cast<std::uint64_t>(ceil_log2(r));
  return r / (l * l);
}

GapLayout::GapLayout(std::uint64_t side) : side_(side) {
  if (!is_pow2(side)) throw ConfigError("gapped layout needs a power-of-two side");
  colpos_ = {0};
  std::uint64_t width = 1;  // W(r): row width of a side-r subarray, trailing gaps included
  for (std::uint64_t r = 2; r <= side; r *= 2) {
    std::uint64_t h = r / 2, off = width + gap(h);
    std::vector<std::uint64_t> next(r);
    for (std::uint64_t c = 0; c < h; ++c) {
      next[c] = colpos_[c];
      next[c + h] = off + colpos_[c];
    }
    colpos_ = std::move(next);
    width = 2 * off;
  }
  stride_ = width + gap(side);
}

JobPtr bi_to_rm_gapped_job(Addr in, Addr gapped, Addr out, std::uint64_t side) {
  auto lay = std::make_shared<GapLayout>(side);
  std::uint64_t n2 = side * side;
  return std::make_unique<Staged>(
      2 * n2, 0,
      std::vector<Staged::Builder>{
          [=](Addr) {
            return copy_job(in, gapped, n2, 1, [](std::uint64_t i) { return i; },
                            [lay](std::uint64_t i) {
                              auto [r, c] = bi_coords(i);
                              return lay->offset(r, c);
                            });
          },
          [=](Addr) {
            return copy_job(gapped, out, n2, 1,
                            [lay, side](std::uint64_t j) { return lay->offset(j / side, j % side); },
                            [](std::uint64_t j) { return j; });
          }});
}

}  // namespace pwssim::algos
