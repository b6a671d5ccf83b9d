// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "pwssim/algos/algos.hpp"

namespace pwssim::algos::detail {

using compute::Ctx;
using compute::RangeKernel;

/// Leaf-only kernel calling fn(ctx, i) for every index.
class MapKernel final : public RangeKernel {
 public:
  using Fn = std::function<void(Ctx&, std::uint64_t)>;
  MapKernel(Fn fn, std::uint64_t words) : fn_(std::move(fn)), words_(words) {}
  std::uint64_t words_per_item() const override { return words_; }
  void leaf(Ctx& c, std::uint64_t i, Addr) override { fn_(c, i); }

 private:
  Fn fn_;
  std::uint64_t words_;
};

/// Balanced fork tree over [0, n) applying fn at the leaves.
JobPtr map_job(std::uint64_t n, std::uint64_t words, MapKernel::Fn fn);

/// out[dst(i)] = in[src(i)] for i in [0, n), w words per element.
JobPtr copy_job(Addr in, Addr out, std::uint64_t n, unsigned w,
                std::function<std::uint64_t(std::uint64_t)> src,
                std::function<std::uint64_t(std::uint64_t)> dst);

/// Staged job assembled from stage builders; each receives the scratch base.
class Staged final : public compute::SeqJob {
 public:
  using Builder = std::function<JobPtr(Addr scratch)>;
  Staged(std::uint64_t size, std::uint64_t scratch, std::vector<Builder> b)
      : size_(size), scratch_(scratch), builders_(std::move(b)) {}
  std::uint64_t size() const override { return size_; }
  std::uint64_t scratch() const override { return scratch_; }
  int stages() const override { return static_cast<int>(builders_.size()); }
  JobPtr stage(int k, Addr base) const override { return builders_[k](base); }

 private:
  std::uint64_t size_, scratch_;
  std::vector<Builder> builders_;
};

/// Type-0 base case.
class Leaf0 final : public compute::BaseJob {
 public:
  Leaf0(std::uint64_t size, std::function<void(Ctx&)> fn) : size_(size), fn_(std::move(fn)) {}
  std::uint64_t size() const override { return size_; }
  void run(Ctx& c) override { fn_(c); }

 private:
  std::uint64_t size_;
  std::function<void(Ctx&)> fn_;
};

/// Tiled-BI layout of a rows x cols matrix (rows, cols in {s, 2s} with
/// s = min): square s x s BI tiles stored in row-major tile order.
struct Tiles {
  std::uint64_t rows, cols, s, gr, gc;
  Tiles(std::uint64_t r, std::uint64_t c)
      : rows(r), cols(c), s(r < c ? r : c), gr(r / s), gc(c / s) {}
  std::uint64_t elems() const { return rows * cols; }
};

JobPtr rm_to_tiled_job(Addr in, Addr out, Tiles t, unsigned w);
JobPtr mt_tiled_job(Addr in, Addr out, Tiles t, unsigned w);
JobPtr tiled_to_rm_job(Addr in, Addr out, Tiles t, unsigned w);
/// Row-major rows x cols into row-major cols x rows.
JobPtr transpose_job(Addr in, Addr out, std::uint64_t rows, std::uint64_t cols, unsigned w);

}  // namespace pwssim::algos::detail
