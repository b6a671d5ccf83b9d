// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "pwssim/compute/job.hpp"

namespace pwssim::compute {

enum class FTag : std::uint8_t { Const, Sqrt };
enum class LTag : std::uint8_t { Const, Sqrt, Gap };

const char* to_string(FTag t);
const char* to_string(LTag t);
double eval(FTag t, double r);
double eval(LTag t, double r);

struct BPDescriptor {
  double alpha = 0.5;
  double c1 = 0.5;
  double c2 = 2.0;
  FTag f = FTag::Const;
  LTag L = LTag::Const;
  bool padded = false;

  void validate() const;
  /// Throws if some task of the ceil-split tree over n items falls outside
  /// [c1 * alpha^i * n, c2 * alpha^i * n] at its level i.
  void check_balance(std::uint64_t n) const;
};

/// Validates `desc` and the tree over [0, n), then returns its root.
JobPtr build_bp(const BPDescriptor& desc, std::shared_ptr<RangeKernel> kernel, std::uint64_t n,
                Addr link = kNoAddr);

struct HBPDescriptor {
  int type = 1;
  int rounds = 1;                  // c: successive recursive collections
  std::uint64_t fanout = 0;        // v(n)
  std::uint64_t child_size = 0;    // s(n)
  std::uint64_t size = 0;          // n
  bool linear_space = false;

  void validate() const;
};

}  // namespace pwssim::compute
