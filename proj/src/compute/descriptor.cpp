// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pwssim/compute/descriptor.hpp"

#include <cmath>
#include <sstream>

namespace pwssim::compute {

const char* to_string(FTag t) { return t == FTag::Const ? "const" : "sqrt"; }

const char* to_string(LTag t) {
  switch (t) {
    case LTag::Const: return "const";
    case LTag::Sqrt: return "sqrt";
    case LTag::Gap: return "gap";
  }
  return "?";
}

double eval(FTag t, double r) { return t == FTag::Const ? 1.0 : std::sqrt(r); }

double eval(LTag t, double r) { return t == LTag::Const ? 1.0 : std::sqrt(r); }

void BPDescriptor::validate() const {
  if (!(alpha >= 0.5 && alpha < 1.0)) throw ConfigError("BP alpha must lie in [1/2, 1)");
  if (!(c1 > 0 && c1 <= 1.0 && c2 >= 1.0)) throw ConfigError("BP constants need 0 < c1 <= 1 <= c2");
}

void BPDescriptor::check_balance(std::uint64_t n) const {
  if (n < 1) throw ConfigError("BP input must be non-empty");
  // A ceil-split tree has at most two distinct sizes per level.
  std::uint64_t small = n, large = n;
  double scale = static_cast<double>(n);
  for (int level = 0; large > 1; ++level) {
    for (std::uint64_t s : {small, large}) {
      if (s < c1 * scale - 1e-9 || s > c2 * scale + 1e-9) {
        std::ostringstream os;
        os << "unbalanced BP tree: size " << s << " at level " << level << " for n=" << n;
        throw ConfigError(os.str());
      }
    }
    std::uint64_t ns = small / 2 > 0 ? small / 2 : 1;
    std::uint64_t nl = (large + 1) / 2;
    small = ns;
    large = nl;
    scale *= alpha;
  }
}

JobPtr build_bp(const BPDescriptor& desc, std::shared_ptr<RangeKernel> kernel, std::uint64_t n,
                Addr link) {
  desc.validate();
  desc.check_balance(n);
  return std::make_unique<RangeNode>(std::move(kernel), 0, n, link);
}

void HBPDescriptor::validate() const {
  if (type < 0 || rounds < 1) throw ConfigError("HBP needs type >= 0 and at least one collection");
  if (type == 0) return;
  if (fanout < 1 || child_size < 1) throw ConfigError("HBP fanout and child size must be >= 1");
  if (type >= 2 && child_size >= size) throw ConfigError("HBP subproblems must shrink");
  if (fanout * child_size > 2 * size) throw ConfigError("HBP subproblems exceed twice the task size");
}

}  // namespace pwssim::compute
