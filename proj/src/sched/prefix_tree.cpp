// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "pwssim/sched/runtime.hpp"

namespace pwssim::sched {

PrefixTree::PrefixTree(int p) : p_(p), width_(1), depth_(0) {
  if (p < 1) throw ConfigError("prefix tree needs p >= 1");
  while (width_ < p) {
    width_ *= 2;
    ++depth_;
  }
  node_.assign(2 * width_, 0);
}

int PrefixTree::ranks(const std::vector<std::uint8_t>& flags, std::vector<int>& rank, int& total) {
  int steps = 0;
  // Each core writes its leaf.
  for (int i = 0; i < width_; ++i) node_[width_ + i] = i < p_ ? flags[i] : 0;
  ++steps;
  // Up-sweep: one tree level per step.
  for (int lvl = depth_ - 1; lvl >= 0; --lvl) {
    for (int i = 1 << lvl; i < (2 << lvl); ++i) node_[i] = node_[2 * i] + node_[2 * i + 1];
    ++steps;
  }
  total = node_[1];
  // Down-sweep: exclusive prefixes, one level per step.
  std::vector<int> pre(2 * width_, 0);
  for (int lvl = 0; lvl < depth_; ++lvl) {
    for (int i = 1 << lvl; i < (2 << lvl); ++i) {
      pre[2 * i] = pre[i];
      pre[2 * i + 1] = pre[i] + node_[2 * i];
    }
    ++steps;
  }
  rank.assign(p_, 0);
  for (int i = 0; i < p_; ++i) rank[i] = pre[width_ + i];
  return steps;
}

Matching match_requests(PrefixTree& tree, const std::vector<std::uint8_t>& want,
                        const std::vector<std::uint8_t>& has) {
  Matching m;
  std::vector<int> trank, vrank;
  int s1 = tree.ranks(want, trank, m.thieves);
  int s2 = tree.ranks(has, vrank, m.tasks);
  m.steps = std::max(s1, s2) + 1;
  std::vector<CoreId> thief_at(m.thieves), victim_at(m.tasks);
  for (int c = 0; c < tree.leaves(); ++c) {
    if (want[c]) thief_at[trank[c]] = c;
    if (has[c]) victim_at[vrank[c]] = c;
  }
  for (int i = 0; i < std::min(m.thieves, m.tasks); ++i) m.pairs.emplace_back(thief_at[i], victim_at[i]);
  return m;
}

int pws_steps_per_phase(int p) {
  PrefixTree t(p);
  std::vector<std::uint8_t> f(p, 1);
  std::vector<int> r;
  int total = 0;
  int s = t.ranks(f, r, total);
  // Steal tree and task tree run side by side, then one matching step.
  return s + 1;
}

}  // namespace pwssim::sched
