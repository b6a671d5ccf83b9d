// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "pwssim/metrics/metrics.hpp"

namespace pwssim::metrics {

using sched::TaskRecord;

namespace {

std::uint64_t floor_pow2(std::uint64_t x) { return x ? std::uint64_t{1} << floor_log2(x) : 0; }

void sort_unique(std::vector<BlockId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<StackDelay> stack_block_delay(const mem::Machine& m, const std::vector<TaskRecord>& tasks,
                                          std::uint64_t min_size) {
  std::vector<StackDelay> out;
  std::uint64_t B = m.block_words();
  std::map<int, std::vector<const TaskRecord*>> by_stack;
  for (const auto& r : tasks)
    if (r.start >= 0 && r.stack >= 0) by_stack[r.stack].push_back(&r);
  for (auto& [s, v] : by_stack)
    std::sort(v.begin(), v.end(), [](const TaskRecord* a, const TaskRecord* b) {
      return a->start != b->start ? a->start < b->start : a->id < b->id;
    });

  for (const auto& t : tasks) {
    if (t.start < 0 || t.finish < 0) continue;
    bool pick = min_size ? t.size > min_size : t.stolen;
    if (!pick) continue;
    std::vector<BlockId> blocks;
    auto add = [&](const TaskRecord& r) {
      for (Addr a = r.frame; a < r.frame + r.frame_words; a = (a / B + 1) * B) blocks.push_back(a / B);
    };
    if (min_size) {
      add(t);
    } else {
      const auto& v = by_stack[t.stack];
      auto it = std::lower_bound(v.begin(), v.end(), t.start,
                                 [](const TaskRecord* r, Tick x) { return r->start < x; });
      for (; it != v.end() && (*it)->start <= t.finish; ++it)
        if ((*it)->frame >= t.frame) add(**it);
    }
    sort_unique(blocks);
    StackDelay d{t.id, t.size, blocks.size(), 0};
    for (BlockId b : blocks) d.max_delay = std::max(d.max_delay, m.block_delay(b, t.start, t.finish));
    out.push_back(d);
  }
  return out;
}

BlockTouchRecorder::BlockTouchRecorder(const mem::Machine& m, const sched::Runtime& rt) : m_(m), rt_(rt) {}

void BlockTouchRecorder::on_access(CoreId core, Addr addr, bool is_write) {
  if (m_.is_stack(addr)) return;
  std::uint64_t id = rt_.current_task(core);
  BlockId b = m_.block_of(addr);
  Touch& t = own_[id];
  if (t.blocks.empty() || t.blocks.back() != b) t.blocks.push_back(b);
  if (is_write && (t.written.empty() || t.written.back() != b)) t.written.push_back(b);
  sorted_ = false;
}

const std::unordered_map<std::uint64_t, BlockTouchRecorder::Touch>& BlockTouchRecorder::own() const {
  if (!sorted_) {
    for (auto& [id, t] : own_) {
      sort_unique(t.blocks);
      sort_unique(t.written);
    }
    sorted_ = true;
  }
  return own_;
}

std::vector<SizeClassFL> estimate_fL(const BlockTouchRecorder& rec, const std::vector<TaskRecord>& tasks,
                                     std::uint64_t B, const FLOptions& opt) {
  const auto& own = rec.own();
  std::unordered_map<std::uint64_t, std::size_t> idx;
  for (std::size_t i = 0; i < tasks.size(); ++i) idx[tasks[i].id] = i;
  std::size_t N = tasks.size();
  std::vector<std::size_t> parent(N, N);
  std::vector<int> depth(N, 0);
  for (std::size_t i = 0; i < N; ++i) {
    auto it = idx.find(tasks[i].parent);
    if (tasks[i].parent && it != idx.end()) {
      parent[i] = it->second;
      depth[i] = depth[parent[i]] + 1;
    }
  }

  // distinct blocks per subtree, small-to-large merge in reverse creation order
  std::vector<std::uint64_t> touched(N, 0);
  {
    std::vector<std::unordered_set<BlockId>> sets(N);
    for (std::size_t i = N; i-- > 0;) {
      auto it = own.find(tasks[i].id);
      if (it != own.end()) sets[i].insert(it->second.blocks.begin(), it->second.blocks.end());
      touched[i] = sets[i].size();
      std::size_t p = parent[i];
      if (p == N) continue;
      if (sets[p].size() < sets[i].size()) std::swap(sets[p], sets[i]);
      sets[p].insert(sets[i].begin(), sets[i].end());
      std::unordered_set<BlockId>().swap(sets[i]);
    }
  }

  // blocks written by a task's subtree and by some parallel non-descendant
  std::vector<std::uint64_t> shared(N, 0);
  {
    std::unordered_map<BlockId, std::vector<std::size_t>> writers;
    for (const auto& [id, t] : own) {
      auto it = idx.find(id);
      if (it == idx.end()) continue;
      for (BlockId b : t.written) writers[b].push_back(it->second);
    }
    std::vector<std::uint64_t> stamp(N, 0);
    std::uint64_t cur = 0;
    for (auto& [b, ws] : writers) {
      if (ws.size() < 2) continue;
      ++cur;
      for (std::size_t w : ws)
        for (std::size_t v : ws) {
          if (w == v) continue;
          std::size_t x = w, y = v, cx = N, cy = N;
          while (depth[x] > depth[y]) cx = x, x = parent[x];
          while (depth[y] > depth[x]) cy = y, y = parent[y];
          while (x != y) cx = x, x = parent[x], cy = y, y = parent[y];
          if (cx == N || cy == N || !tasks[cx].forked || !tasks[cy].forked) continue;
          for (std::size_t z = w;; z = parent[z]) {
            if (stamp[z] != cur) {
              stamp[z] = cur;
              ++shared[z];
            }
            if (z == cx) break;
          }
        }
    }
  }

  std::map<std::uint64_t, SizeClassFL> cls;
  for (std::size_t i = 0; i < N; ++i) {
    const TaskRecord& t = tasks[i];
    if (opt.stolen_only && !t.stolen) continue;
    if (t.size == 0) continue;
    SizeClassFL& c = cls[floor_pow2(t.size)];
    c.r = floor_pow2(t.size);
    ++c.tasks;
    double r = static_cast<double>(t.size), blocks = static_cast<double>(touched[i]);
    c.f_hat = std::max(c.f_hat, blocks - r / static_cast<double>(B));
    double f = opt.f ? opt.f(r) : 1.0;
    c.f_ratio = std::max(c.f_ratio, blocks / (r / static_cast<double>(B) + f));
    c.l_hat = std::max(c.l_hat, shared[i]);
  }
  std::vector<SizeClassFL> out;
  for (auto& [r, c] : cls) out.push_back(c);
  return out;
}

}  // namespace pwssim::metrics
