// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "pwssim/algos/algos.hpp"
#include "pwssim/compute/descriptor.hpp"
#include "pwssim/compute/layout.hpp"
#include "pwssim/sched/runtime.hpp"

using namespace pwssim;
using compute::JobKind;

namespace {

mem::MachineConfig mc(int p, std::uint64_t M = 1024, std::uint64_t B = 8) {
  mem::MachineConfig c;
  c.p = p;
  c.M = M;
  c.B = B;
  return c;
}

sched::RuntimeConfig rc(sched::SchedKind s, bool padded = false) {
  sched::RuntimeConfig r;
  r.sched = s;
  r.padded = padded;
  r.record_tasks = true;
  r.task_events = true;
  return r;
}

class OnesKernel final : public compute::RangeKernel {
 public:
  explicit OnesKernel(Addr out) : out_(out) {}
  void leaf(compute::Ctx& c, std::uint64_t i, Addr) override { c.wr(out_ + i, 1); }

 private:
  Addr out_;
};

struct Leaf final : compute::BaseJob {
  Addr at;
  explicit Leaf(Addr a) : at(a) {}
  std::uint64_t size() const override { return 1; }
  void run(compute::Ctx& c) override { c.wr(at, 1); }
};

// Two msum passes one after the other.
struct TwoStage final : compute::SeqJob {
  Addr in, out;
  std::uint64_t n;
  TwoStage(Addr i, Addr o, std::uint64_t k) : in(i), out(o), n(k) {}
  std::uint64_t size() const override { return n; }
  int stages() const override { return 2; }
  compute::JobPtr stage(int k, Addr) const override { return algos::msum_job(in, n, out + k); }
};

std::vector<sched::TaskRecord> run_records(compute::JobPtr root, int p, sched::SchedKind s, bool padded,
                                           mem::Machine& m, sched::RunStats* stats = nullptr) {
  sched::Runtime rt(m, rc(s, padded));
  auto st = rt.run(std::move(root));
  if (stats) *stats = st;
  (void)p;
  return rt.tasks();
}

std::map<std::uint64_t, const sched::TaskRecord*> by_id(const std::vector<sched::TaskRecord>& v) {
  std::map<std::uint64_t, const sched::TaskRecord*> m;
  for (const auto& t : v) m[t.id] = &t;
  return m;
}

}  // namespace

TEST_CASE("BP tree over 8 items halves down to single leaves") {
  mem::Machine m(mc(1));
  auto in = m.alloc(0, 8), out = m.alloc(0, 1);
  auto recs = run_records(algos::msum_job(in.base, 8, out.base), 1, sched::SchedKind::Seq, false, m);
  std::multiset<std::uint64_t> sizes;
  int depth_levels = 0;
  std::set<int> prios;
  for (const auto& t : recs)
    if (t.kind == JobKind::BpFork || t.kind == JobKind::BpLeaf) {
      sizes.insert(t.size);
      prios.insert(t.priority);
    }
  std::multiset<std::uint64_t> want = {8, 4, 4, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(sizes == want);
  depth_levels = static_cast<int>(prios.size());
  CHECK(depth_levels == 4);
}

TEST_CASE("BP tree over one item is a single leaf") {
  mem::Machine m(mc(1));
  auto out = m.alloc(0, 1);
  auto root = compute::build_bp({}, std::make_shared<OnesKernel>(out.base), 1);
  CHECK(root->kind() == JobKind::BpLeaf);
  auto recs = run_records(std::move(root), 1, sched::SchedKind::Seq, false, m);
  CHECK(recs.size() == 1);
  CHECK(m.peek(out.base) == 1);
}

TEST_CASE("balance condition on a six item tree") {
  compute::BPDescriptor d;
  CHECK_NOTHROW(d.check_balance(6));
  CHECK(compute::RangeNode::split(0, 6) == 3);
  compute::BPDescriptor tight;
  tight.c1 = 0.9;
  tight.c2 = 1.1;
  CHECK_THROWS_AS(tight.check_balance(6), ConfigError);
  compute::BPDescriptor bad;
  bad.c1 = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("priorities decrease with depth and the root is highest") {
  mem::Machine m(mc(1));
  auto in = m.alloc(0, 64), out = m.alloc(0, 1);
  auto recs = run_records(algos::msum_job(in.base, 64, out.base), 1, sched::SchedKind::Seq, false, m);
  auto ids = by_id(recs);
  int root_prio = recs.front().priority;
  std::map<std::uint64_t, std::set<int>> prio_by_size;
  for (const auto& t : recs) {
    CHECK(t.priority <= root_prio);
    if (t.parent) CHECK(t.priority < ids.at(t.parent)->priority);
    prio_by_size[t.size].insert(t.priority);
  }
  for (const auto& [size, ps] : prio_by_size) CHECK(ps.size() == 1);
}

TEST_CASE("fanout of four uses two fork levels") {
  mem::Machine m(mc(1));
  auto out = m.alloc(0, 4);
  Addr base = out.base;
  auto root = compute::make_fanout([base](std::uint64_t i) -> compute::JobPtr {
    return std::make_unique<Leaf>(base + i);
  }, 4);
  auto recs = run_records(std::move(root), 1, sched::SchedKind::Seq, false, m);
  std::set<int> fan_prios, leaf_prios;
  for (const auto& t : recs) (t.kind == JobKind::Fanout ? fan_prios : leaf_prios).insert(t.priority);
  CHECK(fan_prios.size() == 2);
  CHECK(leaf_prios.size() == 1);
  CHECK(*leaf_prios.begin() < *fan_prios.begin());
  for (int i = 0; i < 4; ++i) CHECK(m.peek(base + i) == 1);
}

TEST_CASE("sequenced stages lie strictly below earlier stages") {
  mem::Machine m(mc(1));
  auto in = m.alloc(0, 16), out = m.alloc(0, 2);
  auto recs = run_records(std::make_unique<TwoStage>(in.base, out.base, 16), 1, sched::SchedKind::Seq, false, m);
  auto ids = by_id(recs);
  // stage roots are the children of the staged job, in start order
  std::vector<const sched::TaskRecord*> roots;
  for (const auto& t : recs)
    if (t.parent == recs.front().id) roots.push_back(&t);
  REQUIRE(roots.size() == 2);
  auto stage_of = [&](const sched::TaskRecord& t) -> int {
    for (auto* r = &t; r->parent; r = ids.at(r->parent))
      for (int k = 0; k < 2; ++k)
        if (r == roots[k]) return k;
    return -1;
  };
  int min0 = INT32_MAX, max1 = INT32_MIN;
  for (const auto& t : recs) {
    int s = stage_of(t);
    if (s == 0) min0 = std::min(min0, t.priority);
    if (s == 1) max1 = std::max(max1, t.priority);
  }
  CHECK(max1 < min0);
}

TEST_CASE("unpadded frames are adjacent; padded frames leave a sqrt gap") {
  for (bool padded : {false, true}) {
    mem::Machine m(mc(1));
    auto in = m.alloc(0, 512), out = m.alloc(0, 1);
    auto recs = run_records(algos::msum_job(in.base, 512, out.base), 1, sched::SchedKind::Seq, padded, m);
    auto ids = by_id(recs);
    int checked = 0;
    for (const auto& t : recs) {
      if (!t.parent) continue;
      const auto& par = *ids.at(t.parent);
      if (t.kind != JobKind::BpFork || par.kind != JobKind::BpFork || t.stack != par.stack) continue;
      // left children start on top of their parent's frame
      if (t.start < par.start || t.frame < par.frame) continue;
      Addr top = par.frame + par.frame_words;
      if (t.frame - top > 64) continue;  // a right child started after its sibling
      std::uint64_t gap = padded ? static_cast<std::uint64_t>(std::ceil(std::sqrt(double(t.size)))) : 0;
      CHECK(t.frame - top == gap);
      if (padded && t.size == 256) CHECK(t.frame - top == 16);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("pop restores the stack top: siblings reuse the same frame") {
  mem::Machine m(mc(1));
  auto in = m.alloc(0, 16), out = m.alloc(0, 1);
  auto recs = run_records(algos::msum_job(in.base, 16, out.base), 1, sched::SchedKind::Seq, false, m);
  std::map<std::uint64_t, std::vector<const sched::TaskRecord*>> kids;
  for (const auto& t : recs)
    if (t.parent) kids[t.parent].push_back(&t);
  int pairs = 0;
  for (const auto& [p, v] : kids)
    if (v.size() == 2 && v[0]->size == v[1]->size) {
      CHECK(v[0]->frame == v[1]->frame);
      ++pairs;
    }
  CHECK(pairs > 0);
}

TEST_CASE("in-order output layout") {
  using namespace compute;
  std::set<std::uint64_t> pos;
  for (std::uint64_t i = 0; i < 4; ++i) pos.insert(inorder_leaf(i));
  pos.insert(inorder_node(0, 4));
  pos.insert(inorder_node(0, 2));
  pos.insert(inorder_node(2, 4));
  CHECK(pos == std::set<std::uint64_t>{0, 1, 2, 3, 4, 5, 6});
  CHECK(inorder_cells(4) == 7);
  CHECK(inorder_cells(1) == 1);
}

TEST_CASE("large subtrees write at least B apart") {
  using namespace compute;
  const std::uint64_t n = 200, B = 8;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> big;  // (pos, leaves)
  std::function<void(std::uint64_t, std::uint64_t)> walk = [&](std::uint64_t lo, std::uint64_t hi) {
    if (hi - lo < 2) return;
    if (hi - lo > B) big.emplace_back(inorder_node(lo, hi), hi - lo);
    std::uint64_t mid = RangeNode::split(lo, hi);
    walk(lo, mid);
    walk(mid, hi);
  };
  walk(0, n);
  REQUIRE(big.size() > 4);
  for (std::size_t i = 0; i < big.size(); ++i)
    for (std::size_t j = i + 1; j < big.size(); ++j) {
      auto a = big[i].first, b = big[j].first;
      CHECK((a > b ? a - b : b - a) >= B);
    }
}

TEST_CASE("bit-interleaved index maps") {
  using namespace compute;
  CHECK(bi_index(0, 0) == 0);
  CHECK(bi_index(0, 1) == 1);
  CHECK(bi_index(1, 0) == 2);
  CHECK(bi_index(1, 1) == 3);
  for (std::uint64_t r = 0; r < 16; ++r)
    for (std::uint64_t c = 0; c < 16; ++c) {
      auto i = bi_index(r, c);
      CHECK(bi_coords(i) == std::make_pair(r, c));
      CHECK(bi_transpose(i) == bi_index(c, r));
    }
}

TEST_CASE("HBP descriptors") {
  auto s = algos::describe(algos::find("strassen"), 64);
  CHECK(s.rounds == 1);
  CHECK(s.fanout == 7);
  CHECK(s.child_size == s.size / 4);
  auto f = algos::describe(algos::find("fft"), 1 << 12);
  CHECK(f.rounds == 2);
  CHECK(f.fanout == 64);
  CHECK(f.child_size == 64);
  CHECK(algos::describe(algos::find("strassen"), 8).type == 0);
  CHECK(algos::describe(algos::find("fft"), 8).type == 0);
  compute::HBPDescriptor bad;
  bad.fanout = 4;
  bad.child_size = 100;
  bad.size = 16;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("joins: usurpation only when a non-forker finishes last") {
  {
    mem::Machine m(mc(1));
    auto in = m.alloc(0, 256), out = m.alloc(0, 1);
    sched::RunStats st;
    run_records(algos::msum_job(in.base, 256, out.base), 1, sched::SchedKind::Seq, false, m, &st);
    CHECK(st.usurpations == 0);
    CHECK(st.steals == 0);
  }
  mem::Machine m(mc(4));
  auto in = m.alloc(0, 4096), out = m.alloc(0, 1);
  sched::Runtime rt(m, rc(sched::SchedKind::Pws));
  const auto& st = rt.run(algos::msum_job(in.base, 4096, out.base));
  CHECK(st.steals > 0);
  auto ids = by_id(rt.tasks());
  std::uint64_t usurp = 0;
  for (const auto& e : rt.task_events())
    if (e.event == sched::TaskEvent::Usurp) {
      ++usurp;
      CHECK(ids.at(e.task)->core != e.core);
    }
  CHECK(usurp == st.usurpations);
}
