// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <tuple>

#include "doctest.h"
#include "pwssim/algos/algos.hpp"
#include "pwssim/sched/runtime.hpp"

using namespace pwssim;
using sched::SchedKind;

namespace {

struct Trace final : mem::AccessObserver {
  std::vector<std::tuple<Addr, bool>> log;
  void on_access(CoreId, Addr a, bool w) override { log.emplace_back(a, w); }
};

struct Result {
  sched::RunStats stats;
  std::vector<sched::StealRecord> steals;
  std::vector<std::tuple<Addr, bool>> trace;
  mem::CoreCounters totals;
  bool ok = false;
};

Result run(const std::string& alg, std::uint64_t n, int p, SchedKind s, std::uint64_t seed = 1,
           bool stress = false, bool trace = false, std::uint64_t M = 4096, std::uint64_t B = 32) {
  mem::MachineConfig mc;
  mc.p = p;
  mc.M = M;
  mc.B = B;
  mem::Machine m(mc);
  algos::SetupOptions so;
  so.seed = seed;
  auto prob = algos::setup(algos::find(alg), m, n, so);
  sched::RuntimeConfig rc;
  rc.sched = s;
  rc.seed = seed;
  rc.stress = stress;
  sched::Runtime rt(m, rc);
  Trace tr;
  if (trace) m.set_observer(&tr);
  Result r;
  r.stats = rt.run(std::move(prob.root));
  m.set_observer(nullptr);
  r.steals = rt.steals();
  r.trace = std::move(tr.log);
  r.totals = m.totals();
  r.ok = prob.check(m).ok;
  return r;
}

}  // namespace

TEST_CASE("prefix tree ranks requests in core order") {
  sched::PrefixTree t(8);
  std::vector<int> rank;
  int total = 0;
  int steps = t.ranks({1, 0, 1, 1, 0, 0, 1, 0}, rank, total);
  CHECK(total == 4);
  CHECK(rank[0] == 0);
  CHECK(rank[2] == 1);
  CHECK(rank[3] == 2);
  CHECK(rank[6] == 3);
  CHECK(steps == 1 + 3 + 3);
}

TEST_CASE("phase matching: more tasks than thieves") {
  sched::PrefixTree t(8);
  auto m = sched::match_requests(t, {1, 0, 1, 0, 0, 1, 0, 0}, {0, 1, 1, 1, 1, 0, 1, 0});
  CHECK(m.thieves == 3);
  CHECK(m.tasks == 5);
  REQUIRE(m.pairs.size() == 3);
  CHECK(m.pairs[0] == std::make_pair(CoreId(0), CoreId(1)));
  CHECK(m.pairs[1] == std::make_pair(CoreId(2), CoreId(2)));
  CHECK(m.pairs[2] == std::make_pair(CoreId(5), CoreId(3)));
}

TEST_CASE("phase matching: more thieves than tasks") {
  sched::PrefixTree t(8);
  auto m = sched::match_requests(t, {1, 1, 0, 1, 1, 1, 0, 0}, {0, 0, 1, 0, 0, 0, 1, 1});
  CHECK(m.thieves == 5);
  CHECK(m.tasks == 3);
  CHECK(m.pairs.size() == 3);
  CHECK(m.thieves - static_cast<int>(m.pairs.size()) == 2);
}

TEST_CASE("phase length is 2 ceil(log p) + 2 steps") {
  CHECK(sched::pws_steps_per_phase(8) == 2 * 3 + 2);
  CHECK(sched::pws_steps_per_phase(16) == 2 * 4 + 2);
  CHECK(sched::pws_steps_per_phase(5) == 2 * 3 + 2);
  CHECK(sched::pws_steps_per_phase(1) == 2);
}

TEST_CASE("p = 1 schedulers replay the sequential memory trace") {
  for (const char* alg : {"msum", "prefix_sums", "strassen"}) {
    std::uint64_t n = std::string(alg) == "strassen" ? 16 : 1024;
    auto seq = run(alg, n, 1, SchedKind::Seq, 1, false, true);
    for (SchedKind s : {SchedKind::Pws, SchedKind::Rws}) {
      auto r = run(alg, n, 1, s, 1, false, true);
      CHECK(r.trace == seq.trace);
      CHECK(r.stats.steals == 0);
      CHECK(r.ok);
    }
  }
}

TEST_CASE("scan at p = 4: at most p - 1 steals per priority and 2 p D' attempts") {
  auto r = run("msum", 1 << 16, 4, SchedKind::Pws);
  CHECK(r.ok);
  CHECK(r.stats.steals > 0);
  for (const auto& [prio, k] : r.stats.steals_per_priority) CHECK(k <= 3);
  CHECK(r.stats.attempts <= 2 * 4 * r.stats.rounds);
  CHECK(r.stats.violations.total() == 0);
  CHECK(r.stats.pseudo_steals == 0);
}

TEST_CASE("round priorities never increase") {
  for (const char* alg : {"msum", "strassen", "fft"}) {
    std::uint64_t n = std::string(alg) == "strassen" ? 32 : 4096;
    auto r = run(alg, n, 8, SchedKind::Pws, 3);
    auto steals = r.steals;
    std::stable_sort(steals.begin(), steals.end(),
                     [](const auto& a, const auto& b) { return a.round < b.round; });
    for (std::size_t i = 1; i < steals.size(); ++i)
      if (steals[i].round != steals[i - 1].round) CHECK(steals[i].priority <= steals[i - 1].priority);
      else CHECK(steals[i].priority == steals[i - 1].priority);
    CHECK(r.stats.violations.total() == 0);
  }
}

TEST_CASE("per victim, stolen priorities go down") {
  auto r = run("prefix_sums", 1 << 12, 8, SchedKind::Pws, 2);
  std::map<CoreId, std::vector<const sched::StealRecord*>> per;
  for (const auto& s : r.steals) per[s.victim].push_back(&s);
  // within one task execution the order is top-down; the runtime checks that
  // per execution, here only the counter is checked
  CHECK(r.stats.violations.stolen_order == 0);
  CHECK(!per.empty());
}

TEST_CASE("stress mode: pseudo-steals appear and bounds still hold") {
  std::uint64_t pseudo = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto r = run(seed % 2 ? "fft" : "prefix_sums", 1 << 12, 8, SchedKind::Pws, seed, true);
    CHECK(r.ok);
    CHECK(r.stats.violations.total() == 0);
    for (const auto& [prio, k] : r.stats.steals_per_priority) CHECK(k <= 7);
    pseudo += r.stats.pseudo_steals;
  }
  CHECK(pseudo > 0);
}

TEST_CASE("scheduler overhead accounting") {
  auto r = run("strassen", 32, 8, SchedKind::Pws, 4);
  const auto& st = r.stats;
  CHECK(st.sched_steps <= static_cast<std::uint64_t>(st.steps_per_phase) * st.phases);
  CHECK(st.steps_per_phase == sched::pws_steps_per_phase(8));
  CHECK(st.violations.phase_accounting == 0);
}

TEST_CASE("rws is deterministic per seed") {
  auto a = run("msum", 1 << 12, 4, SchedKind::Rws, 11);
  auto b = run("msum", 1 << 12, 4, SchedKind::Rws, 11);
  CHECK(a.stats.makespan == b.stats.makespan);
  CHECK(a.stats.steals == b.stats.steals);
  CHECK(a.totals.misses() == b.totals.misses());
  CHECK(a.ok);
}

TEST_CASE("p = 8 scan: rws steals at least as often as pws (median of 20 seeds)") {
  std::vector<std::uint64_t> rws, pws;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    rws.push_back(run("msum", 1 << 14, 8, SchedKind::Rws, seed).stats.steals);
    pws.push_back(run("msum", 1 << 14, 8, SchedKind::Pws, seed).stats.steals);
  }
  std::sort(rws.begin(), rws.end());
  std::sort(pws.begin(), pws.end());
  CHECK(rws[10] >= pws[10]);
}

TEST_CASE("every algorithm runs clean under both parallel schedulers") {
  std::uint64_t waits = 0;
  for (const auto& spec : algos::registry()) {
    std::uint64_t n = spec.matrix ? 32 : 1024;
    for (SchedKind s : {SchedKind::Pws, SchedKind::Rws}) {
      auto r = run(spec.name, n, 4, s, 7);
      CAPTURE(spec.name);
      CHECK(r.ok);
      CHECK(r.stats.violations.total() == 0);
      CHECK(r.stats.max_usurpers_per_boundary <= 3);
      waits += r.stats.wait_phases;
    }
  }
  // thieves waited on a flagged head and were served once it forked
  CHECK(waits > 0);
}
