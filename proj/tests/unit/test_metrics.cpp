// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "pwssim/algos/algos.hpp"
#include "pwssim/cli/experiment.hpp"
#include "pwssim/metrics/metrics.hpp"

using namespace pwssim;

namespace {

cli::ExperimentConfig cfg(const std::string& alg, std::uint64_t n, int p, const std::string& sched = "pws",
                          std::uint64_t M = 4096, std::uint64_t B = 32, std::uint64_t seed = 1) {
  cli::ExperimentConfig c;
  cli::set_option(c, "alg", alg);
  cli::set_option(c, "n", std::to_string(n));
  cli::set_option(c, "p", std::to_string(p));
  cli::set_option(c, "sched", sched);
  cli::set_option(c, "M", std::to_string(M));
  cli::set_option(c, "B", std::to_string(B));
  cli::set_option(c, "seed", std::to_string(seed));
  return c;
}

// A single task that scans `n` words: no parallelism at all.
struct Chain final : compute::BaseJob {
  Addr a;
  std::uint64_t n;
  Chain(Addr x, std::uint64_t k) : a(x), n(k) {}
  std::uint64_t size() const override { return n; }
  void run(compute::Ctx& c) override {
    for (std::uint64_t i = 0; i < n; ++i) c.rd(a + i);
  }
};

}  // namespace

TEST_CASE("excess of a run against itself is zero") {
  auto r = cli::run_experiment(cfg("msum", 4096, 1, "seq"));
  auto e = metrics::compute_excess(r.summary, r.summary);
  CHECK(e.cache_excess == 0);
  CHECK(e.block_wait_total == 0);
  CHECK(e.q_pws == e.q_seq);
  CHECK(r.idle.total == 0);
}

TEST_CASE("excess needs comparable runs") {
  auto a = cli::run_experiment(cfg("msum", 4096, 1, "seq"));
  auto b = cli::run_experiment(cfg("msum", 8192, 1, "seq"));
  CHECK_THROWS_AS(metrics::compute_excess(a.summary, b.summary), ConfigError);
  auto c = cli::run_experiment(cfg("msum", 4096, 1, "seq", 4096, 32, 2));
  CHECK_THROWS_AS(metrics::compute_excess(a.summary, c.summary), ConfigError);
}

TEST_CASE("p = 1 runs have zero cache excess for every algorithm") {
  for (const auto& s : algos::registry()) {
    CAPTURE(s.name);
    auto r = cli::run_experiment(cfg(s.name, s.matrix ? 32 : 1024, 1, "pws"));
    CHECK(r.excess.cache_excess == 0);
    CHECK(r.excess.q_pws == r.excess.q_seq);
    CHECK(r.invariants_ok);
  }
}

TEST_CASE("ping-pong: block wait equals the hand-traced refetch count") {
  mem::MachineConfig mc;
  mc.p = 2;
  mc.M = 8;
  mc.B = 4;
  mc.event_log = true;
  mem::Machine m(mc);
  auto a = m.alloc(0, 4);
  for (int i = 0; i < 6; ++i) {
    CoreId c = i % 2;
    m.set_now(c, std::max(m.now(0), m.now(1)));
    m.write(c, a.base, Word(i));
  }
  // two first touches, then four refetches after a remote write
  CHECK(m.totals().cold == 2);
  CHECK(m.totals().invalidation == 4);
  metrics::RunSummary s;
  s.params.alg = "msum";
  s.params.p = 2;
  s.params.n = 4;
  s.totals = m.totals();
  metrics::RunSummary base = s;
  base.params.p = 1;
  auto e = metrics::compute_excess(s, base);
  CHECK(e.block_wait_total == doctest::Approx(4));
  CHECK(e.block_wait_total <= double(m.block_delay(m.block_of(a.base), 0, m.now(0) + m.now(1))));
}

TEST_CASE("exact combinatorial bound specs") {
  metrics::BoundArgs a;
  a.p = 4;
  a.rounds = 10;
  CHECK(metrics::check_bound(3, metrics::steals_per_priority_spec(), a).pass);
  CHECK_FALSE(metrics::check_bound(4, metrics::steals_per_priority_spec(), a).pass);
  auto c4 = metrics::check_bound(80, metrics::steal_attempts_spec(), a);
  CHECK(c4.pass);
  CHECK(c4.ratio == doctest::Approx(1));
  CHECK_FALSE(metrics::check_bound(81, metrics::steal_attempts_spec(), a).pass);
}

TEST_CASE("asymptotic specs are skipped outside n >= M p") {
  metrics::BoundArgs a;
  a.n = 1000;
  a.p = 4;
  a.M = 1024;
  a.B = 32;
  auto e = metrics::check_bound(1e9, metrics::scan_cache_excess_spec(), a);
  CHECK_FALSE(e.applicable);
  CHECK(e.pass);
  CHECK_FALSE(e.note.empty());
}

TEST_CASE("serial chain: idle is (p - 1) / p of all core time") {
  mem::MachineConfig mc;
  mc.p = 4;
  mc.M = 4096;
  mc.B = 32;
  mem::Machine m(mc);
  auto a = m.alloc(0, 1 << 16);
  sched::RuntimeConfig rc;
  sched::Runtime rt(m, rc);
  metrics::RunSummary s;
  s.params.p = 4;
  s.params.n = 1 << 16;
  s.params.M = 4096;
  s.params.B = 32;
  s.stats = rt.run(std::make_unique<Chain>(a.base, 1 << 16));
  auto idle = metrics::measure_idle(s, false);
  double frac = double(idle.total) / (4.0 * double(s.stats.makespan));
  CHECK(frac == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("p = 1 stack blocks are transferred at most once") {
  auto c = cfg("prefix_sums", 4096, 1, "seq");
  c.trace = true;
  auto r = cli::run_experiment(c);
  CHECK(r.max_stack_delay <= 1);
}

TEST_CASE("unpadded stolen tasks: stack block delay within min(B, log size)") {
  for (const char* alg : {"msum", "prefix_sums", "mt_bi"})
    for (bool stress : {false, true}) {
      mem::MachineConfig mc;
      mc.p = 4;
      mc.M = 4096;
      mc.B = 32;
      mc.event_log = true;
      mem::Machine m(mc);
      auto prob = algos::setup(algos::find(alg), m, std::string(alg) == "mt_bi" ? 128 : 1 << 14, {});
      sched::RuntimeConfig rc;
      rc.stress = stress;
      rc.record_tasks = true;
      sched::Runtime rt(m, rc);
      rt.run(std::move(prob.root));
      auto d = metrics::stack_block_delay(m, rt.tasks());
      REQUIRE(!d.empty());
      for (const auto& x : d) {
        double lim = std::min(32.0, std::log2(double(std::max<std::uint64_t>(x.size, 2))));
        CHECK(double(x.max_delay) <= metrics::frozen::kStackDelay * lim);
      }
    }
}

TEST_CASE("measured friendliness and sharing") {
  auto traced = [](const std::string& alg, std::uint64_t n) {
    auto c = cfg(alg, n, 4, "pws", 4096, 32);
    c.trace = true;
    return cli::run_experiment(c);
  };
  auto scan = traced("msum", 1 << 14);
  REQUIRE(!scan.fl.empty());
  for (const auto& s : scan.fl) CHECK(s.f_hat <= metrics::frozen::kFriendliness);

  auto mt = traced("mt_bi", 128);
  for (const auto& s : mt.fl) CHECK(s.l_hat <= metrics::frozen::kSharing);

  auto rb = traced("rm_to_bi", 256);
  double lo = INFINITY, hi = 0;
  for (const auto& s : rb.fl)
    if (s.r >= 64 && s.f_hat > 0) {
      double q = s.f_hat / std::sqrt(double(s.r));
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  CHECK(hi <= metrics::frozen::kFriendliness);
}
