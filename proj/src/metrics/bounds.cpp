// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "pwssim/metrics/metrics.hpp"

namespace pwssim::metrics {

namespace {
double lg(double x) { return std::log2(std::max(x, 2.0)); }
}  // namespace

bool comparable(const RunParams& a, const RunParams& b) {
  return a.alg == b.alg && a.n == b.n && a.M == b.M && a.B == b.B && a.padded == b.padded &&
         a.gapped == b.gapped && a.seed == b.seed && a.cost.hit_cost == b.cost.hit_cost &&
         a.cost.miss_cost == b.cost.miss_cost;
}

BoundEval check_bound(double measured, const BoundSpec& spec, const BoundArgs& args) {
  BoundEval e;
  e.name = spec.name;
  e.measured = measured;
  e.c_max = spec.c_max;
  e.formula = spec.formula(args);
  e.ratio = e.formula > 0 ? measured / e.formula : (measured > 0 ? INFINITY : 0);
  if (spec.needs_n_ge_Mp && args.n < args.M * args.p) {
    e.applicable = false;
    e.pass = true;
    e.note = "skipped: n < M p";
    return e;
  }
  e.pass = measured <= spec.c_max * e.formula;
  return e;
}

const BoundSpec& steals_per_priority_spec() {
  static const BoundSpec s{"steals_per_priority", [](const BoundArgs& a) { return a.p - 1; }, 1, false};
  return s;
}

const BoundSpec& steal_attempts_spec() {
  static const BoundSpec s{"steal_attempts", [](const BoundArgs& a) { return 2 * a.p * a.rounds; }, 1,
                           false};
  return s;
}

const BoundSpec& scan_cache_excess_spec() {
  static const BoundSpec s{"cache_excess_pM_over_B", [](const BoundArgs& a) { return a.p * a.M / a.B; },
                           frozen::kScanCacheExcess, true};
  return s;
}

const BoundSpec& scan_block_wait_spec() {
  static const BoundSpec s{"block_wait_pBlogB", [](const BoundArgs& a) { return a.p * a.B * lg(a.B); },
                           frozen::kScanBlockWait, false};
  return s;
}

const BoundSpec& strassen_excess_spec() {
  static const BoundSpec s{
      "strassen_cache_excess",
      [](const BoundArgs& a) { return a.p * (a.M / a.B) * lg(a.n / a.M) + a.p * lg(a.B) * lg(a.B); },
      frozen::kStrassenExcess, false};
  return s;
}

const BoundSpec& up_pass_idle_spec() {
  static const BoundSpec s{
      "up_pass_idle",
      [](const BoundArgs& a) { return a.miss_cost * a.p * (lg(a.n) + a.B * lg(a.B)); },
      frozen::kUpPassIdle, false};
  return s;
}

BoundArgs bound_args(const RunParams& p, bool matrix) {
  BoundArgs a;
  a.n = static_cast<double>(matrix ? p.n * p.n : p.n);
  a.p = p.p;
  a.M = static_cast<double>(p.M);
  a.B = static_cast<double>(p.B);
  a.miss_cost = static_cast<double>(p.cost.miss_cost);
  return a;
}

ExcessReport compute_excess(const RunSummary& run, const RunSummary& baseline) {
  if (!comparable(run.params, baseline.params))
    throw ConfigError("compute_excess: runs differ in more than scheduler and core count");
  if (baseline.params.p != 1) throw ConfigError("compute_excess: baseline must be a p = 1 run");
  ExcessReport r;
  r.q_seq = baseline.totals.cold_capacity();
  r.q_pws = run.totals.misses();
  std::uint64_t cc = run.totals.cold_capacity();
  r.cache_excess = cc > r.q_seq ? cc - r.q_seq : 0;
  r.block_wait_total = static_cast<double>(run.totals.invalidation_ticks) /
                       static_cast<double>(run.params.cost.miss_cost);
  r.idle_total = run.stats.idle_total;
  return r;
}

IdleBreakdown measure_idle(const RunSummary& run, bool matrix) {
  IdleBreakdown b;
  b.total = run.stats.idle_total;
  b.steal_phase = run.stats.idle_steal_phase;
  b.no_work = run.stats.idle_no_work;
  b.up_pass = run.stats.idle_up_pass;
  b.up_pass_bound = check_bound(static_cast<double>(b.up_pass), up_pass_idle_spec(),
                                bound_args(run.params, matrix));
  return b;
}

}  // namespace pwssim::metrics
