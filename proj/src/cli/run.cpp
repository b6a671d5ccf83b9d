// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pwssim/algos/algos.hpp"
#include "pwssim/cli/experiment.hpp"

namespace pwssim::cli {

using metrics::RunParams;
using metrics::RunSummary;
using nlohmann::json;

namespace {

const algos::AlgorithmSpec& resolve(const RunParams& rp) {
  const auto& spec = algos::find(rp.alg);
  if (rp.gapped && spec.alg == algos::Alg::BiToRmDirect) return algos::find("bi_to_rm_gapped");
  return spec;
}

RunSummary execute(const RunParams& rp, bool trace, RunOutput* out) {
  const auto& spec = resolve(rp);
  mem::MachineConfig mc;
  mc.p = rp.p;
  mc.M = rp.M;
  mc.B = rp.B;
  mc.cost = rp.cost;
  mc.event_log = trace;
  mem::Machine m(mc);
  algos::SetupOptions so;
  so.seed = rp.seed;
  algos::Problem prob = algos::setup(spec, m, rp.n, so);
  sched::RuntimeConfig rc;
  rc.sched = rp.sched;
  rc.padded = rp.padded;
  rc.stress = rp.stress;
  rc.seed = rp.seed;
  rc.record_tasks = trace;
  rc.task_events = trace;
  sched::Runtime rt(m, rc);
  std::unique_ptr<metrics::BlockTouchRecorder> rec;
  if (trace) {
    rec = std::make_unique<metrics::BlockTouchRecorder>(m, rt);
    m.set_observer(rec.get());
  }
  RunSummary s;
  s.params = rp;
  s.stats = rt.run(std::move(prob.root));
  m.set_observer(nullptr);
  for (const auto& c : m.counters()) s.totals += c;
  s.max_writes = m.max_writes();
  if (out) out->per_core = m.counters();
  algos::CheckResult chk = prob.check(m);
  s.output_ok = chk.ok;
  s.max_error = chk.max_error;
  if (out && trace) {
    out->steals = rt.steals();
    out->tasks = rt.tasks();
    out->events = rt.task_events();
    out->transfers = m.events();
    metrics::FLOptions fo;
    fo.f = [f = spec.f](double r) { return compute::eval(f, r); };
    out->fl = metrics::estimate_fL(*rec, out->tasks, rp.B, fo);
    for (const auto& d : metrics::stack_block_delay(m, out->tasks))
      out->max_stack_delay = std::max(out->max_stack_delay, d.max_delay);
  }
  return s;
}

std::string fmt(double v) {
  if (std::isnan(v) || std::isinf(v)) return "";
  std::ostringstream o;
  o.precision(10);
  o << v;
  return o.str();
}

const std::vector<std::string>& bound_columns() {
  static const std::vector<std::string> v = {"steals_per_priority", "steal_attempts",
                                             "cache_excess_pM_over_B", "block_wait_pBlogB",
                                             "strassen_cache_excess", "up_pass_idle"};
  return v;
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& c) {
  validate(c);
  RunOutput out;
  const RunParams& rp = c.run;
  const auto& spec = resolve(rp);
  out.summary = execute(rp, c.trace, &out);
  RunParams base = rp;
  base.p = 1;
  base.sched = sched::SchedKind::Seq;
  base.stress = false;
  RunSummary baseline = (rp.p == 1 && rp.sched == sched::SchedKind::Seq) ? out.summary
                                                                        : execute(base, false, nullptr);
  out.excess = metrics::compute_excess(out.summary, baseline);
  metrics::BoundArgs args = metrics::bound_args(rp, spec.matrix);
  const auto& st = out.summary.stats;
  args.rounds = static_cast<double>(st.rounds);
  auto& bounds = out.excess.bounds;
  if (rp.sched == sched::SchedKind::Pws) {
    bounds.push_back(metrics::check_bound(static_cast<double>(st.max_steals_per_priority),
                                          metrics::steals_per_priority_spec(), args));
    bounds.push_back(
        metrics::check_bound(static_cast<double>(st.attempts), metrics::steal_attempts_spec(), args));
  }
  if (spec.type == 1) {
    bounds.push_back(metrics::check_bound(static_cast<double>(out.excess.cache_excess),
                                          metrics::scan_cache_excess_spec(), args));
    bounds.push_back(
        metrics::check_bound(out.excess.block_wait_total, metrics::scan_block_wait_spec(), args));
  }
  if (spec.alg == algos::Alg::Strassen)
    bounds.push_back(metrics::check_bound(static_cast<double>(out.excess.cache_excess),
                                          metrics::strassen_excess_spec(), args));
  out.idle = metrics::measure_idle(out.summary, spec.matrix);
  out.write_budget = spec.write_budget;
  out.tall_cache_ok = spec.tall_cache.empty() || rp.M >= rp.B * rp.B;

  const auto& v = st.violations;
  if (v.total()) out.failures.push_back("scheduler invariant violations: " + std::to_string(v.total()));
  if (!out.summary.output_ok) out.failures.push_back("output differs from the reference");
  if (out.summary.max_writes > out.write_budget)
    out.failures.push_back("write budget exceeded: " + std::to_string(out.summary.max_writes));
  for (const auto& b : bounds)
    if (!b.pass && (b.name == "steals_per_priority" || b.name == "steal_attempts"))
      out.failures.push_back("bound failed: " + b.name);
  out.invariants_ok = out.failures.empty();
  return out;
}

json report_json(const RunOutput& r) {
  const auto& rp = r.summary.params;
  const auto& spec = resolve(rp);
  const auto& st = r.summary.stats;
  const auto& t = r.summary.totals;
  json j;
  j["config"] = {{"alg", spec.name},
                 {"sched", sched::to_string(rp.sched)},
                 {"n", rp.n},
                 {"p", rp.p},
                 {"M", rp.M},
                 {"B", rp.B},
                 {"hit_cost", rp.cost.hit_cost},
                 {"miss_cost", rp.cost.miss_cost},
                 {"steal_cost", rp.cost.steal_cost},
                 {"sched_interval", rp.cost.sched_interval},
                 {"padded", rp.padded},
                 {"gapped", rp.gapped},
                 {"stress", rp.stress},
                 {"seed", rp.seed}};
  j["algorithm"] = {{"type", spec.type},
                    {"f", compute::to_string(spec.f)},
                    {"L", compute::to_string(spec.L)},
                    {"work", spec.work},
                    {"span", spec.span},
                    {"cache", spec.cache},
                    {"tall_cache", spec.tall_cache},
                    {"tall_cache_ok", r.tall_cache_ok}};
  j["counters"] = {{"reads", t.reads},
                   {"writes", t.writes},
                   {"hits", t.hits},
                   {"cold", t.cold},
                   {"capacity", t.capacity},
                   {"invalidation", t.invalidation},
                   {"upgrade", t.upgrade},
                   {"coherence", t.coherence},
                   {"stack_invalidation", t.stack_invalidation},
                   {"queue_ticks", t.queue_ticks},
                   {"invalidation_ticks", t.invalidation_ticks},
                   {"misses", t.misses()}};
  j["schedule"] = {{"makespan", st.makespan},
                   {"tasks", st.tasks},
                   {"steps", st.steps},
                   {"steals", st.steals},
                   {"pseudo_steals", st.pseudo_steals},
                   {"failed_attempts", st.failed_attempts},
                   {"attempts", st.attempts},
                   {"phases", st.phases},
                   {"wait_phases", st.wait_phases},
                   {"sched_steps", st.sched_steps},
                   {"steps_per_phase", st.steps_per_phase},
                   {"rounds", st.rounds},
                   {"priorities", st.priorities},
                   {"usurpations", st.usurpations},
                   {"boundary_usurpations", st.boundary_usurpations},
                   {"max_usurpers_per_boundary", st.max_usurpers_per_boundary},
                   {"max_steals_per_priority", st.max_steals_per_priority},
                   {"stacks", st.stacks}};
  const auto& v = st.violations;
  j["violations"] = {{"deque_order", v.deque_order},       {"after_failure", v.after_failure},
                     {"per_priority", v.per_priority},     {"attempts", v.attempts},
                     {"round_order", v.round_order},       {"stolen_order", v.stolen_order},
                     {"child_priority", v.child_priority}, {"usurpers", v.usurpers},
                     {"phase_accounting", v.phase_accounting}, {"coherence", v.coherence}};
  j["excess"] = {{"q_seq", r.excess.q_seq},
                 {"q_pws", r.excess.q_pws},
                 {"cache_excess", r.excess.cache_excess},
                 {"block_wait_total", r.excess.block_wait_total},
                 {"idle_total", r.excess.idle_total}};
  j["idle"] = {{"total", r.idle.total},
               {"steal_phase", r.idle.steal_phase},
               {"no_work", r.idle.no_work},
               {"up_pass", r.idle.up_pass}};
  json bounds = json::array();
  auto bj = [](const metrics::BoundEval& b) {
    return json{{"name", b.name},         {"formula", b.formula}, {"measured", b.measured},
                {"ratio", b.ratio},       {"c_max", b.c_max},     {"applicable", b.applicable},
                {"pass", b.pass},         {"note", b.note}};
  };
  for (const auto& b : r.excess.bounds) bounds.push_back(bj(b));
  bounds.push_back(bj(r.idle.up_pass_bound));
  j["bounds"] = bounds;
  j["output"] = {{"ok", r.summary.output_ok}, {"max_error", r.summary.max_error}};
  j["limited_access"] = {{"max_writes", r.summary.max_writes}, {"budget", r.write_budget}};
  j["invariants_ok"] = r.invariants_ok;
  j["failures"] = r.failures;
  if (!r.fl.empty()) {
    json fl = json::array();
    for (const auto& c : r.fl)
      fl.push_back({{"r", c.r}, {"tasks", c.tasks}, {"f_hat", c.f_hat}, {"f_ratio", c.f_ratio},
                    {"l_hat", c.l_hat}});
    j["friendliness"] = fl;
    j["max_stack_delay"] = r.max_stack_delay;
  }
  return j;
}

std::vector<std::string> csv_columns() {
  std::vector<std::string> c = {"alg", "sched", "n", "p", "M", "B", "hit_cost", "miss_cost", "steal_cost",
                                "sched_interval", "padded", "gapped", "stress", "seed",
                                // counters
                                "reads", "writes", "hits", "cold", "capacity", "invalidation", "upgrade",
                                "coherence", "stack_invalidation", "queue_ticks", "invalidation_ticks",
                                "misses",
                                // schedule
                                "makespan", "steals", "pseudo_steals", "failed_attempts", "attempts",
                                "phases", "rounds", "usurpations", "max_usurpers_per_boundary",
                                "max_steals_per_priority", "violations",
                                // derived
                                "q_seq", "cache_excess", "block_wait_total", "idle_total",
                                "idle_up_pass", "max_writes", "output_ok", "invariants_ok"};
  for (const auto& b : bound_columns()) c.push_back("ratio_" + b);
  return c;
}

std::vector<std::string> csv_row(const RunOutput& r) {
  const auto& rp = r.summary.params;
  const auto& t = r.summary.totals;
  const auto& st = r.summary.stats;
  auto u = [](auto x) { return std::to_string(x); };
  std::vector<std::string> row = {resolve(rp).name, sched::to_string(rp.sched), u(rp.n), u(rp.p), u(rp.M),
                                  u(rp.B), u(rp.cost.hit_cost), u(rp.cost.miss_cost),
                                  u(rp.cost.steal_cost), u(rp.cost.sched_interval), u(int(rp.padded)),
                                  u(int(rp.gapped)), u(int(rp.stress)), u(rp.seed),
                                  u(t.reads), u(t.writes), u(t.hits), u(t.cold), u(t.capacity),
                                  u(t.invalidation), u(t.upgrade), u(t.coherence), u(t.stack_invalidation),
                                  u(t.queue_ticks), u(t.invalidation_ticks), u(t.misses()),
                                  u(st.makespan), u(st.steals), u(st.pseudo_steals), u(st.failed_attempts),
                                  u(st.attempts), u(st.phases), u(st.rounds), u(st.usurpations),
                                  u(st.max_usurpers_per_boundary), u(st.max_steals_per_priority),
                                  u(st.violations.total()),
                                  u(r.excess.q_seq), u(r.excess.cache_excess), fmt(r.excess.block_wait_total),
                                  u(r.idle.total), u(r.idle.up_pass), u(r.summary.max_writes),
                                  u(int(r.summary.output_ok)), u(int(r.invariants_ok))};
  for (const auto& name : bound_columns()) {
    std::string cell;
    for (const auto& b : r.excess.bounds)
      if (b.name == name && b.applicable) cell = fmt(b.ratio);
    if (name == r.idle.up_pass_bound.name) cell = fmt(r.idle.up_pass_bound.ratio);
    row.push_back(cell);
  }
  return row;
}

}  // namespace pwssim::cli
