// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "runtime_impl.hpp"

namespace pwssim::sched {

namespace {
Tick ceil_div(Tick a, Tick b) { return (a + b - 1) / b; }
}  // namespace

const RunStats& Runtime::run(compute::JobPtr root) {
  if (done_ || stats_.tasks) throw Error("runtime already used");
  if (cfg_.stack_words) {
    stack_words_ = cfg_.stack_words;
  } else {
    std::uint64_t need = 16 * root->size() + (1u << 16);
    stack_words_ = 1u << 16;
    while (stack_words_ < need && stack_words_ < (std::uint64_t{1} << 30)) stack_words_ *= 2;
  }
  if (cfg_.sched == SchedKind::Pws) {
    stats_.steps_per_phase = pws_steps_per_phase(p_);
    stats_.phase_ticks = stats_.steps_per_phase * m_.config().cost.sched_interval;
  }
  Task* r = new_task(std::move(root), nullptr, false, 0);
  cores_[0]->mode = Core::Busy;
  cores_[0]->cur = r;
  for (int c = 1; c < p_; ++c)
    if (cfg_.sched != SchedKind::Seq) become_thief(c, 0);

  while (!done_) {
    CoreId best = -1;
    Tick bt = kNever;
    bool any_busy = false;
    for (int c = 0; c < p_; ++c) {
      const Core& k = *cores_[c];
      Tick t = kNever;
      if (k.mode == Core::Busy) {
        t = m_.now(c);
        any_busy = true;
      } else if (k.mode == Core::Thief) {
        t = k.next_attempt;
      }
      if (t < bt) {
        bt = t;
        best = c;
      }
    }
    if (!any_busy && grabs_.empty() && !work_available())
      throw InvariantError("deadlock: no core can make progress before the computation finished");
    Tick st = cfg_.sched == SchedKind::Pws ? next_sched_time() : kNever;
    if (best >= 0 && bt <= st) {
      if (cores_[best]->mode == Core::Busy)
        step_core(best);
      else
        rws_attempt(best);
    } else if (st != kNever) {
      auto g = std::min_element(grabs_.begin(), grabs_.end(), [](const Grab& a, const Grab& b) {
        return a.at != b.at ? a.at < b.at : a.thief < b.thief;
      });
      if (g != grabs_.end() && g->at <= st)
        pws_grab(st);
      else
        pws_boundary(st);
    } else {
      throw InvariantError("deadlock: no pending events");
    }
  }
  finalize();
  return stats_;
}

Tick Runtime::next_sched_time() const {
  Tick t = kNever;
  for (const Grab& g : grabs_) t = std::min(t, g.at);
  Tick L = stats_.phase_ticks;
  Tick min_req = kNever;
  for (const auto& k : cores_)
    if (k->mode == Core::Thief) min_req = std::min(min_req, k->request);
  Tick b = kNever;
  if (cfg_.stress && have_snapshot_) {
    b = last_boundary_ + L;
  } else if (min_req != kNever) {
    b = cfg_.stress ? ceil_div(min_req, L) * L : ceil_div(min_req + L, L) * L;
    if (last_boundary_ >= 0) b = std::max(b, last_boundary_ + L);
  }
  return std::min(t, b);
}

Runtime::Entry Runtime::entry(CoreId c) const {
  const Core& k = *cores_[c];
  Entry e;
  if (!k.dq.empty()) {
    e.present = e.real = true;
    e.prio = k.dq.front()->prio;
    e.task = k.dq.front()->id;
  } else if (k.mode == Core::Busy) {
    e.present = true;
    e.prio = k.gen_bound;
  }
  return e;
}

void Runtime::pws_boundary(Tick t) {
  last_boundary_ = t;
  if (cfg_.stress) {
    if (have_snapshot_) pws_match(t, snapshot_, true);
    have_snapshot_ = false;
    bool pool = false;
    for (const auto& k : cores_) pool = pool || k->mode == Core::Thief;
    if (pool) {
      snapshot_.assign(p_, Entry{});
      for (int c = 0; c < p_; ++c) snapshot_[c] = entry(c);
      for (const Grab& g : grabs_) {
        snapshot_[g.victim].real = false;
        Entry& e = snapshot_[g.thief];
        e.present = true;
        e.real = false;
        e.prio = g.prio - 1;
      }
      have_snapshot_ = true;
    }
    return;
  }
  std::vector<Entry> heads(p_);
  for (int c = 0; c < p_; ++c) heads[c] = entry(c);
  pws_match(t, heads, false);
}

void Runtime::pws_match(Tick t, const std::vector<Entry>& heads, bool stress) {
  Tick L = stats_.phase_ticks;
  std::vector<std::uint8_t> want(p_, 0);
  int nthieves = 0;
  for (int c = 0; c < p_; ++c) {
    const Core& k = *cores_[c];
    if (k.mode == Core::Thief && k.request <= t - L) {
      want[c] = 1;
      ++nthieves;
    }
  }
  if (nthieves == 0) return;
  ++stats_.phases;
  bool any_real = false, any_present = false;
  for (const Entry& e : heads) {
    any_real = any_real || (e.present && e.real);
    any_present = any_present || e.present;
  }
  if (any_real)
    for (int c = 0; c < p_; ++c)
      if (want[c]) cores_[c]->work_ticks += L;

  bool at_round = false;
  for (const Entry& e : heads) at_round = at_round || (round_open_ && e.present && e.prio == round_);
  if (!at_round) {
    if (!any_present) {
      ++stats_.wait_phases;
      stats_.sched_steps += stats_.steps_per_phase;
      return;
    }
    int mx = INT_MIN;
    for (const Entry& e : heads)
      if (e.present) mx = std::max(mx, e.prio);
    if (round_open_ && mx > round_) ++stats_.violations.round_order;
    round_ = mx;
    round_open_ = true;
    ++round_seq_;
    round_priorities_[mx] = true;
  }

  std::vector<std::uint8_t> has(p_, 0);
  for (int c = 0; c < p_; ++c) has[c] = heads[c].present && heads[c].real && heads[c].prio == round_;
  PrefixTree tree(p_);
  Matching mt = match_requests(tree, want, has);
  int tt = mt.thieves;
  stats_.sched_steps += mt.steps;
  if (mt.steps != stats_.steps_per_phase) ++stats_.violations.phase_accounting;
  int matched = static_cast<int>(mt.pairs.size());
  for (int i = 0; i < matched; ++i) {
    if (!stress) {
      take(mt.pairs[i].first, mt.pairs[i].second, t, round_seq_);
    } else {
      Tick jitter = static_cast<Tick>(rng_() % static_cast<std::uint64_t>(L));
      const Entry& e = heads[mt.pairs[i].second];
      grabs_.push_back({t + jitter, mt.pairs[i].first, mt.pairs[i].second, e.task, e.prio, round_seq_});
      cores_[mt.pairs[i].first]->mode = Core::Grabbing;
    }
  }
  if (tt > matched) {
    bool flagged = false;
    for (const Entry& e : heads) flagged = flagged || (e.present && !e.real && e.prio == round_);
    if (flagged) {
      ++stats_.wait_phases;
    } else {
      std::uint64_t fails = static_cast<std::uint64_t>(tt - matched);
      stats_.failed_attempts += fails;
      stats_.attempts += fails;
      have_failed_ = true;
      failed_priority_ = round_;
      failed_round_ = round_seq_;
      round_open_ = false;
    }
  }
}

void Runtime::pws_grab(Tick t) {
  auto it = std::min_element(grabs_.begin(), grabs_.end(), [](const Grab& a, const Grab& b) {
    return a.at != b.at ? a.at < b.at : a.thief < b.thief;
  });
  Grab g = *it;
  grabs_.erase(it);
  const Core& v = *cores_[g.victim];
  if (!v.dq.empty() && v.dq.front()->id == g.task) {
    take(g.thief, g.victim, t, g.round);
    return;
  }
  Core& th = *cores_[g.thief];
  ++stats_.pseudo_steals;
  ++stats_.attempts;
  ++stats_.steals_per_priority[g.prio];
  steal_log_.push_back({g.round, g.prio, g.thief, g.victim, g.task, StealKind::PseudoStolen, t});
  th.mode = Core::Thief;
  th.request = t;
}

void Runtime::rws_attempt(CoreId c) {
  Core& k = *cores_[c];
  Tick t = k.next_attempt;
  m_.set_now(c, std::max(m_.now(c), t));
  auto v = static_cast<CoreId>(rng_() % static_cast<std::uint64_t>(p_ - 1));
  if (v >= c) ++v;
  if (!cores_[v]->dq.empty()) {
    take(c, v, t, 0);
    return;
  }
  Tick cost = m_.config().cost.steal_cost;
  ++stats_.failed_attempts;
  ++stats_.attempts;
  if (work_available()) k.work_ticks += cost;
  k.next_attempt = t + cost;
}

void Runtime::finalize() {
  for (int c = 0; c < p_; ++c) {
    Core& k = *cores_[c];
    if (k.mode == Core::Thief || k.mode == Core::Grabbing) note_idle(c, k.idle_from, end_);
  }
  stats_.makespan = end_;
  for (const auto& k : cores_)
    for (auto [a, b] : k->idle_spans) {
      Tick lo = std::max(a, stats_.last_leaf_start), hi = std::min(b, end_);
      if (hi > lo) stats_.idle_up_pass += hi - lo;
    }
  stats_.priorities = created_priorities_.size();
  stats_.rounds = round_priorities_.size();
  for (auto [prio, n] : stats_.steals_per_priority)
    stats_.max_steals_per_priority = std::max(stats_.max_steals_per_priority, n);
  for (auto [prio, n] : stats_.usurpers_per_boundary)
    stats_.max_usurpers_per_boundary = std::max(stats_.max_usurpers_per_boundary, n);
  auto limit = static_cast<std::uint64_t>(p_ - 1);
  Violations& v = stats_.violations;
  if (cfg_.sched == SchedKind::Pws) {
    for (auto [prio, n] : stats_.steals_per_priority)
      if (n > limit) ++v.per_priority;
    if (stats_.attempts > 2 * static_cast<std::uint64_t>(p_) * stats_.rounds) ++v.attempts;
    for (auto [prio, n] : stats_.usurpers_per_boundary)
      if (n > limit) ++v.usurpers;
    if (stats_.sched_steps != stats_.phases * static_cast<std::uint64_t>(stats_.steps_per_phase))
      ++v.phase_accounting;
    if (stats_.phases > stats_.steals + stats_.pseudo_steals + stats_.failed_attempts + stats_.wait_phases)
      ++v.phase_accounting;
  }
  v.coherence = m_.coherence_violations();
}

}  // namespace pwssim::sched
