// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "runtime_impl.hpp"

namespace pwssim::sched {

using compute::Action;
using compute::JobKind;

const char* to_string(SchedKind k) {
  switch (k) {
    case SchedKind::Seq: return "seq";
    case SchedKind::Pws: return "pws";
    case SchedKind::Rws: return "rws";
  }
  return "?";
}

SchedKind parse_sched(const std::string& s) {
  if (s == "seq") return SchedKind::Seq;
  if (s == "pws") return SchedKind::Pws;
  if (s == "rws") return SchedKind::Rws;
  throw ConfigError("unknown scheduler '" + s + "' (expected pws, rws or seq)");
}

const char* to_string(TaskEvent e) {
  switch (e) {
    case TaskEvent::Fork: return "fork";
    case TaskEvent::Start: return "start";
    case TaskEvent::Finish: return "finish";
    case TaskEvent::Steal: return "steal";
    case TaskEvent::Usurp: return "usurp";
  }
  return "?";
}

std::uint64_t Violations::total() const {
  return deque_order + after_failure + per_priority + attempts + round_order + stolen_order +
         child_priority + usurpers + phase_accounting + coherence;
}

namespace {
std::uint64_t isqrt_ceil(std::uint64_t x) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while (r * r < x) ++r;
  return r;
}
}  // namespace

Runtime::Runtime(mem::Machine& m, RuntimeConfig cfg)
    : m_(m), cfg_(cfg), p_(m.cores()), rng_(cfg.seed) {
  for (int c = 0; c < p_; ++c) cores_.push_back(std::make_unique<Core>());
  free_stacks_.resize(p_);
  last_stolen_from_.assign(p_, 0);
  has_stolen_from_.assign(p_, false);
  stats_.cores.assign(p_, {});
}

Runtime::~Runtime() = default;

std::uint64_t Runtime::current_task(CoreId core) const {
  const Task* t = cores_[core]->cur;
  return t ? t->id : 0;
}

Runtime::Task* Runtime::new_task(compute::JobPtr job, Task* parent, bool forked, int priority) {
  Task* t;
  if (!free_tasks_.empty()) {
    t = free_tasks_.back();
    free_tasks_.pop_back();
    *t = Task{};
  } else {
    t = &task_pool_.emplace_back();
  }
  t->job = std::move(job);
  t->job->priority = priority;
  t->parent = parent;
  t->forked = forked;
  t->id = next_id_++;
  t->prio = priority;
  created_priorities_[priority] = true;
  ++stats_.tasks;
  if (cfg_.record_tasks) {
    TaskRecord r;
    r.id = t->id;
    r.parent = parent ? parent->id : 0;
    r.forked = forked;
    r.kind = t->job->kind();
    r.priority = priority;
    r.size = t->job->size();
    t->record = task_records_.size();
    task_records_.push_back(r);
  }
  return t;
}

void Runtime::free_task(Task* t) {
  t->job.reset();
  free_tasks_.push_back(t);
}

Runtime::Stack* Runtime::acquire_stack(CoreId c) {
  if (!free_stacks_[c].empty()) {
    Stack* s = free_stacks_[c].back();
    free_stacks_[c].pop_back();
    return s;
  }
  Stack& s = stacks_.emplace_back();
  s.region = m_.reserve_stack(c, stack_words_);
  s.top = s.region.base;
  s.id = static_cast<int>(stacks_.size()) - 1;
  s.arena = c;
  ++stats_.stacks;
  return &s;
}

void Runtime::release_stack(Stack* s) {
  if (s->top != s->region.base) throw Error("execution stack released while holding frames");
  free_stacks_[s->arena].push_back(s);
}

void Runtime::log(TaskEvent e, CoreId c, const Task* t) {
  if (cfg_.task_events) task_log_.push_back({m_.now(c), c, t->id, e});
}

void Runtime::start(CoreId c, Task* t) {
  Core& k = *cores_[c];
  if (!t->stack) {
    t->stack = acquire_stack(c);
    t->owns_stack = true;
  }
  std::uint64_t pad = cfg_.padded ? isqrt_ceil(t->job->size()) : 0;
  std::uint64_t words = 1 + t->job->locals();
  t->saved_top = t->stack->top;
  t->frame = t->stack->top + pad;
  if (t->frame + words > t->stack->region.end())
    throw ConfigError("execution stack overflow; raise the stack size");
  t->stack->top = t->frame + words;
  m_.commit({t->frame, words});
  t->started = true;
  k.gen_bound = t->prio - 1;
  JobKind kind = t->job->kind();
  if (kind == JobKind::BpLeaf || kind == JobKind::Base)
    stats_.last_leaf_start = std::max(stats_.last_leaf_start, m_.now(c));
  if (t->stolen) has_stolen_from_[c] = false;
  if (t->record != kNoRecord) {
    TaskRecord& r = task_records_[t->record];
    r.core = c;
    r.start = m_.now(c);
    r.frame = t->frame;
    r.frame_words = words;
    r.stack = t->stack->id;
    r.stolen = t->stolen;
  }
  log(TaskEvent::Start, c, t);
}

void Runtime::push_bottom(CoreId c, Task* t) {
  Core& k = *cores_[c];
  if (!k.dq.empty() && k.dq.back()->prio <= t->prio) ++stats_.violations.deque_order;
  k.dq.push_back(t);
}

void Runtime::step_core(CoreId c) {
  Core& k = *cores_[c];
  Task* t = k.cur;
  Tick before = m_.now(c);
  if (!t->started) start(c, t);
  compute::Ctx ctx{&m_, c, t->frame, this};
  Action a = t->job->step(ctx);
  m_.advance(c, 1);
  ++stats_.steps;
  ++stats_.cores[c].steps;
  switch (a.kind) {
    case Action::Fork: {
      int lp = a.a->priority == compute::kUnsetPriority ? t->prio - 1 : a.a->priority;
      int rp = a.b->priority == compute::kUnsetPriority ? t->prio - 1 : a.b->priority;
      if (lp >= t->prio || rp >= t->prio) ++stats_.violations.child_priority;
      m_.write(c, t->frame, 2);
      t->pending = 2;
      t->fork_core = c;
      Task* l = new_task(std::move(a.a), t, true, lp);
      Task* r = new_task(std::move(a.b), t, true, rp);
      l->stack = t->stack;
      r->stack = t->stack;
      log(TaskEvent::Fork, c, t);
      push_bottom(c, r);
      k.cur = l;
      break;
    }
    case Action::Call: {
      int cp = a.a->priority == compute::kUnsetPriority ? t->prio - 1 : a.a->priority;
      if (cp >= t->prio) ++stats_.violations.child_priority;
      Task* ch = new_task(std::move(a.a), t, false, cp);
      ch->stack = t->stack;
      k.cur = ch;
      break;
    }
    case Action::Done:
      finish(c, t);
      break;
  }
  stats_.cores[c].busy += m_.now(c) - before;
}

void Runtime::finish(CoreId c, Task* t) {
  Core& k = *cores_[c];
  t->stack->top = t->saved_top;
  if (t->record != kNoRecord) task_records_[t->record].finish = m_.now(c);
  log(TaskEvent::Finish, c, t);
  Task* parent = t->parent;
  if (!parent) {
    done_ = true;
    end_ = m_.now(c);
    if (t->owns_stack) release_stack(t->stack);
    free_task(t);
    k.cur = nullptr;
    k.mode = Core::Off;
    return;
  }
  if (!t->forked) {
    k.cur = parent;
    free_task(t);
    return;
  }
  Word v = m_.read(c, parent->frame);
  m_.write(c, parent->frame, v - 1);
  if (--parent->pending < 0) throw Error("double join on task");
  if (t->owns_stack) release_stack(t->stack);
  free_task(t);
  if (parent->pending == 0) {
    if (c != parent->fork_core) {
      ++stats_.usurpations;
      log(TaskEvent::Usurp, c, parent);
    }
    k.cur = parent;
  } else if (!k.dq.empty()) {
    k.cur = k.dq.back();
    k.dq.pop_back();
    k.gen_bound = k.cur->prio - 1;
  } else {
    become_thief(c, m_.now(c));
  }
}

void Runtime::become_thief(CoreId c, Tick t) {
  Core& k = *cores_[c];
  k.cur = nullptr;
  k.mode = Core::Thief;
  k.request = t;
  k.idle_from = t;
  k.work_ticks = 0;
  k.next_attempt = cfg_.sched == SchedKind::Rws ? t : kNever;
}

bool Runtime::work_available() const {
  for (const auto& k : cores_)
    if (!k->dq.empty()) return true;
  return false;
}

void Runtime::note_idle(CoreId c, Tick from, Tick to) {
  Core& k = *cores_[c];
  Tick d = std::max<Tick>(0, to - from);
  Tick with_work = std::min(k.work_ticks, d);
  stats_.cores[c].idle += d;
  stats_.idle_total += d;
  stats_.idle_steal_phase += with_work;
  stats_.idle_no_work += d - with_work;
  if (d > 0) k.idle_spans.emplace_back(from, to);
}

void Runtime::take(CoreId thief, CoreId victim, Tick at, std::uint64_t round) {
  Core& v = *cores_[victim];
  Core& th = *cores_[thief];
  Task* t = v.dq.front();
  v.dq.pop_front();
  if (cfg_.sched == SchedKind::Pws && have_failed_ && round > failed_round_ &&
      t->prio >= failed_priority_)
    ++stats_.violations.after_failure;
  if (has_stolen_from_[victim] && t->prio >= last_stolen_from_[victim])
    ++stats_.violations.stolen_order;
  has_stolen_from_[victim] = true;
  last_stolen_from_[victim] = t->prio;
  t->stack = nullptr;
  t->stolen = true;
  note_idle(thief, th.idle_from, at);
  Tick cost = m_.config().cost.steal_cost;
  th.mode = Core::Busy;
  th.cur = t;
  th.gen_bound = t->prio - 1;
  th.next_attempt = kNever;
  m_.set_now(thief, at + cost);
  stats_.cores[thief].steal_overhead += cost;
  ++stats_.cores[thief].steals;
  ++stats_.steals;
  ++stats_.attempts;
  ++stats_.steals_per_priority[t->prio];
  steal_log_.push_back({round, t->prio, thief, victim, t->id, StealKind::Stolen, at});
  if (cfg_.task_events) task_log_.push_back({at, thief, t->id, TaskEvent::Steal});
}

void Runtime::collection_boundary(int stage_priority, bool usurped) {
  if (!usurped) return;
  ++stats_.boundary_usurpations;
  ++stats_.usurpers_per_boundary[stage_priority];
}

}  // namespace pwssim::sched
