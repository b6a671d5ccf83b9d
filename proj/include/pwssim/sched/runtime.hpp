// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Discrete-event fork-join runtime. Cores execute jobs one step at a time in
// global time order (ties by core id, cores before the scheduler). Idle cores
// obtain work through one of the schedulers:
//   seq  - core 0 runs everything
//   pws  - priority work stealing in rounds, matched by prefix-sum phases
//   rws  - uniform random victim selection

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pwssim/compute/job.hpp"
#include "pwssim/memsim/machine.hpp"

namespace pwssim::sched {

enum class SchedKind : std::uint8_t { Seq, Pws, Rws };

const char* to_string(SchedKind k);
SchedKind parse_sched(const std::string& s);

struct RuntimeConfig {
  SchedKind sched = SchedKind::Pws;
  bool padded = false;
  /// Heads are sampled at phase start and grabbed after a seeded delay, so
  /// victims keep running between match and grab.
  bool stress = false;
  std::uint64_t seed = 1;
  /// Words reserved per execution stack; 0 picks a size from the root job.
  std::uint64_t stack_words = 0;
  bool record_tasks = false;   // keep a TaskRecord per task
  bool task_events = false;    // keep the fork/start/finish/steal/usurp trace
};

enum class StealKind : std::uint8_t { Stolen, PseudoStolen };

struct StealRecord {
  std::uint64_t round;  // sequence number of the round (0 for rws)
  int priority;
  CoreId thief;
  CoreId victim;
  std::uint64_t task;
  StealKind kind;
  Tick tick;
};

enum class TaskEvent : std::uint8_t { Fork, Start, Finish, Steal, Usurp };

const char* to_string(TaskEvent e);

struct TaskEventRecord {
  Tick tick;
  CoreId core;
  std::uint64_t task;
  TaskEvent event;
};

struct TaskRecord {
  std::uint64_t id = 0;
  std::uint64_t parent = 0;  // 0 for the root
  bool forked = false;       // created by a fork (parallel with its sibling)
  bool stolen = false;
  compute::JobKind kind{};
  int priority = 0;
  std::uint64_t size = 0;
  CoreId core = -1;          // core that started it
  Tick start = -1;
  Tick finish = -1;
  Addr frame = kNoAddr;      // join-counter word
  std::uint64_t frame_words = 0;
  int stack = -1;
};

struct Violations {
  std::uint64_t deque_order = 0;       // deque priorities not strictly decreasing
  std::uint64_t after_failure = 0;     // steal of priority >= a failed round's
  std::uint64_t per_priority = 0;      // priorities with more than p-1 steals
  std::uint64_t attempts = 0;          // attempts above 2 p D'
  std::uint64_t round_order = 0;       // round priority went up
  std::uint64_t stolen_order = 0;      // per victim, stolen priorities not decreasing
  std::uint64_t child_priority = 0;    // child priority not below parent
  std::uint64_t usurpers = 0;          // boundaries with more than p-1 usurpers
  std::uint64_t phase_accounting = 0;
  std::uint64_t coherence = 0;

  std::uint64_t total() const;
};

struct CoreStats {
  Tick busy = 0;
  Tick steal_overhead = 0;
  Tick idle = 0;
  std::uint64_t steps = 0;
  std::uint64_t steals = 0;
};

struct RunStats {
  Tick makespan = 0;
  std::uint64_t tasks = 0;
  std::uint64_t steps = 0;
  std::uint64_t steals = 0;
  std::uint64_t pseudo_steals = 0;
  std::uint64_t failed_attempts = 0;
  std::uint64_t attempts = 0;
  std::uint64_t phases = 0;
  std::uint64_t wait_phases = 0;       // phases in which some thief waited on a flagged head
  std::uint64_t sched_steps = 0;
  int steps_per_phase = 0;
  Tick phase_ticks = 0;
  std::uint64_t rounds = 0;            // D': distinct round priorities
  std::uint64_t priorities = 0;        // distinct task priorities created
  std::uint64_t usurpations = 0;       // at joins
  std::uint64_t boundary_usurpations = 0;
  std::uint64_t max_usurpers_per_boundary = 0;
  std::uint64_t max_steals_per_priority = 0;
  Tick idle_total = 0;
  Tick idle_steal_phase = 0;           // waiting while stealable tasks existed
  Tick idle_no_work = 0;
  Tick idle_up_pass = 0;               // idle after the last leaf started
  Tick last_leaf_start = 0;
  std::uint64_t stacks = 0;
  std::vector<CoreStats> cores;
  std::map<int, std::uint64_t> steals_per_priority;  // stolen + pseudo-stolen
  std::map<int, std::uint64_t> usurpers_per_boundary;
  Violations violations;
};

class Runtime : private compute::Hooks {
 public:
  Runtime(mem::Machine& m, RuntimeConfig cfg);
  ~Runtime() override;
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  /// Runs `root` to completion. Throws InvariantError on deadlock.
  const RunStats& run(compute::JobPtr root);

  const RunStats& stats() const { return stats_; }
  const std::vector<StealRecord>& steals() const { return steal_log_; }
  const std::vector<TaskEventRecord>& task_events() const { return task_log_; }
  const std::vector<TaskRecord>& tasks() const { return task_records_; }
  /// Id of the task currently running on `core` (0 if none).
  std::uint64_t current_task(CoreId core) const;
  const RuntimeConfig& config() const { return cfg_; }

 private:
  struct Stack;
  struct Task;
  struct Core;
  struct Entry;

  void collection_boundary(int stage_priority, bool usurped) override;

  Task* new_task(compute::JobPtr job, Task* parent, bool forked, int priority);
  void free_task(Task* t);
  Stack* acquire_stack(CoreId c);
  void release_stack(Stack* s);
  void start(CoreId c, Task* t);
  void step_core(CoreId c);
  void finish(CoreId c, Task* t);
  void push_bottom(CoreId c, Task* t);
  void become_thief(CoreId c, Tick t);
  void take(CoreId thief, CoreId victim, Tick at, std::uint64_t round);
  void note_idle(CoreId c, Tick from, Tick to);
  bool work_available() const;
  void log(TaskEvent e, CoreId c, const Task* t);

  Entry entry(CoreId c) const;
  void pws_boundary(Tick t);
  void pws_match(Tick t, const std::vector<Entry>& heads, bool stress);
  void pws_grab(Tick t);
  void rws_attempt(CoreId c);
  Tick next_sched_time() const;
  void finalize();

  mem::Machine& m_;
  RuntimeConfig cfg_;
  int p_;
  std::vector<std::unique_ptr<Core>> cores_;
  std::deque<Stack> stacks_;
  std::vector<std::vector<Stack*>> free_stacks_;
  std::deque<Task> task_pool_;
  std::vector<Task*> free_tasks_;
  std::mt19937_64 rng_;
  std::uint64_t next_id_ = 1;
  std::uint64_t stack_words_ = 0;
  bool done_ = false;
  Tick end_ = 0;

  // pws state
  int round_ = 0;
  bool round_open_ = false;
  std::uint64_t round_seq_ = 0;
  bool have_failed_ = false;
  int failed_priority_ = 0;
  std::uint64_t failed_round_ = 0;
  Tick last_boundary_ = -1;
  std::vector<Entry> snapshot_;
  bool have_snapshot_ = false;
  struct Grab;
  std::vector<Grab> grabs_;

  std::map<int, bool> created_priorities_;
  std::map<int, bool> round_priorities_;
  std::vector<int> last_stolen_from_;  // per victim, valid once has_stolen_from_
  std::vector<bool> has_stolen_from_;

  RunStats stats_;
  std::vector<StealRecord> steal_log_;
  std::vector<TaskEventRecord> task_log_;
  std::vector<TaskRecord> task_records_;
};

/// Synchronous prefix-sum tree over p leaves used to rank steal requests and
/// matching tasks. Every call counts the parallel steps it takes.
class PrefixTree {
 public:
  explicit PrefixTree(int p);
  /// Exclusive prefix sums of `flags`; returns the number of tree steps
  /// (leaf write, up-sweep, down-sweep).
  int ranks(const std::vector<std::uint8_t>& flags, std::vector<int>& rank, int& total);
  int leaves() const { return p_; }

 private:
  int p_, width_, depth_;
  std::vector<int> node_;
};

struct Matching {
  int thieves = 0;
  int tasks = 0;
  int steps = 0;  // both trees run side by side, plus one matching step
  std::vector<std::pair<CoreId, CoreId>> pairs;  // (thief, victim), rank i to rank i
};

/// Ranks requesting cores (`want`) and matching heads (`has`) with two prefix
/// trees and pairs them by rank; unmatched thieves keep their requests.
Matching match_requests(PrefixTree& tree, const std::vector<std::uint8_t>& want,
                        const std::vector<std::uint8_t>& has);

/// Scheduler steps in one phase for p cores.
int pws_steps_per_phase(int p);

}  // namespace pwssim::sched
