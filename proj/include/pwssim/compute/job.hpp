// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Fork-join job model. A job is a small state machine advanced one step at a
// time by the runtime; each step performs O(1) simulated accesses through a
// Ctx and returns what the runtime should do next.
//
// Frame layout on the execution stack: [join counter][locals...]. The join
// counter is written by the runtime; locals belong to the job.

#include <climits>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "pwssim/common.hpp"
#include "pwssim/memsim/machine.hpp"

namespace pwssim::compute {

constexpr int kUnsetPriority = INT_MIN;

enum class JobKind : std::uint8_t { BpFork, BpLeaf, Fanout, Seq, Base };

const char* to_string(JobKind k);

/// Runtime services visible to jobs.
class Hooks {
 public:
  virtual ~Hooks() = default;
  /// A staged job is starting stage `stage_priority` on `core`; `usurped` if the
  /// previous stage was started by a different core.
  virtual void collection_boundary(int stage_priority, bool usurped) = 0;
};

struct Ctx {
  mem::Machine* m = nullptr;
  CoreId core = 0;
  Addr frame = kNoAddr;  // join-counter word; locals follow
  Hooks* hooks = nullptr;

  Addr local(std::uint64_t i) const { return frame + 1 + i; }
  Word rd(Addr a) { return m->read(core, a); }
  void wr(Addr a, Word v) { m->write(core, a, v); }
  double rdf(Addr a) { return m->readf(core, a); }
  void wrf(Addr a, double v) { m->writef(core, a, v); }
};

class Job;

struct Action {
  enum Kind : std::uint8_t { Done, Fork, Call } kind = Done;
  std::unique_ptr<Job> a;  // Fork: left (continued by this core); Call: child
  std::unique_ptr<Job> b;  // Fork: right (pushed on the deque)

  static Action done() { return {}; }
  static Action fork(std::unique_ptr<Job> l, std::unique_ptr<Job> r) {
    return {Fork, std::move(l), std::move(r)};
  }
  static Action call(std::unique_ptr<Job> c) { return {Call, std::move(c), nullptr}; }
};

class Job {
 public:
  virtual ~Job() = default;

  /// Declared size |tau| in words.
  virtual std::uint64_t size() const = 0;
  /// Number of frame words after the join counter.
  virtual std::uint64_t locals() const = 0;
  virtual Action step(Ctx& c) = 0;
  virtual JobKind kind() const = 0;
  /// Priority levels spanned below this job: own priority minus the lowest
  /// priority of any task it (transitively) creates.
  virtual int levels() const = 0;

  int priority = kUnsetPriority;
};

using JobPtr = std::unique_ptr<Job>;

// ------------------------------------------------------------------ BP ranges

/// Per-node work of a balanced binary fork tree over an index range [lo, hi).
/// Node locals are [lo, hi, extra...].
class RangeKernel {
 public:
  virtual ~RangeKernel() = default;
  virtual std::uint64_t extra_locals() const { return 0; }
  virtual std::uint64_t words_per_item() const { return 1; }
  /// Down-pass work of an internal node before it forks.
  virtual void head(Ctx&, Addr /*extra*/, std::uint64_t /*lo*/, std::uint64_t /*mid*/,
                    std::uint64_t /*hi*/, Addr /*link*/) {}
  virtual void leaf(Ctx& c, std::uint64_t i, Addr link) = 0;
  virtual bool has_up() const { return false; }
  /// Up-pass work once both children have joined.
  virtual void up(Ctx&, Addr /*extra*/, std::uint64_t /*lo*/, std::uint64_t /*hi*/,
                  Addr /*link*/) {}
  /// Where child `which` (0 left, 1 right) reports to; kNoAddr if nowhere.
  virtual Addr child_link(Addr /*extra*/, int /*which*/) const { return kNoAddr; }
};

class RangeNode final : public Job {
 public:
  RangeNode(std::shared_ptr<RangeKernel> k, std::uint64_t lo, std::uint64_t hi,
            Addr link = kNoAddr);

  std::uint64_t size() const override { return (hi_ - lo_) * kernel_->words_per_item(); }
  std::uint64_t locals() const override { return 2 + kernel_->extra_locals(); }
  Action step(Ctx& c) override;
  JobKind kind() const override { return hi_ - lo_ == 1 ? JobKind::BpLeaf : JobKind::BpFork; }
  int levels() const override { return ceil_log2(hi_ - lo_); }

  static std::uint64_t split(std::uint64_t lo, std::uint64_t hi) { return lo + (hi - lo + 1) / 2; }

 private:
  std::shared_ptr<RangeKernel> kernel_;
  std::uint64_t lo_, hi_;
  Addr link_;
  int pc_ = 0;
};

// -------------------------------------------------------------- fanout trees

/// Builds subproblem i of a fanout collection.
using SubFactory = std::function<JobPtr(std::uint64_t i)>;

/// Binary fork tree over subproblem indices [lo, hi). Internal nodes take
/// parent - 1; every subproblem sits leaf_depth levels below this node. The
/// smaller half goes left, so a subproblem is never pushed above a sibling.
class FanoutNode final : public Job {
 public:
  FanoutNode(std::shared_ptr<SubFactory> make, std::uint64_t lo, std::uint64_t hi,
             std::uint64_t sub_size, int sub_levels, int leaf_depth);

  std::uint64_t size() const override { return (hi_ - lo_) * sub_size_; }
  std::uint64_t locals() const override { return 2; }
  Action step(Ctx& c) override;
  JobKind kind() const override { return JobKind::Fanout; }
  int levels() const override { return leaf_depth_ + sub_levels_; }

 private:
  JobPtr child(std::uint64_t lo, std::uint64_t hi) const;

  std::shared_ptr<SubFactory> make_;
  std::uint64_t lo_, hi_, sub_size_;
  int sub_levels_;
  int leaf_depth_;  // fork levels from this node down to its subproblems
  int pc_ = 0;
};

/// Fanout over v subproblems; all of them the same shape as make(0).
/// Returns make(0) itself when v == 1.
JobPtr make_fanout(SubFactory make, std::uint64_t v);

// ---------------------------------------------------------------- staged jobs

/// A sequence of stages run one after another. Stage k gets priority
/// own - 1 - sum_{j<k}(levels_j + 1), so every stage lies strictly below
/// everything before it.
class SeqJob : public Job {
 public:
  std::uint64_t locals() const override { return scratch(); }
  Action step(Ctx& c) override;
  JobKind kind() const override { return JobKind::Seq; }
  int levels() const override;

  virtual int stages() const = 0;
  /// Builds stage k; `scratch_base` is the address of this job's scratch area.
  virtual JobPtr stage(int k, Addr scratch_base) const = 0;
  /// Words of scratch space in the frame.
  virtual std::uint64_t scratch() const { return 0; }

 private:
  void compute_offsets() const;

  int next_ = 0;
  CoreId last_start_core_ = -1;
  mutable std::vector<int> offsets_;
};

/// Type-0 sequential base case executed in a single step.
class BaseJob : public Job {
 public:
  JobKind kind() const override { return JobKind::Base; }
  int levels() const override { return 0; }
  std::uint64_t locals() const override { return 0; }
  Action step(Ctx& c) override {
    run(c);
    return Action::done();
  }
  virtual void run(Ctx& c) = 0;
};

}  // namespace pwssim::compute
