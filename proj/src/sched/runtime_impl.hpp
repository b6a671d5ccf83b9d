// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <limits>
#include <vector>

#include "pwssim/sched/runtime.hpp"

namespace pwssim::sched {

constexpr std::size_t kNoRecord = std::numeric_limits<std::size_t>::max();
constexpr Tick kNever = std::numeric_limits<Tick>::max();

struct Runtime::Stack {
  AddrRange region;
  Addr top = 0;
  int id = 0;
  CoreId arena = 0;
};

struct Runtime::Task {
  compute::JobPtr job;
  Task* parent = nullptr;
  bool forked = false;
  bool started = false;
  bool stolen = false;
  bool owns_stack = false;
  std::uint64_t id = 0;
  int prio = 0;
  Stack* stack = nullptr;
  Addr saved_top = 0;
  Addr frame = kNoAddr;
  int pending = 0;
  CoreId fork_core = -1;
  std::size_t record = kNoRecord;
};

struct Runtime::Core {
  enum Mode { Busy, Thief, Grabbing, Off } mode = Off;
  Task* cur = nullptr;
  std::deque<Task*> dq;  // front = top (steal end), back = bottom (owner end)
  int gen_bound = 0;     // highest priority this core may still push
  Tick request = 0;      // when its current steal request was issued
  Tick idle_from = 0;
  Tick work_ticks = 0;   // part of the current wait during which stealable work existed
  Tick next_attempt = kNever;
  std::vector<std::pair<Tick, Tick>> idle_spans;
};

struct Runtime::Entry {
  bool present = false;
  bool real = false;  // a deque head; otherwise a flagged upper bound
  int prio = 0;
  std::uint64_t task = 0;
};

struct Runtime::Grab {
  Tick at;
  CoreId thief;
  CoreId victim;
  std::uint64_t task;
  int prio;
  std::uint64_t round;
};

}  // namespace pwssim::sched
