// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Word-addressed shared memory with p private, fully associative LRU caches
// of M words in B-word blocks, kept coherent by write-invalidate.
//
// Every core owns a virtual clock. Accesses are charged hit_cost or miss_cost
// ticks on the issuing core's clock. A block can be in flight to only one
// core at a time: a request arriving while an earlier transfer of the same
// block is still in progress waits for it (queue delay), which serves
// same-tick requests in the order they are issued.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pwssim/common.hpp"

namespace pwssim::mem {

struct CostModel {
  Tick hit_cost = 1;
  Tick miss_cost = 10;       // b
  Tick steal_cost = 20;      // s_P, charged to a thief per successful steal
  Tick sched_interval = 1;   // k, ticks per scheduler step

  void validate() const;
};

struct MachineConfig {
  int p = 1;
  std::uint64_t M = 1u << 15;  // words per cache
  std::uint64_t B = 64;        // words per block
  CostModel cost;
  bool event_log = false;

  std::uint64_t cache_blocks() const { return M / B; }
  void validate() const;
};

enum class TransferKind : std::uint8_t { Cold, Capacity, Invalidation, Upgrade, Queue };

const char* to_string(TransferKind k);

/// One block transfer into a cache (or, for Queue, time spent waiting for one).
struct TransferEvent {
  Tick tick;
  CoreId core;
  BlockId block;
  TransferKind kind;
  Tick latency;
};

struct CoreCounters {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t hits = 0;
  std::uint64_t cold = 0;
  std::uint64_t capacity = 0;
  std::uint64_t invalidation = 0;   // block misses
  std::uint64_t upgrade = 0;        // shared -> exclusive with other holders present
  std::uint64_t coherence = 0;      // fetches that found the block dirty elsewhere
  std::uint64_t stack_invalidation = 0;
  Tick queue_ticks = 0;
  Tick invalidation_ticks = 0;      // latency (incl. queueing) of invalidation misses

  std::uint64_t misses() const { return cold + capacity + invalidation + upgrade; }
  std::uint64_t cold_capacity() const { return cold + capacity; }
  CoreCounters& operator+=(const CoreCounters& o);
};

/// Receives every simulated access after it has been charged.
class AccessObserver {
 public:
  virtual ~AccessObserver() = default;
  virtual void on_access(CoreId core, Addr addr, bool is_write) = 0;
};

/// Fully associative LRU set of block ids with O(1) touch/insert/erase.
class LruCache {
 public:
  explicit LruCache(std::uint64_t capacity);

  bool contains(BlockId b) const { return index_.count(b) != 0; }
  /// Moves b to the MRU position; false if b is not resident.
  bool touch(BlockId b);
  /// Inserts b as MRU (b must not be resident); returns the evicted block, if any.
  std::optional<BlockId> insert(BlockId b);
  bool erase(BlockId b);
  std::size_t size() const { return index_.size(); }
  std::uint64_t capacity() const { return capacity_; }
  /// Resident blocks from most to least recently used.
  std::vector<BlockId> order() const;

 private:
  struct Node {
    BlockId block;
    std::uint32_t prev, next;
  };
  static constexpr std::uint32_t kNil = ~std::uint32_t{0};

  void unlink(std::uint32_t i);
  void push_front(std::uint32_t i);

  std::uint64_t capacity_;
  std::unordered_map<BlockId, std::uint32_t> index_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_;
  std::uint32_t head_ = kNil, tail_ = kNil;
};

class Machine {
 public:
  static constexpr Addr kGlobalBase = 0;
  static constexpr Addr kStackBase = Addr{1} << 44;
  static constexpr Addr kCoreArenaSpan = Addr{1} << 38;
  static constexpr Addr kGlobalLimit = kStackBase;

  explicit Machine(MachineConfig cfg);
  ~Machine();
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  const MachineConfig& config() const { return cfg_; }
  int cores() const { return cfg_.p; }
  std::uint64_t block_words() const { return cfg_.B; }
  BlockId block_of(Addr a) const { return a / cfg_.B; }

  /// Block-aligned range of ceil(nwords/B)*B words in the global arena.
  AddrRange alloc(CoreId core, std::uint64_t nwords);
  /// Reserves a block-aligned execution-stack region in `core`'s stack arena.
  /// Words become accessible only once committed.
  AddrRange reserve_stack(CoreId core, std::uint64_t capacity);
  /// Makes a reserved range accessible and starts fresh write counts on it.
  void commit(AddrRange r);
  bool is_stack(Addr a) const { return a >= kStackBase; }

  Word read(CoreId core, Addr a);
  void write(CoreId core, Addr a, Word v);
  double readf(CoreId core, Addr a) { return word_to_double(read(core, a)); }
  void writef(CoreId core, Addr a, double v) { write(core, a, word_from_double(v)); }

  /// Untracked access for setup and verification: no cost, no cache effects.
  Word peek(Addr a) const;
  void poke(Addr a, Word v);

  Tick now(CoreId c) const { return clock_[c]; }
  void advance(CoreId c, Tick dt) { clock_[c] += dt; }
  void set_now(CoreId c, Tick t) { clock_[c] = t; }

  const std::vector<CoreCounters>& counters() const { return counters_; }
  CoreCounters totals() const;

  std::uint32_t writes_at(Addr a) const;
  std::uint32_t max_writes() const { return max_writes_; }
  Addr max_writes_addr() const { return max_writes_addr_; }
  /// Single-writer violations seen on any access (always expected to be 0).
  std::uint64_t coherence_violations() const { return coherence_violations_; }

  const std::vector<TransferEvent>& events() const { return events_; }
  /// Number of transfers of `block` with tick in [t0, t1]. Needs the event log.
  std::uint64_t block_delay(BlockId block, Tick t0, Tick t1) const;

  /// Checks every directory entry: at most one dirty holder, dirty implies sole holder,
  /// and the directory agrees with the caches. Throws InvariantError.
  void check_coherence() const;
  std::vector<BlockId> lru_order(CoreId c) const { return caches_[c].order(); }
  std::uint64_t holders(BlockId b) const;
  int dirty_owner(BlockId b) const;

  void set_observer(AccessObserver* obs) { observer_ = obs; }

 private:
  struct DirEntry {
    std::uint64_t holders = 0;
    std::uint64_t ever = 0;   // cores that have held the block
    std::uint64_t lost = 0;   // cores whose copy was removed by a remote write
    Tick busy_until = 0;
    std::int16_t dirty = -1;
    bool committed = false;
  };
  static constexpr int kPageShift = 12;
  static constexpr Addr kPageWords = Addr{1} << kPageShift;
  struct Page {
    std::array<Word, kPageWords> words{};
    std::array<std::uint8_t, kPageWords> wcount{};
    std::vector<DirEntry> dir;
  };

  Page* find_page(Addr a) const;
  Page& page_for_commit(Addr a);
  Page& checked_page(Addr a, DirEntry*& entry);
  DirEntry& dir_of(BlockId b);
  TransferKind classify(CoreId core, const DirEntry& d) const;
  void transfer(CoreId core, BlockId b, DirEntry& d, TransferKind kind, bool insert);
  void invalidate_others(CoreId core, BlockId b, DirEntry& d);
  void note_write(Page& pg, Addr a);
  void check_entry(const DirEntry& d);

  MachineConfig cfg_;
  std::vector<Tick> clock_;
  std::vector<LruCache> caches_;
  std::vector<CoreCounters> counters_;
  std::unordered_map<Addr, std::unique_ptr<Page>> pages_;
  mutable std::array<std::pair<Addr, Page*>, 64> page_cache_{};
  Addr global_top_ = kGlobalBase;
  std::vector<Addr> stack_top_;
  std::vector<TransferEvent> events_;
  mutable std::unordered_map<BlockId, std::vector<Tick>> delay_index_;
  mutable std::size_t delay_indexed_ = 0;
  std::uint32_t max_writes_ = 0;
  Addr max_writes_addr_ = kNoAddr;
  std::uint64_t coherence_violations_ = 0;
  AccessObserver* observer_ = nullptr;
};

}  // namespace pwssim::mem
