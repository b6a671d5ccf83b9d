// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pwssim/memsim/machine.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace pwssim::mem {

namespace {
inline std::uint64_t bit(CoreId c) { return std::uint64_t{1} << c; }
}  // namespace

void CostModel::validate() const {
  if (hit_cost < 1 || miss_cost < 1 || steal_cost < 1 || sched_interval < 1)
    throw ConfigError("all costs must be >= 1");
  if (miss_cost < hit_cost) throw ConfigError("miss cost must be >= hit cost");
}

void MachineConfig::validate() const {
  if (p < 1 || p > kMaxCores) throw ConfigError("p must be in [1, 64]");
  if (!is_pow2(M) || !is_pow2(B)) throw ConfigError("M and B must be powers of two");
  if (M < B) throw ConfigError("M must be >= B");
  if (B > 4096) throw ConfigError("B must be <= 4096");
  cost.validate();
}

const char* to_string(TransferKind k) {
  switch (k) {
    case TransferKind::Cold: return "cold";
    case TransferKind::Capacity: return "capacity";
    case TransferKind::Invalidation: return "invalidation";
    case TransferKind::Upgrade: return "upgrade";
    case TransferKind::Queue: return "queue";
  }
  return "?";
}

CoreCounters& CoreCounters::operator+=(const CoreCounters& o) {
  reads += o.reads;
  writes += o.writes;
  hits += o.hits;
  cold += o.cold;
  capacity += o.capacity;
  invalidation += o.invalidation;
  upgrade += o.upgrade;
  coherence += o.coherence;
  stack_invalidation += o.stack_invalidation;
  queue_ticks += o.queue_ticks;
  invalidation_ticks += o.invalidation_ticks;
  return *this;
}

// ---------------------------------------------------------------- LruCache

LruCache::LruCache(std::uint64_t capacity) : capacity_(capacity) {
  index_.reserve(capacity * 2);
  nodes_.reserve(capacity);
}

void LruCache::unlink(std::uint32_t i) {
  Node& n = nodes_[i];
  if (n.prev != kNil) nodes_[n.prev].next = n.next; else head_ = n.next;
  if (n.next != kNil) nodes_[n.next].prev = n.prev; else tail_ = n.prev;
}

void LruCache::push_front(std::uint32_t i) {
  Node& n = nodes_[i];
  n.prev = kNil;
  n.next = head_;
  if (head_ != kNil) nodes_[head_].prev = i;
  head_ = i;
  if (tail_ == kNil) tail_ = i;
}

bool LruCache::touch(BlockId b) {
  auto it = index_.find(b);
  if (it == index_.end()) return false;
  if (it->second != head_) {
    unlink(it->second);
    push_front(it->second);
  }
  return true;
}

std::optional<BlockId> LruCache::insert(BlockId b) {
  std::optional<BlockId> evicted;
  if (index_.size() >= capacity_) {
    std::uint32_t victim = tail_;
    evicted = nodes_[victim].block;
    unlink(victim);
    index_.erase(nodes_[victim].block);
    free_.push_back(victim);
  }
  std::uint32_t i;
  if (!free_.empty()) {
    i = free_.back();
    free_.pop_back();
  } else {
    i = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
  }
  nodes_[i].block = b;
  push_front(i);
  index_.emplace(b, i);
  return evicted;
}

bool LruCache::erase(BlockId b) {
  auto it = index_.find(b);
  if (it == index_.end()) return false;
  unlink(it->second);
  free_.push_back(it->second);
  index_.erase(it);
  return true;
}

std::vector<BlockId> LruCache::order() const {
  std::vector<BlockId> out;
  for (std::uint32_t i = head_; i != kNil; i = nodes_[i].next) out.push_back(nodes_[i].block);
  return out;
}

// ----------------------------------------------------------------- Machine

Machine::Machine(MachineConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  clock_.assign(cfg_.p, 0);
  counters_.assign(cfg_.p, {});
  caches_.reserve(cfg_.p);
  for (int c = 0; c < cfg_.p; ++c) caches_.emplace_back(cfg_.cache_blocks());
  stack_top_.resize(cfg_.p);
  for (int c = 0; c < cfg_.p; ++c) stack_top_[c] = kStackBase + kCoreArenaSpan * Addr(c);
}

Machine::~Machine() = default;

Machine::Page* Machine::find_page(Addr a) const {
  Addr pn = a >> kPageShift;
  auto& slot = page_cache_[pn & (page_cache_.size() - 1)];
  if (slot.second && slot.first == pn) return slot.second;
  auto it = pages_.find(pn);
  if (it == pages_.end()) return nullptr;
  slot = {pn, it->second.get()};
  return it->second.get();
}

Machine::Page& Machine::page_for_commit(Addr a) {
  if (Page* pg = find_page(a)) return *pg;
  auto pg = std::make_unique<Page>();
  pg->dir.resize(kPageWords >= cfg_.B ? kPageWords / cfg_.B : 1);
  Page* raw = pg.get();
  pages_.emplace(a >> kPageShift, std::move(pg));
  return *raw;
}

void Machine::commit(AddrRange r) {
  if (r.size == 0) return;
  Addr first = r.base - r.base % cfg_.B;
  for (Addr a = first; a < r.end(); a += cfg_.B) {
    Page& pg = page_for_commit(a);
    pg.dir[(a & (kPageWords - 1)) / cfg_.B].committed = true;
  }
  for (Addr a = r.base; a < r.end(); ++a) {
    Page& pg = *find_page(a);
    pg.wcount[a & (kPageWords - 1)] = 0;
  }
}

AddrRange Machine::alloc(CoreId core, std::uint64_t nwords) {
  if (core < 0 || core >= cfg_.p) throw ConfigError("alloc: bad core id");
  if (nwords < 1) throw ConfigError("alloc: nwords must be >= 1");
  std::uint64_t rounded = (nwords + cfg_.B - 1) / cfg_.B * cfg_.B;
  if (global_top_ + rounded > kGlobalLimit) throw ConfigError("global arena exhausted");
  AddrRange r{global_top_, rounded};
  global_top_ += rounded;
  commit(r);
  return r;
}

AddrRange Machine::reserve_stack(CoreId core, std::uint64_t capacity) {
  if (core < 0 || core >= cfg_.p) throw ConfigError("reserve_stack: bad core id");
  std::uint64_t rounded = (std::max<std::uint64_t>(capacity, 1) + cfg_.B - 1) / cfg_.B * cfg_.B;
  Addr limit = kStackBase + kCoreArenaSpan * Addr(core + 1);
  if (stack_top_[core] + rounded > limit) throw ConfigError("stack arena exhausted");
  AddrRange r{stack_top_[core], rounded};
  stack_top_[core] += rounded;
  return r;
}

Machine::Page& Machine::checked_page(Addr a, DirEntry*& entry) {
  Page* pg = find_page(a);
  if (!pg) goto fault;
  entry = &pg->dir[(a & (kPageWords - 1)) / cfg_.B];
  if (!entry->committed) goto fault;
  return *pg;
fault:
  std::ostringstream os;
  os << "access to unallocated address " << a;
  throw FaultError(os.str());
}

Machine::DirEntry& Machine::dir_of(BlockId b) {
  Addr a = b * cfg_.B;
  Page* pg = find_page(a);
  return pg->dir[(a & (kPageWords - 1)) / cfg_.B];
}

TransferKind Machine::classify(CoreId core, const DirEntry& d) const {
  if (!(d.ever & bit(core))) return TransferKind::Cold;
  if (d.lost & bit(core)) return TransferKind::Invalidation;
  return TransferKind::Capacity;
}

void Machine::transfer(CoreId core, BlockId b, DirEntry& d, TransferKind kind, bool insert) {
  Tick& clk = clock_[core];
  CoreCounters& cc = counters_[core];
  Tick start = std::max(clk, d.busy_until);
  Tick queued = start - clk;
  if (queued > 0) {
    cc.queue_ticks += queued;
    if (cfg_.event_log) events_.push_back({clk, core, b, TransferKind::Queue, queued});
  }
  d.busy_until = start + cfg_.cost.miss_cost;
  Tick latency = queued + cfg_.cost.miss_cost;
  if (cfg_.event_log) events_.push_back({start, core, b, kind, cfg_.cost.miss_cost});
  clk += latency;
  switch (kind) {
    case TransferKind::Cold: ++cc.cold; break;
    case TransferKind::Capacity: ++cc.capacity; break;
    case TransferKind::Invalidation:
      ++cc.invalidation;
      cc.invalidation_ticks += latency;
      if (is_stack(b * cfg_.B)) ++cc.stack_invalidation;
      break;
    case TransferKind::Upgrade: ++cc.upgrade; break;
    case TransferKind::Queue: break;
  }
  if (insert) {
    if (auto ev = caches_[core].insert(b)) {
      DirEntry& e = dir_of(*ev);
      e.holders &= ~bit(core);
      if (e.dirty == core) e.dirty = -1;  // write-back, folded into miss cost
    }
    d.holders |= bit(core);
    d.ever |= bit(core);
    d.lost &= ~bit(core);
  } else {
    caches_[core].touch(b);
  }
}

void Machine::invalidate_others(CoreId core, BlockId b, DirEntry& d) {
  std::uint64_t others = d.holders & ~bit(core);
  while (others) {
    int o = std::countr_zero(others);
    others &= others - 1;
    caches_[o].erase(b);
    d.lost |= bit(o);
  }
  d.holders &= bit(core);
}

void Machine::check_entry(const DirEntry& d) {
  if (d.dirty >= 0 && d.holders != bit(d.dirty)) ++coherence_violations_;
}

Word Machine::read(CoreId core, Addr a) {
  DirEntry* d = nullptr;
  Page& pg = checked_page(a, d);
  BlockId b = block_of(a);
  CoreCounters& cc = counters_[core];
  ++cc.reads;
  if (d->holders & bit(core)) {
    caches_[core].touch(b);
    clock_[core] += cfg_.cost.hit_cost;
    ++cc.hits;
  } else {
    TransferKind kind = classify(core, *d);
    if (d->dirty >= 0) {
      ++cc.coherence;
      d->dirty = -1;  // downgrade the remote copy to clean-shared
    }
    transfer(core, b, *d, kind, true);
  }
  check_entry(*d);
  if (observer_) observer_->on_access(core, a, false);
  return pg.words[a & (kPageWords - 1)];
}

void Machine::note_write(Page& pg, Addr a) {
  auto& cnt = pg.wcount[a & (kPageWords - 1)];
  if (cnt < 255) ++cnt;
  if (cnt > max_writes_) {
    max_writes_ = cnt;
    max_writes_addr_ = a;
  }
}

void Machine::write(CoreId core, Addr a, Word v) {
  DirEntry* d = nullptr;
  Page& pg = checked_page(a, d);
  BlockId b = block_of(a);
  CoreCounters& cc = counters_[core];
  ++cc.writes;
  bool held = d->holders & bit(core);
  if (held && (d->dirty == core || d->holders == bit(core))) {
    // Exclusive copy: dirty already, or the sole clean holder.
    caches_[core].touch(b);
    clock_[core] += cfg_.cost.hit_cost;
    ++cc.hits;
    d->dirty = static_cast<std::int16_t>(core);
  } else if (held) {
    invalidate_others(core, b, *d);
    transfer(core, b, *d, TransferKind::Upgrade, false);
    d->dirty = static_cast<std::int16_t>(core);
  } else {
    TransferKind kind = classify(core, *d);
    if (d->dirty >= 0) ++cc.coherence;
    invalidate_others(core, b, *d);
    d->dirty = -1;
    transfer(core, b, *d, kind, true);
    d->dirty = static_cast<std::int16_t>(core);
  }
  check_entry(*d);
  pg.words[a & (kPageWords - 1)] = v;
  note_write(pg, a);
  if (observer_) observer_->on_access(core, a, true);
}

Word Machine::peek(Addr a) const {
  Page* pg = find_page(a);
  if (!pg) throw FaultError("peek of unallocated address");
  return pg->words[a & (kPageWords - 1)];
}

void Machine::poke(Addr a, Word v) {
  Page* pg = find_page(a);
  if (!pg || !pg->dir[(a & (kPageWords - 1)) / cfg_.B].committed)
    throw FaultError("poke of unallocated address");
  pg->words[a & (kPageWords - 1)] = v;
}

CoreCounters Machine::totals() const {
  CoreCounters t;
  for (const auto& c : counters_) t += c;
  return t;
}

std::uint32_t Machine::writes_at(Addr a) const {
  Page* pg = find_page(a);
  return pg ? pg->wcount[a & (kPageWords - 1)] : 0;
}

std::uint64_t Machine::block_delay(BlockId block, Tick t0, Tick t1) const {
  if (delay_indexed_ != events_.size()) {
    delay_index_.clear();
    for (const auto& e : events_)
      if (e.kind != TransferKind::Queue) delay_index_[e.block].push_back(e.tick);
    for (auto& [blk, ticks] : delay_index_) std::sort(ticks.begin(), ticks.end());
    delay_indexed_ = events_.size();
  }
  auto it = delay_index_.find(block);
  if (it == delay_index_.end()) return 0;
  const auto& v = it->second;
  return std::upper_bound(v.begin(), v.end(), t1) - std::lower_bound(v.begin(), v.end(), t0);
}

std::uint64_t Machine::holders(BlockId b) const {
  Page* pg = find_page(b * cfg_.B);
  return pg ? pg->dir[((b * cfg_.B) & (kPageWords - 1)) / cfg_.B].holders : 0;
}

int Machine::dirty_owner(BlockId b) const {
  Page* pg = find_page(b * cfg_.B);
  return pg ? pg->dir[((b * cfg_.B) & (kPageWords - 1)) / cfg_.B].dirty : -1;
}

void Machine::check_coherence() const {
  std::vector<std::uint64_t> resident(cfg_.p, 0);
  for (const auto& [pn, pg] : pages_) {
    for (std::size_t i = 0; i < pg->dir.size(); ++i) {
      const DirEntry& d = pg->dir[i];
      BlockId b = ((pn << kPageShift) / cfg_.B) + i;
      if (d.dirty >= 0 && d.holders != bit(d.dirty))
        throw InvariantError("dirty block held by more than its owner");
      std::uint64_t h = d.holders;
      while (h) {
        int c = std::countr_zero(h);
        h &= h - 1;
        if (!caches_[c].contains(b)) throw InvariantError("directory lists a non-resident holder");
        ++resident[c];
      }
    }
  }
  for (int c = 0; c < cfg_.p; ++c) {
    if (resident[c] != caches_[c].size()) throw InvariantError("cache holds untracked blocks");
    if (caches_[c].size() > cfg_.cache_blocks()) throw InvariantError("cache over capacity");
  }
}

}  // namespace pwssim::mem
