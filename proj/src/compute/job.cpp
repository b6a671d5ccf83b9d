// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pwssim/compute/job.hpp"

namespace pwssim::compute {

const char* to_string(JobKind k) {
  switch (k) {
    case JobKind::BpFork: return "bp-fork";
    case JobKind::BpLeaf: return "bp-leaf";
    case JobKind::Fanout: return "fanout";
    case JobKind::Seq: return "hbp-call";
    case JobKind::Base: return "base";
  }
  return "?";
}

RangeNode::RangeNode(std::shared_ptr<RangeKernel> k, std::uint64_t lo, std::uint64_t hi, Addr link)
    : kernel_(std::move(k)), lo_(lo), hi_(hi), link_(link) {
  if (hi <= lo) throw Error("empty BP range");
}

Action RangeNode::step(Ctx& c) {
  Addr extra = c.local(2);
  if (pc_ == 0) {
    c.wr(c.local(0), lo_);
    c.wr(c.local(1), hi_);
    if (hi_ - lo_ == 1) {
      kernel_->leaf(c, lo_, link_);
      return Action::done();
    }
    std::uint64_t mid = split(lo_, hi_);
    kernel_->head(c, extra, lo_, mid, hi_, link_);
    pc_ = 1;
    return Action::fork(std::make_unique<RangeNode>(kernel_, lo_, mid, kernel_->child_link(extra, 0)),
                        std::make_unique<RangeNode>(kernel_, mid, hi_, kernel_->child_link(extra, 1)));
  }
  if (kernel_->has_up()) kernel_->up(c, extra, lo_, hi_, link_);
  return Action::done();
}

FanoutNode::FanoutNode(std::shared_ptr<SubFactory> make, std::uint64_t lo, std::uint64_t hi,
                       std::uint64_t sub_size, int sub_levels, int leaf_depth)
    : make_(std::move(make)), lo_(lo), hi_(hi), sub_size_(sub_size), sub_levels_(sub_levels),
      leaf_depth_(leaf_depth) {
  if (hi - lo < 2) throw Error("fanout node needs at least two subproblems");
}

JobPtr FanoutNode::child(std::uint64_t lo, std::uint64_t hi) const {
  if (hi - lo == 1) {
    JobPtr j = (*make_)(lo);
    j->priority = priority - leaf_depth_;
    return j;
  }
  return std::make_unique<FanoutNode>(make_, lo, hi, sub_size_, sub_levels_, leaf_depth_ - 1);
}

Action FanoutNode::step(Ctx& c) {
  if (pc_ == 0) {
    c.wr(c.local(0), lo_);
    c.wr(c.local(1), hi_);
    pc_ = 1;
    std::uint64_t mid = lo_ + (hi_ - lo_) / 2;
    return Action::fork(child(lo_, mid), child(mid, hi_));
  }
  return Action::done();
}

JobPtr make_fanout(SubFactory make, std::uint64_t v) {
  if (v == 0) throw Error("fanout of zero subproblems");
  JobPtr first = make(0);
  if (v == 1) return first;
  return std::make_unique<FanoutNode>(std::make_shared<SubFactory>(std::move(make)), 0, v,
                                      first->size(), first->levels(), ceil_log2(v));
}

void SeqJob::compute_offsets() const {
  if (!offsets_.empty()) return;
  int k = stages();
  offsets_.assign(k + 1, 0);
  for (int j = 0; j < k; ++j) offsets_[j + 1] = offsets_[j] + stage(j, 0)->levels() + 1;
}

int SeqJob::levels() const {
  compute_offsets();
  return offsets_.back();
}

Action SeqJob::step(Ctx& c) {
  compute_offsets();
  if (next_ == stages()) return Action::done();
  int prio = priority - 1 - offsets_[next_];
  if (next_ > 0 && c.hooks) c.hooks->collection_boundary(prio, c.core != last_start_core_);
  last_start_core_ = c.core;
  JobPtr child = stage(next_, c.local(0));
  child->priority = prio;
  ++next_;
  return Action::call(std::move(child));
}

}  // namespace pwssim::compute
