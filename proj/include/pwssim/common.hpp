// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pwssim {

using Word = std::uint64_t;
using Addr = std::uint64_t;
using BlockId = std::uint64_t;
using Tick = std::int64_t;
using CoreId = int;

inline constexpr Addr kNoAddr = ~Addr{0};
inline constexpr int kMaxCores = 64;

struct AddrRange {
  Addr base = 0;
  std::uint64_t size = 0;

  Addr end() const { return base + size; }
  bool contains(Addr a) const { return a >= base && a < base + size; }
  Addr at(std::uint64_t i) const { return base + i; }
};

/// Base of every exception thrown by the simulator core.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or too-small configuration (usage errors, arena exhaustion).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An access the simulated program must never make, e.g. to unallocated memory.
class FaultError : public Error {
 public:
  using Error::Error;
};

/// A checked protocol or scheduler invariant was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

inline Word word_from_double(double d) { return std::bit_cast<Word>(d); }
inline double word_to_double(Word w) { return std::bit_cast<double>(w); }

inline bool is_pow2(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

/// ceil(log2(x)) for x >= 1.
inline int ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0 : 64 - std::countl_zero(x - 1);
}

/// floor(log2(x)) for x >= 1.
inline int floor_log2(std::uint64_t x) { return 63 - std::countl_zero(x); }

}  // namespace pwssim
