// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// The algorithm suite. Every algorithm is a job tree over simulated memory
// plus a host-side reference implementation used to check its output.
//
// Sizes: for array algorithms n is the element count; for matrix algorithms
// n is the side length. Complex values take two words (re, im).

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pwssim/compute/descriptor.hpp"
#include "pwssim/compute/job.hpp"
#include "pwssim/memsim/machine.hpp"

namespace pwssim::algos {

using compute::JobPtr;
using cplx = std::complex<double>;

enum class Alg : std::uint8_t {
  Msum,
  PrefixSums,
  MtBi,
  RmToBi,
  BiToRmDirect,
  BiToRmGapped,
  BiToRmFft,
  MatrixAdd,
  Strassen,
  DepthNMM,
  Fft,
};

/// Declared structural and cost parameters of one algorithm.
struct AlgorithmSpec {
  std::string name;
  Alg alg;
  bool matrix;              // n is a side length
  int type;                 // HBP type
  compute::FTag f;
  compute::LTag L;
  std::string work;         // W(n)
  std::string span;         // T_inf(n)
  std::string cache;        // Q(n, M, B)
  std::string tall_cache;   // Gamma(B), "" if none
  unsigned write_budget;    // max writes to any address
};

const std::vector<AlgorithmSpec>& registry();
/// Throws ConfigError for unknown names.
const AlgorithmSpec& find(const std::string& name);
/// HBP structure at size n.
compute::HBPDescriptor describe(const AlgorithmSpec& spec, std::uint64_t n);
/// Checks size restrictions; throws ConfigError.
void validate_size(const AlgorithmSpec& spec, std::uint64_t n);

struct CheckResult {
  bool ok = false;
  double max_error = 0;
  std::uint64_t mismatches = 0;
};

/// A ready-to-run instance: inputs are in memory, `root` computes the output.
struct Problem {
  const AlgorithmSpec* spec = nullptr;
  std::uint64_t n = 0;
  JobPtr root;
  std::vector<AddrRange> inputs;
  AddrRange output;
  std::function<CheckResult(const mem::Machine&)> check;
};

struct SetupOptions {
  std::uint64_t seed = 1;
  /// Random fills every input; Ones sets every input word to 1; SecondZero and
  /// SecondIdentity keep the first input random and make the second 0 or I.
  enum class Fill : std::uint8_t { Random, Ones, SecondZero, SecondIdentity } fill = Fill::Random;
};

Problem setup(const AlgorithmSpec& spec, mem::Machine& m, std::uint64_t n, const SetupOptions& opt);

// ------------------------------------------------------------ job builders

JobPtr msum_job(Addr in, std::uint64_t n, Addr out);
JobPtr prefix_sums_job(Addr in, Addr out, std::uint64_t n);
JobPtr mt_bi_job(Addr in, Addr out, std::uint64_t side, unsigned w = 1);
JobPtr rm_to_bi_job(Addr in, Addr out, std::uint64_t side, unsigned w = 1);
JobPtr bi_to_rm_direct_job(Addr in, Addr out, std::uint64_t side, unsigned w = 1);
/// `gapped` must hold GapLayout(side).words() words.
JobPtr bi_to_rm_gapped_job(Addr in, Addr gapped, Addr out, std::uint64_t side);
JobPtr bi_to_rm_fft_job(Addr in, Addr out, std::uint64_t side, unsigned w = 1);
JobPtr matrix_add_job(Addr a, Addr b, Addr c, std::uint64_t side);
JobPtr strassen_job(Addr a, Addr b, Addr c, std::uint64_t side);
JobPtr depth_n_mm_job(Addr a, Addr b, Addr c, std::uint64_t side);
/// Read-only twiddle tables, one per FFT size reached by the recursion. The
/// table for size m lists w_m^(j * k) in the order the scaling pass visits it.
struct TwiddleTables {
  std::map<std::uint64_t, AddrRange> by_size;
  Addr at(std::uint64_t m) const;
};
/// Row count R of the R x C split used at size n (C = n / R).
std::uint64_t fft_rows(std::uint64_t n);
TwiddleTables make_twiddles(mem::Machine& m, std::uint64_t n);
JobPtr fft_job(Addr in, Addr out, std::uint64_t n, std::shared_ptr<const TwiddleTables> tw);

/// Row-major matrix with gaps between the rows of recursive subarrays.
class GapLayout {
 public:
  explicit GapLayout(std::uint64_t side);
  static std::uint64_t gap(std::uint64_t r);
  std::uint64_t side() const { return side_; }
  std::uint64_t stride() const { return stride_; }
  std::uint64_t words() const { return side_ * stride_; }
  std::uint64_t offset(std::uint64_t row, std::uint64_t col) const {
    return row * stride_ + colpos_[col];
  }

 private:
  std::uint64_t side_, stride_;
  std::vector<std::uint64_t> colpos_;
};

// ---------------------------------------------------------------- oracles

namespace oracle {
std::vector<Word> prefix_sums(const std::vector<Word>& a);
std::vector<Word> transpose_bi(const std::vector<Word>& a, std::uint64_t side);
std::vector<Word> rm_to_bi(const std::vector<Word>& a, std::uint64_t side);
std::vector<Word> bi_to_rm(const std::vector<Word>& a, std::uint64_t side);
/// Naive product of BI matrices in wrapping word arithmetic.
std::vector<Word> matmul_bi(const std::vector<Word>& a, const std::vector<Word>& b, std::uint64_t side);
std::vector<cplx> dft(const std::vector<cplx>& x);
}  // namespace oracle

}  // namespace pwssim::algos
