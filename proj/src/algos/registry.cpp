// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pwssim/algos/algos.hpp"
#include "pwssim/compute/layout.hpp"

namespace pwssim::algos {

using compute::FTag;
using compute::HBPDescriptor;
using compute::LTag;

const std::vector<AlgorithmSpec>& registry() {
  static const std::vector<AlgorithmSpec> r = {
      {"msum", Alg::Msum, false, 1, FTag::Const, LTag::Const, "n", "log n", "n/B", "", 3},
      {"prefix_sums", Alg::PrefixSums, false, 1, FTag::Const, LTag::Const, "n", "log n", "n/B", "", 3},
      {"mt_bi", Alg::MtBi, true, 1, FTag::Const, LTag::Const, "n^2", "log n", "n^2/B", "", 3},
      {"rm_to_bi", Alg::RmToBi, true, 1, FTag::Sqrt, LTag::Const, "n^2", "log n", "n^2/B", "", 3},
      {"bi_to_rm_direct", Alg::BiToRmDirect, true, 1, FTag::Sqrt, LTag::Sqrt, "n^2", "log n", "n^2/B", "",
       3},
      {"bi_to_rm_gapped", Alg::BiToRmGapped, true, 1, FTag::Sqrt, LTag::Gap, "n^2", "log n", "n^2/B", "",
       3},
      {"bi_to_rm_fft", Alg::BiToRmFft, true, 2, FTag::Sqrt, LTag::Const, "n^2 log log n", "log n",
       "(n^2/B) log_M n", "M >= B^2", 3},
      {"matrix_add", Alg::MatrixAdd, true, 1, FTag::Const, LTag::Const, "n^2", "log n", "n^2/B", "", 3},
      {"strassen", Alg::Strassen, true, 2, FTag::Const, LTag::Const, "n^lambda", "log^2 n",
       "n^lambda/(B M^(lambda/2-1))", "M >= B^2", 3},
      {"depth_n_mm", Alg::DepthNMM, true, 2, FTag::Const, LTag::Const, "n^3", "n", "n^3/(B sqrt(M))",
       "M >= B^2", 3},
      {"fft", Alg::Fft, false, 2, FTag::Sqrt, LTag::Const, "n log n", "log n log log n", "(n/B) log_M n",
       "M >= B^2", 3},
  };
  return r;
}

const AlgorithmSpec& find(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  std::string known;
  for (const auto& s : registry()) known += (known.empty() ? "" : ", ") + s.name;
  throw ConfigError("unknown algorithm '" + name + "' (known: " + known + ")");
}

void validate_size(const AlgorithmSpec& spec, std::uint64_t n) {
  if (n < 1) throw ConfigError(spec.name + ": n must be >= 1");
  bool pow2_needed = spec.matrix || spec.alg == Alg::Fft;
  if (pow2_needed && !is_pow2(n)) throw ConfigError(spec.name + ": n must be a power of two");
  if (spec.matrix && n > (std::uint64_t{1} << 15)) throw ConfigError(spec.name + ": side too large");
  if (!spec.matrix && n > (std::uint64_t{1} << 30)) throw ConfigError(spec.name + ": n too large");
}

HBPDescriptor describe(const AlgorithmSpec& spec, std::uint64_t n) {
  validate_size(spec, n);
  HBPDescriptor d;
  d.type = spec.type;
  d.size = spec.matrix ? n * n : n;
  d.linear_space = true;
  d.fanout = 1;
  d.child_size = d.size;
  switch (spec.alg) {
    case Alg::PrefixSums:
    case Alg::BiToRmGapped: d.rounds = 2; break;
    case Alg::BiToRmFft:
      if (n <= 4) {
        d.type = 0;
        break;
      }
      d.fanout = n;
      d.child_size = n;
      break;
    case Alg::Strassen:
    case Alg::DepthNMM:
      if (n <= 8) {
        d.type = 0;
        break;
      }
      d.rounds = spec.alg == Alg::Strassen ? 1 : 2;
      d.fanout = spec.alg == Alg::Strassen ? 7 : 4;
      d.child_size = n * n / 4;
      break;
    case Alg::Fft:
      if (n <= 8) {
        d.type = 0;
        break;
      }
      d.rounds = 2;
      d.fanout = std::uint64_t{1} << (floor_log2(n) / 2);
      d.child_size = n / d.fanout;
      break;
    default: break;
  }
  d.validate();
  return d;
}

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  Word word() { return rng(); }
  double unit() { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2 - 1; }
};

std::vector<Word> fill_words(Gen& g, std::uint64_t n, bool ones) {
  std::vector<Word> v(n);
  for (auto& x : v) x = ones ? 1 : g.word();
  return v;
}

AddrRange put(mem::Machine& m, const std::vector<Word>& v) {
  AddrRange r = m.alloc(0, v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m.poke(r.base + i, v[i]);
  return {r.base, v.size()};
}

AddrRange out_range(mem::Machine& m, std::uint64_t n) { return {m.alloc(0, n).base, n}; }

std::vector<Word> read_back(const mem::Machine& m, AddrRange r) {
  std::vector<Word> v(r.size);
  for (std::uint64_t i = 0; i < r.size; ++i) v[i] = m.peek(r.base + i);
  return v;
}

CheckResult compare(const std::vector<Word>& got, const std::vector<Word>& want) {
  CheckResult c;
  for (std::size_t i = 0; i < want.size(); ++i)
    if (got[i] != want[i]) ++c.mismatches;
  c.ok = c.mismatches == 0 && got.size() == want.size();
  c.max_error = c.ok ? 0 : 1;
  return c;
}

void host_fft(std::vector<cplx>& a) {
  std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1)
    for (std::size_t i = 0; i < n; i += len)
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx w = std::polar(1.0, -2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len));
        cplx u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
}

constexpr std::uint64_t kNaiveDftLimit = 4096;
constexpr double kFftTolerance = 1e-9;

}  // namespace

Problem setup(const AlgorithmSpec& spec, mem::Machine& m, std::uint64_t n, const SetupOptions& opt) {
  validate_size(spec, n);
  using Fill = SetupOptions::Fill;
  Gen g(opt.seed);
  bool ones = opt.fill == Fill::Ones;
  std::uint64_t words = spec.matrix ? n * n : n;
  Problem p;
  p.spec = &spec;
  p.n = n;

  if (spec.alg == Alg::Fft) {
    std::vector<cplx> x(n);
    std::vector<Word> raw(2 * n);
    for (std::uint64_t i = 0; i < n; ++i) {
      x[i] = ones ? cplx{1, 0} : cplx{g.unit(), g.unit()};
      raw[2 * i] = word_from_double(x[i].real());
      raw[2 * i + 1] = word_from_double(x[i].imag());
    }
    AddrRange in = put(m, raw);
    auto tw = std::make_shared<const TwiddleTables>(make_twiddles(m, n));
    p.output = out_range(m, 2 * n);
    p.inputs = {in};
    for (const auto& [size, r] : tw->by_size) p.inputs.push_back(r);
    p.root = fft_job(in.base, p.output.base, n, tw);
    p.check = [x, out = p.output, n](const mem::Machine& mm) {
      std::vector<cplx> want = x;
      if (n <= kNaiveDftLimit)
        want = oracle::dft(x);
      else
        host_fft(want);
      double tol = kFftTolerance * std::max(1.0, std::sqrt(static_cast<double>(n) / kNaiveDftLimit));
      CheckResult c;
      for (std::uint64_t k = 0; k < n; ++k) {
        cplx got{word_to_double(mm.peek(out.base + 2 * k)), word_to_double(mm.peek(out.base + 2 * k + 1))};
        double e = std::abs(got - want[k]);
        if (!(e < tol)) ++c.mismatches;
        c.max_error = std::max(c.max_error, std::isnan(e) ? INFINITY : e);
      }
      c.ok = c.mismatches == 0;
      return c;
    };
    return p;
  }

  std::vector<Word> a = fill_words(g, words, ones);
  AddrRange ar = put(m, a);
  p.inputs = {ar};
  std::vector<Word> want;
  switch (spec.alg) {
    case Alg::Msum: {
      p.output = out_range(m, 1);
      p.root = msum_job(ar.base, n, p.output.base);
      Word s = 0;
      for (Word v : a) s += v;
      want = {s};
      break;
    }
    case Alg::PrefixSums:
      p.output = out_range(m, n);
      p.root = prefix_sums_job(ar.base, p.output.base, n);
      want = oracle::prefix_sums(a);
      break;
    case Alg::MtBi:
      p.output = out_range(m, words);
      p.root = mt_bi_job(ar.base, p.output.base, n);
      want = oracle::transpose_bi(a, n);
      break;
    case Alg::RmToBi:
      p.output = out_range(m, words);
      p.root = rm_to_bi_job(ar.base, p.output.base, n);
      want = oracle::rm_to_bi(a, n);
      break;
    case Alg::BiToRmDirect:
    case Alg::BiToRmFft:
      p.output = out_range(m, words);
      p.root = spec.alg == Alg::BiToRmFft ? bi_to_rm_fft_job(ar.base, p.output.base, n)
                                          : bi_to_rm_direct_job(ar.base, p.output.base, n);
      want = oracle::bi_to_rm(a, n);
      break;
    case Alg::BiToRmGapped: {
      AddrRange gap = out_range(m, GapLayout(n).words());
      p.output = out_range(m, words);
      p.inputs.push_back(gap);
      p.root = bi_to_rm_gapped_job(ar.base, gap.base, p.output.base, n);
      want = oracle::bi_to_rm(a, n);
      break;
    }
    case Alg::MatrixAdd:
    case Alg::Strassen:
    case Alg::DepthNMM: {
      std::vector<Word> b;
      if (opt.fill == Fill::SecondZero) {
        b.assign(words, 0);
      } else if (opt.fill == Fill::SecondIdentity) {
        b.assign(words, 0);
        for (std::uint64_t i = 0; i < n; ++i) b[compute::bi_index(i, i)] = 1;
      } else {
        b = fill_words(g, words, ones);
      }
      AddrRange br = put(m, b);
      p.inputs.push_back(br);
      p.output = out_range(m, words);
      Addr c = p.output.base;
      if (spec.alg == Alg::MatrixAdd) {
        p.root = matrix_add_job(ar.base, br.base, c, n);
        want.resize(words);
        for (std::uint64_t i = 0; i < words; ++i) want[i] = a[i] + b[i];
      } else {
        p.root = spec.alg == Alg::Strassen ? strassen_job(ar.base, br.base, c, n)
                                           : depth_n_mm_job(ar.base, br.base, c, n);
        want = oracle::matmul_bi(a, b, n);
      }
      break;
    }
    case Alg::Fft: break;
  }
  p.check = [want = std::move(want), out = p.output](const mem::Machine& mm) {
    return compare(read_back(mm, out), want);
  };
  return p;
}

}  // namespace pwssim::algos
