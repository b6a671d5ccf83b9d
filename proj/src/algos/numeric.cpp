// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "kernels.hpp"
#include "pwssim/compute/layout.hpp"

namespace pwssim::algos {

using compute::bi_index;
using compute::inorder_node;
using compute::make_fanout;
using compute::RangeNode;
using namespace detail;

namespace {

class SumKernel final : public RangeKernel {
 public:
  explicit SumKernel(Addr in) : in_(in) {}
  std::uint64_t extra_locals() const override { return 2; }
  void leaf(Ctx& c, std::uint64_t i, Addr link) override { c.wr(link, c.rd(in_ + i)); }
  bool has_up() const override { return true; }
  void up(Ctx& c, Addr extra, std::uint64_t, std::uint64_t, Addr link) override {
    c.wr(link, c.rd(extra) + c.rd(extra + 1));
  }
  Addr child_link(Addr extra, int which) const override { return extra + which; }

 private:
  Addr in_;
};

class ReduceKernel final : public RangeKernel {
 public:
  ReduceKernel(Addr in, Addr tree) : in_(in), tree_(tree) {}
  void leaf(Ctx&, std::uint64_t, Addr) override {}
  bool has_up() const override { return true; }
  void up(Ctx& c, Addr, std::uint64_t lo, std::uint64_t hi, Addr) override {
    std::uint64_t mid = RangeNode::split(lo, hi);
    c.wr(tree_ + inorder_node(lo, hi), part(c, lo, mid) + part(c, mid, hi));
  }
  Word part(Ctx& c, std::uint64_t lo, std::uint64_t hi) const {
    return hi - lo == 1 ? c.rd(in_ + lo) : c.rd(tree_ + inorder_node(lo, hi));
  }

 private:
  Addr in_, tree_;
};

class DownKernel final : public RangeKernel {
 public:
  DownKernel(Addr in, Addr out, Addr tree) : reduce_(in, tree), in_(in), out_(out) {}
  std::uint64_t extra_locals() const override { return 2; }
  void head(Ctx& c, Addr extra, std::uint64_t lo, std::uint64_t mid, std::uint64_t,
            Addr link) override {
    Word off = link == kNoAddr ? 0 : c.rd(link);
    c.wr(extra, off);
    c.wr(extra + 1, off + reduce_.part(c, lo, mid));
  }
  void leaf(Ctx& c, std::uint64_t i, Addr link) override {
    Word off = link == kNoAddr ? 0 : c.rd(link);
    c.wr(out_ + i, off + c.rd(in_ + i));
  }
  Addr child_link(Addr extra, int which) const override { return extra + which; }

 private:
  ReduceKernel reduce_;
  Addr in_, out_;
};

JobPtr naive_mm(Addr a, Addr b, Addr c, std::uint64_t side) {
  return std::make_unique<Leaf0>(3 * side * side, [=](Ctx& x) {
    for (std::uint64_t r = 0; r < side; ++r)
      for (std::uint64_t col = 0; col < side; ++col) {
        Word s = 0;
        for (std::uint64_t k = 0; k < side; ++k)
          s += x.rd(a + bi_index(r, k)) * x.rd(b + bi_index(k, col));
        x.wr(c + bi_index(r, col), s);
      }
  });
}

constexpr std::uint64_t kMmBase = 8;
constexpr std::uint64_t kFftBase = 8;

}  // namespace

JobPtr msum_job(Addr in, std::uint64_t n, Addr out) {
  return compute::build_bp({}, std::make_shared<SumKernel>(in), n, out);
}

JobPtr prefix_sums_job(Addr in, Addr out, std::uint64_t n) {
  return std::make_unique<Staged>(
      2 * n, compute::inorder_cells(n),
      std::vector<Staged::Builder>{
          [=](Addr t) { return compute::build_bp({}, std::make_shared<ReduceKernel>(in, t), n); },
          [=](Addr t) { return compute::build_bp({}, std::make_shared<DownKernel>(in, out, t), n); }});
}

JobPtr matrix_add_job(Addr a, Addr b, Addr c, std::uint64_t side) {
  return map_job(side * side, 3, [=](Ctx& x, std::uint64_t i) { x.wr(c + i, x.rd(a + i) + x.rd(b + i)); });
}

JobPtr strassen_job(Addr a, Addr b, Addr c, std::uint64_t side) {
  if (side <= kMmBase) return naive_mm(a, b, c, side);
  std::uint64_t q = side * side / 4, h = side / 2;
  auto S = [q](Addr s, int k) { return s + (k - 1) * q; };
  auto M = [q](Addr s, int k) { return s + (9 + k) * q; };
  Addr a11 = a, a12 = a + q, a21 = a + 2 * q, a22 = a + 3 * q;
  Addr b11 = b, b12 = b + q, b21 = b + 2 * q, b22 = b + 3 * q;
  return std::make_unique<Staged>(
      3 * side * side, 17 * q,
      std::vector<Staged::Builder>{
          [=](Addr s) {
            return map_job(q, 24, [=](Ctx& x, std::uint64_t i) {
              Word A11 = x.rd(a11 + i), A12 = x.rd(a12 + i), A21 = x.rd(a21 + i), A22 = x.rd(a22 + i);
              Word B11 = x.rd(b11 + i), B12 = x.rd(b12 + i), B21 = x.rd(b21 + i), B22 = x.rd(b22 + i);
              x.wr(S(s, 1) + i, A11 + A22);
              x.wr(S(s, 2) + i, B11 + B22);
              x.wr(S(s, 3) + i, A21 + A22);
              x.wr(S(s, 4) + i, B12 - B22);
              x.wr(S(s, 5) + i, B21 - B11);
              x.wr(S(s, 6) + i, A11 + A12);
              x.wr(S(s, 7) + i, A21 - A11);
              x.wr(S(s, 8) + i, B11 + B12);
              x.wr(S(s, 9) + i, A12 - A22);
              x.wr(S(s, 10) + i, B21 + B22);
            });
          },
          [=](Addr s) {
            return make_fanout(
                [=](std::uint64_t k) {
                  Addr l, r;
                  switch (k) {
                    case 0: l = S(s, 1), r = S(s, 2); break;
                    case 1: l = S(s, 3), r = b11; break;
                    case 2: l = a11, r = S(s, 4); break;
                    case 3: l = a22, r = S(s, 5); break;
                    case 4: l = S(s, 6), r = b22; break;
                    case 5: l = S(s, 7), r = S(s, 8); break;
                    default: l = S(s, 9), r = S(s, 10); break;
                  }
                  return strassen_job(l, r, M(s, static_cast<int>(k) + 1), h);
                },
                7);
          },
          [=](Addr s) {
            return map_job(q, 11, [=](Ctx& x, std::uint64_t i) {
              Word m[8];
              for (int k = 1; k <= 7; ++k) m[k] = x.rd(M(s, k) + i);
              x.wr(c + i, m[1] + m[4] - m[5] + m[7]);
              x.wr(c + q + i, m[3] + m[5]);
              x.wr(c + 2 * q + i, m[2] + m[4]);
              x.wr(c + 3 * q + i, m[1] - m[2] + m[3] + m[6]);
            });
          }});
}

JobPtr depth_n_mm_job(Addr a, Addr b, Addr c, std::uint64_t side) {
  if (side <= kMmBase) return naive_mm(a, b, c, side);
  std::uint64_t q = side * side / 4, h = side / 2;
  auto quarter = [=](int stage, Addr dst) {
    return make_fanout(
        [=](std::uint64_t xy) {
          std::uint64_t x = xy / 2, y = xy % 2;
          Addr l = a + (2 * x + stage) * q, r = b + (2 * stage + y) * q;
          return depth_n_mm_job(l, r, dst + xy * q, h);
        },
        4);
  };
  return std::make_unique<Staged>(
      3 * side * side, 8 * q,
      std::vector<Staged::Builder>{[=](Addr s) { return quarter(0, s); },
                                   [=](Addr s) { return quarter(1, s + 4 * q); },
                                   [=](Addr s) { return matrix_add_job(s, s + 4 * q, c, side); }});
}

std::uint64_t fft_rows(std::uint64_t n) { return std::uint64_t{1} << ((floor_log2(n) + 1) / 2); }

Addr TwiddleTables::at(std::uint64_t m) const {
  auto it = by_size.find(m);
  if (it == by_size.end()) throw Error("missing twiddle table");
  return it->second.base;
}

TwiddleTables make_twiddles(mem::Machine& m, std::uint64_t n) {
  TwiddleTables t;
  std::vector<std::uint64_t> todo{n};
  while (!todo.empty()) {
    std::uint64_t s = todo.back();
    todo.pop_back();
    if (s <= kFftBase || t.by_size.count(s)) continue;
    std::uint64_t R = fft_rows(s);
    AddrRange r = m.alloc(0, 2 * s);
    for (std::uint64_t i = 0; i < s; ++i) {
      cplx w = std::polar(1.0, -2 * std::numbers::pi * static_cast<double>((i / R) * (i % R) % s) /
                                   static_cast<double>(s));
      m.poke(r.base + 2 * i, word_from_double(w.real()));
      m.poke(r.base + 2 * i + 1, word_from_double(w.imag()));
    }
    t.by_size[s] = {r.base, 2 * s};
    todo.push_back(R);
    todo.push_back(s / R);
  }
  return t;
}

JobPtr fft_job(Addr in, Addr out, std::uint64_t n, std::shared_ptr<const TwiddleTables> tw) {
  if (n <= kFftBase) {
    return std::make_unique<Leaf0>(4 * n, [=](Ctx& x) {
      std::vector<cplx> v(n);
      for (std::uint64_t j = 0; j < n; ++j) v[j] = {x.rdf(in + 2 * j), x.rdf(in + 2 * j + 1)};
      for (std::uint64_t k = 0; k < n; ++k) {
        cplx s = 0;
        for (std::uint64_t j = 0; j < n; ++j)
          s += v[j] * std::polar(1.0, -2 * std::numbers::pi * static_cast<double>(j * k % n) /
                                          static_cast<double>(n));
        x.wrf(out + 2 * k, s.real());
        x.wrf(out + 2 * k + 1, s.imag());
      }
    });
  }
  std::uint64_t R = fft_rows(n), C = n / R;
  std::uint64_t w = 2 * n;
  return std::make_unique<Staged>(
      4 * n, 8 * n,
      std::vector<Staged::Builder>{
          [=](Addr s) { return transpose_job(in, s, R, C, 2); },
          [=](Addr s) {
            return make_fanout(
                [=](std::uint64_t j) { return fft_job(s + j * 2 * R, s + w + j * 2 * R, R, tw); }, C);
          },
          [=](Addr s) {
            Addr Y = s + w, t0 = tw->at(n);
            return map_job(n, 6, [=](Ctx& x, std::uint64_t i) {
              cplx v{x.rdf(Y + 2 * i), x.rdf(Y + 2 * i + 1)};
              cplx t{x.rdf(t0 + 2 * i), x.rdf(t0 + 2 * i + 1)};
              v *= t;
              x.wrf(Y + 2 * i, v.real());
              x.wrf(Y + 2 * i + 1, v.imag());
            });
          },
          [=](Addr s) { return transpose_job(s + w, s + 2 * w, C, R, 2); },
          [=](Addr s) {
            return make_fanout(
                [=](std::uint64_t j) {
                  return fft_job(s + 2 * w + j * 2 * C, s + 3 * w + j * 2 * C, C, tw);
                },
                R);
          },
          [=](Addr s) { return transpose_job(s + 3 * w, out, R, C, 2); }});
}

}  // namespace pwssim::algos
