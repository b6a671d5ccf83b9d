// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pwssim/cli/experiment.hpp"

using namespace pwssim;
namespace fs = std::filesystem;

namespace {

cli::ExperimentConfig base() {
  cli::ExperimentConfig c;
  for (auto [k, v] : {std::pair<const char*, const char*>{"alg", "msum"}, {"n", "4096"}, {"p", "4"},
                      {"M", "4096"}, {"B", "32"}, {"seed", "7"}})
    cli::set_option(c, k, v);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmpdir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("pwssim_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("option parsing") {
  cli::ExperimentConfig c;
  CHECK_THROWS_AS(cli::set_option(c, "p", "0"), ConfigError);
  CHECK_THROWS_AS(cli::set_option(c, "p", "65"), ConfigError);
  CHECK_THROWS_AS(cli::set_option(c, "n", "-3"), ConfigError);
  CHECK_THROWS_AS(cli::set_option(c, "n", "12x"), ConfigError);
  CHECK_THROWS_AS(cli::set_option(c, "colour", "red"), ConfigError);
  CHECK_THROWS_AS(cli::set_option(c, "padded", "maybe"), ConfigError);
  CHECK_THROWS_AS(cli::set_option(c, "sched", "fifo"), ConfigError);
  cli::set_option(c, "miss_cost", "25");
  CHECK(c.run.cost.miss_cost == 25);
  cli::set_option(c, "--padded", "yes");
  CHECK(c.run.padded);
}

TEST_CASE("validation") {
  auto c = base();
  CHECK_NOTHROW(cli::validate(c));
  cli::ExperimentConfig no_seed;
  cli::set_option(no_seed, "alg", "msum");
  cli::set_option(no_seed, "n", "64");
  CHECK_THROWS_AS(cli::validate(no_seed), ConfigError);
  auto bad_n = base();
  cli::set_option(bad_n, "n", "1000");
  CHECK_THROWS_AS(cli::validate(bad_n), ConfigError);
  auto bad_b = base();
  cli::set_option(bad_b, "B", "48");
  CHECK_THROWS_AS(cli::validate(bad_b), ConfigError);
  auto big_b = base();
  cli::set_option(big_b, "B", "8192");
  CHECK_THROWS_AS(cli::validate(big_b), ConfigError);
  auto gap = base();
  cli::set_option(gap, "gapped", "1");
  CHECK_THROWS_AS(cli::validate(gap), ConfigError);
  auto seq = base();
  cli::set_option(seq, "sched", "seq");
  CHECK_THROWS_AS(cli::validate(seq), ConfigError);
  auto unknown = base();
  cli::set_option(unknown, "alg", "quicksort");
  CHECK_THROWS_AS(cli::validate(unknown), ConfigError);
}

TEST_CASE("config file mirrors the flags") {
  auto d = tmpdir("cfg");
  fs::create_directories(d);
  {
    std::ofstream f(d / "run.cfg");
    f << "# scan\nalg = msum\nn = 1024  # words\np=2\nseed = 3\nsweep = B=16,32\n";
  }
  cli::ExperimentConfig c;
  cli::load_config_file(c, (d / "run.cfg").string());
  CHECK(c.run.alg == "msum");
  CHECK(c.run.n == 1024);
  CHECK(c.run.p == 2);
  CHECK(c.seed_set);
  REQUIRE(c.sweep.size() == 1);
  CHECK(c.sweep[0].second == std::vector<std::string>{"16", "32"});
  {
    std::ofstream f(d / "bad.cfg");
    f << "alg msum\n";
  }
  CHECK_THROWS_AS(cli::load_config_file(c, (d / "bad.cfg").string()), ConfigError);
  CHECK_THROWS_AS(cli::load_config_file(c, (d / "missing.cfg").string()), IoError);
}

TEST_CASE("run outputs are byte-identical across repeats") {
  auto a = tmpdir("det_a"), b = tmpdir("det_b");
  cli::write_outputs(cli::run_experiment(base()), a.string());
  cli::write_outputs(cli::run_experiment(base()), b.string());
  for (const char* f : {"report.json", "counters.csv", "plot_misses.svg"}) {
    CAPTURE(f);
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("CSV schema: fixed columns, one value per column") {
  auto r = cli::run_experiment(base());
  auto cols = cli::csv_columns();
  CHECK(cols.size() == cli::csv_row(r).size());
  for (const char* must : {"alg", "p", "cold", "capacity", "invalidation", "upgrade", "coherence",
                           "stack_invalidation", "queue_ticks", "invalidation_ticks", "cache_excess",
                           "block_wait_total", "ratio_steals_per_priority", "ratio_steal_attempts"})
    CHECK(std::find(cols.begin(), cols.end(), must) != cols.end());
}

TEST_CASE("report lists bounds with formula, measured value, ratio and verdict") {
  auto r = cli::run_experiment(base());
  auto j = cli::report_json(r);
  REQUIRE(j["bounds"].is_array());
  CHECK(j["bounds"].size() >= 3);
  for (const auto& b : j["bounds"])
    for (const char* k : {"name", "formula", "measured", "ratio", "pass"}) CHECK(b.contains(k));
  CHECK(j["invariants_ok"].get<bool>());
  CHECK(j["config"]["alg"] == "msum");
}

TEST_CASE("trace outputs") {
  auto c = base();
  c.trace = true;
  auto d = tmpdir("trace");
  cli::write_outputs(cli::run_experiment(c), d.string());
  for (const char* f : {"events.csv", "steals.csv", "tasks.csv"}) CHECK(fs::exists(d / f));
  CHECK(slurp(d / "steals.csv").rfind("round,priority,thief,victim,task,kind", 0) == 0);
  CHECK(slurp(d / "events.csv").rfind("tick,core,task,event", 0) == 0);
}

TEST_CASE("sweep: one row per point, sorted, capped") {
  auto c = base();
  cli::add_sweep_axis(c, "p=8,1,4,2");
  auto s = cli::run_sweep(c);
  REQUIRE(s.runs.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(s.runs[i].summary.params.p == (1 << i));
  auto d = tmpdir("sweep");
  cli::write_sweep_outputs(s, d.string());
  std::ifstream f(d / "counters.csv");
  int lines = 0;
  for (std::string l; std::getline(f, l);) ++lines;
  CHECK(lines == 5);
  CHECK(fs::exists(d / "plot_cache_excess.svg"));

  auto none = base();
  CHECK_THROWS_AS(cli::run_sweep(none), ConfigError);
  auto big = base();
  big.sweep_cap = 4;
  cli::add_sweep_axis(big, "p=1,2,4");
  cli::add_sweep_axis(big, "seed=1,2");
  CHECK_THROWS_AS(cli::run_sweep(big), ConfigError);
  CHECK_THROWS_AS(cli::add_sweep_axis(big, "p=1"), ConfigError);
  CHECK_THROWS_AS(cli::add_sweep_axis(big, "trace=1,0"), ConfigError);
  CHECK_THROWS_AS(cli::add_sweep_axis(big, "n="), ConfigError);
}

TEST_CASE("svg plot is a standalone document") {
  auto svg = cli::svg_line_plot("t <1>", "x", "y", {{"a", {{0, 1}, {1, 3}}}, {"b", {{0, 2}}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("t &lt;1&gt;") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}
