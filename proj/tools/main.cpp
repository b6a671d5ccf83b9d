// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

// pwssim command line: `pwssim run ...` and `pwssim sweep ...`.
// Exit codes: 0 success, 1 I/O or internal error, 2 usage error,
// 3 invariant failure.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pwssim/pwssim.h"

namespace {

constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

struct OptionDoc {
  const char* name;
  const char* help;
};

const OptionDoc kValueOptions[] = {
    {"alg", "algorithm name"},
    {"sched", "pws, rws or seq"},
    {"n", "input size (matrix side for matrix algorithms)"},
    {"p", "number of cores"},
    {"M", "cache size in words"},
    {"B", "block size in words"},
    {"hit-cost", "ticks per cache hit"},
    {"miss-cost", "ticks per block transfer"},
    {"steal-cost", "ticks per successful steal"},
    {"sched-interval", "ticks per scheduler step"},
    {"seed", "RNG seed (required)"},
    {"out-dir", "directory for report and CSV/SVG outputs"},
    {"sweep-cap", "maximum number of sweep points"},
};
const OptionDoc kFlagOptions[] = {
    {"padded", "pad execution-stack frames"},
    {"gapped", "use the gapped BI to RM layout"},
    {"stress", "jitter core clocks to provoke pseudo-steals"},
    {"trace", "record events, steals, tasks and transfers"},
};

struct Options {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::vector<std::string> sweeps;
};

void add_options(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_file, "flat key = value file mirroring the flags");
  for (const auto& d : kValueOptions) app->add_option(std::string("--") + d.name, o.values[d.name], d.help);
  for (const auto& d : kFlagOptions) app->add_flag(std::string("--") + d.name, o.flags[d.name], d.help);
  app->add_option("--sweep", o.sweeps, "axis=v1,v2,...")->take_all();
}

int code_of(pwssim_status s) {
  switch (s) {
    case PWSSIM_OK: return 0;
    case PWSSIM_E_CONFIG:
    case PWSSIM_E_INVALID_ARG: return kExitUsage;
    case PWSSIM_E_INVARIANT: return kExitInvariant;
    default: return kExitOther;
  }
}

int report(pwssim_status s) {
  std::fprintf(stderr, "pwssim: %s\n", pwssim_last_error());
  return code_of(s);
}

int execute(const CLI::App* app, const Options& o, bool sweep_mode) {
  pwssim_config* cfg = nullptr;
  if (auto s = pwssim_config_create(&cfg)) return report(s);
  auto done = [&](int code) {
    pwssim_config_destroy(cfg);
    return code;
  };
  if (!o.config_file.empty())
    if (auto s = pwssim_config_load_file(cfg, o.config_file.c_str())) return done(report(s));
  for (const auto& [k, help] : kValueOptions)
    if (app->count(std::string("--") + k))
      if (auto s = pwssim_config_set(cfg, k, o.values.at(k).c_str())) return done(report(s));
  for (const auto& [k, help] : kFlagOptions)
    if (app->count(std::string("--") + k))
      if (auto s = pwssim_config_set(cfg, k, o.flags.at(k) ? "1" : "0")) return done(report(s));
  for (const auto& sw : o.sweeps)
    if (auto s = pwssim_config_set(cfg, "sweep", sw.c_str())) return done(report(s));
  std::string dir = app->count("--out-dir") ? o.values.at("out-dir") : ".";

  if (sweep_mode || pwssim_config_has_sweep(cfg)) {
    if (!pwssim_config_has_sweep(cfg)) {
      std::fprintf(stderr, "pwssim: sweep needs at least one --sweep axis\n");
      return done(kExitUsage);
    }
    pwssim_sweep* sw = nullptr;
    if (auto s = pwssim_sweep_create(cfg, &sw)) return done(report(s));
    auto s = pwssim_sweep_write_outputs(sw, dir.c_str());
    int ok = pwssim_sweep_invariants_ok(sw);
    for (size_t i = 0; i < pwssim_sweep_warning_count(sw); ++i)
      std::fprintf(stderr, "pwssim: warning: %s\n", pwssim_sweep_warning(sw, i));
    std::printf("%zu runs, invariants %s\n", pwssim_sweep_size(sw), ok ? "ok" : "FAILED");
    pwssim_sweep_destroy(sw);
    if (s) return done(report(s));
    return done(ok ? 0 : kExitInvariant);
  }
  pwssim_run* run = nullptr;
  if (auto s = pwssim_run_create(cfg, &run)) return done(report(s));
  auto s = pwssim_run_write_outputs(run, dir.c_str());
  int ok = pwssim_run_invariants_ok(run);
  std::printf("%s\n", pwssim_run_report_json(run));
  pwssim_run_destroy(run);
  if (s) return done(report(s));
  if (!ok) std::fprintf(stderr, "pwssim: invariant check failed, see report.json\n");
  return done(ok ? 0 : kExitInvariant);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic multicore cache and work-stealing simulator"};
  app.set_version_flag("--version", pwssim_version());
  app.require_subcommand(1);
  Options run_opts, sweep_opts;
  auto* run = app.add_subcommand("run", "simulate one configuration");
  auto* sweep = app.add_subcommand("sweep", "simulate the Cartesian product of --sweep axes");
  add_options(run, run_opts);
  add_options(sweep, sweep_opts);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  if (run->parsed()) return execute(run, run_opts, false);
  return execute(sweep, sweep_opts, true);
}
