// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pwssim/pwssim.h"

#include <new>
#include <string>

#include "pwssim/cli/experiment.hpp"

struct pwssim_config {
  pwssim::cli::ExperimentConfig cfg;
};

struct pwssim_run {
  pwssim::cli::RunOutput out;
  std::string report;
};

struct pwssim_sweep {
  pwssim::cli::SweepOutput out;
};

namespace {

thread_local std::string g_last_error;

pwssim_status fail(pwssim_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
pwssim_status guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return PWSSIM_OK;
  } catch (const pwssim::ConfigError& e) {
    return fail(PWSSIM_E_CONFIG, e.what());
  } catch (const pwssim::InvariantError& e) {
    return fail(PWSSIM_E_INVARIANT, e.what());
  } catch (const pwssim::IoError& e) {
    return fail(PWSSIM_E_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PWSSIM_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PWSSIM_E_INTERNAL, e.what());
  } catch (...) {
    return fail(PWSSIM_E_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* pwssim_version(void) { return "0.1.0"; }

const char* pwssim_last_error(void) { return g_last_error.c_str(); }

pwssim_status pwssim_config_create(pwssim_config** out) {
  if (!out) return fail(PWSSIM_E_INVALID_ARG, "null output pointer");
  return guard([&] { *out = new pwssim_config(); });
}

void pwssim_config_destroy(pwssim_config* cfg) { delete cfg; }

pwssim_status pwssim_config_set(pwssim_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(PWSSIM_E_INVALID_ARG, "null argument");
  return guard([&] { pwssim::cli::set_option(cfg->cfg, key, value); });
}

pwssim_status pwssim_config_load_file(pwssim_config* cfg, const char* path) {
  if (!cfg || !path) return fail(PWSSIM_E_INVALID_ARG, "null argument");
  return guard([&] { pwssim::cli::load_config_file(cfg->cfg, path); });
}

int pwssim_config_has_sweep(const pwssim_config* cfg) { return cfg && !cfg->cfg.sweep.empty(); }

pwssim_status pwssim_run_create(const pwssim_config* cfg, pwssim_run** out) {
  if (!cfg || !out) return fail(PWSSIM_E_INVALID_ARG, "null argument");
  *out = nullptr;
  return guard([&] {
    auto* r = new pwssim_run();
    try {
      r->out = pwssim::cli::run_experiment(cfg->cfg);
      r->report = pwssim::cli::report_json(r->out).dump(2);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

void pwssim_run_destroy(pwssim_run* run) { delete run; }

int pwssim_run_invariants_ok(const pwssim_run* run) { return run && run->out.invariants_ok; }

const char* pwssim_run_report_json(const pwssim_run* run) { return run ? run->report.c_str() : ""; }

pwssim_status pwssim_run_write_outputs(const pwssim_run* run, const char* dir) {
  if (!run || !dir) return fail(PWSSIM_E_INVALID_ARG, "null argument");
  return guard([&] { pwssim::cli::write_outputs(run->out, dir); });
}

pwssim_status pwssim_sweep_create(const pwssim_config* cfg, pwssim_sweep** out) {
  if (!cfg || !out) return fail(PWSSIM_E_INVALID_ARG, "null argument");
  *out = nullptr;
  return guard([&] {
    auto* s = new pwssim_sweep();
    try {
      s->out = pwssim::cli::run_sweep(cfg->cfg);
    } catch (...) {
      delete s;
      throw;
    }
    *out = s;
  });
}

void pwssim_sweep_destroy(pwssim_sweep* sweep) { delete sweep; }

size_t pwssim_sweep_size(const pwssim_sweep* sweep) { return sweep ? sweep->out.runs.size() : 0; }

int pwssim_sweep_invariants_ok(const pwssim_sweep* sweep) { return sweep && sweep->out.invariants_ok; }

size_t pwssim_sweep_warning_count(const pwssim_sweep* sweep) { return sweep ? sweep->out.warnings.size() : 0; }

const char* pwssim_sweep_warning(const pwssim_sweep* sweep, size_t i) {
  if (!sweep || i >= sweep->out.warnings.size()) return "";
  return sweep->out.warnings[i].c_str();
}

pwssim_status pwssim_sweep_write_outputs(const pwssim_sweep* sweep, const char* dir) {
  if (!sweep || !dir) return fail(PWSSIM_E_INVALID_ARG, "null argument");
  return guard([&] { pwssim::cli::write_sweep_outputs(sweep->out, dir); });
}

}  // extern "C"
