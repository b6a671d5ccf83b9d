/* SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#ifndef PWSSIM_PWSSIM_H
#define PWSSIM_PWSSIM_H

/*
 * C interface of the simulator. All objects are opaque handles. Functions
 * return a status code; on failure pwssim_last_error() describes the error
 * for the calling thread until the next call on that thread.
 */

#include <stddef.h>

#if defined(PWSSIM_BUILDING)
#define PWSSIM_API __attribute__((visibility("default")))
#else
#define PWSSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pwssim_status {
  PWSSIM_OK = 0,
  PWSSIM_E_INVALID_ARG = 1, /* null handle or pointer */
  PWSSIM_E_CONFIG = 2,      /* bad option, size or combination */
  PWSSIM_E_INVARIANT = 3,   /* scheduler or memory invariant broken */
  PWSSIM_E_IO = 4,          /* file could not be read or written */
  PWSSIM_E_INTERNAL = 5
} pwssim_status;

typedef struct pwssim_config pwssim_config;
typedef struct pwssim_run pwssim_run;
typedef struct pwssim_sweep pwssim_sweep;

PWSSIM_API const char* pwssim_version(void);
PWSSIM_API const char* pwssim_last_error(void);

PWSSIM_API pwssim_status pwssim_config_create(pwssim_config** out);
PWSSIM_API void pwssim_config_destroy(pwssim_config* cfg);
/* key is a flag name without dashes: "alg", "n", "p", "miss-cost", "sweep", ... */
PWSSIM_API pwssim_status pwssim_config_set(pwssim_config* cfg, const char* key, const char* value);
PWSSIM_API pwssim_status pwssim_config_load_file(pwssim_config* cfg, const char* path);
/* Nonzero when at least one sweep axis is set. */
PWSSIM_API int pwssim_config_has_sweep(const pwssim_config* cfg);

/* Runs one configuration and its sequential baseline. */
PWSSIM_API pwssim_status pwssim_run_create(const pwssim_config* cfg, pwssim_run** out);
PWSSIM_API void pwssim_run_destroy(pwssim_run* run);
PWSSIM_API int pwssim_run_invariants_ok(const pwssim_run* run);
/* JSON report; the string lives as long as the run. */
PWSSIM_API const char* pwssim_run_report_json(const pwssim_run* run);
PWSSIM_API pwssim_status pwssim_run_write_outputs(const pwssim_run* run, const char* dir);

PWSSIM_API pwssim_status pwssim_sweep_create(const pwssim_config* cfg, pwssim_sweep** out);
PWSSIM_API void pwssim_sweep_destroy(pwssim_sweep* sweep);
PWSSIM_API size_t pwssim_sweep_size(const pwssim_sweep* sweep);
PWSSIM_API int pwssim_sweep_invariants_ok(const pwssim_sweep* sweep);
PWSSIM_API size_t pwssim_sweep_warning_count(const pwssim_sweep* sweep);
/* Soft-check message i; the string lives as long as the sweep. */
PWSSIM_API const char* pwssim_sweep_warning(const pwssim_sweep* sweep, size_t i);
PWSSIM_API pwssim_status pwssim_sweep_write_outputs(const pwssim_sweep* sweep, const char* dir);

#ifdef __cplusplus
}
#endif

#endif
