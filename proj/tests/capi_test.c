/* SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

/* Exercises the C interface from C. */

#include <stdio.h>
#include <string.h>

#include "pwssim/pwssim.h"

static int failures = 0;

#define EXPECT(cond)                                          \
  do {                                                        \
    if (!(cond)) {                                            \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                             \
    }                                                         \
  } while (0)

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : "capi_out";
  pwssim_config* cfg = NULL;
  pwssim_run* run = NULL;
  pwssim_sweep* sweep = NULL;

  EXPECT(strlen(pwssim_version()) > 0);
  EXPECT(pwssim_config_create(NULL) == PWSSIM_E_INVALID_ARG);
  EXPECT(strlen(pwssim_last_error()) > 0);
  EXPECT(pwssim_config_create(&cfg) == PWSSIM_OK);

  EXPECT(pwssim_config_set(cfg, "p", "0") == PWSSIM_E_CONFIG);
  EXPECT(strstr(pwssim_last_error(), "p") != NULL);
  EXPECT(pwssim_config_set(cfg, NULL, "1") == PWSSIM_E_INVALID_ARG);
  EXPECT(pwssim_config_load_file(cfg, "/nonexistent/file.cfg") == PWSSIM_E_IO);

  /* seed missing */
  EXPECT(pwssim_config_set(cfg, "alg", "prefix_sums") == PWSSIM_OK);
  EXPECT(pwssim_config_set(cfg, "n", "4096") == PWSSIM_OK);
  EXPECT(pwssim_run_create(cfg, &run) == PWSSIM_E_CONFIG);
  EXPECT(run == NULL);

  EXPECT(pwssim_config_set(cfg, "seed", "5") == PWSSIM_OK);
  EXPECT(pwssim_config_set(cfg, "p", "4") == PWSSIM_OK);
  EXPECT(pwssim_config_set(cfg, "M", "4096") == PWSSIM_OK);
  EXPECT(pwssim_config_set(cfg, "B", "32") == PWSSIM_OK);
  EXPECT(pwssim_run_create(cfg, &run) == PWSSIM_OK);
  EXPECT(pwssim_run_invariants_ok(run) == 1);
  EXPECT(strstr(pwssim_run_report_json(run), "\"invariants_ok\": true") != NULL);
  EXPECT(pwssim_run_write_outputs(run, dir) == PWSSIM_OK);
  EXPECT(pwssim_run_write_outputs(run, "/proc/forbidden") == PWSSIM_E_IO);
  pwssim_run_destroy(run);

  EXPECT(pwssim_config_has_sweep(cfg) == 0);
  EXPECT(pwssim_sweep_create(cfg, &sweep) == PWSSIM_E_CONFIG);
  EXPECT(pwssim_config_set(cfg, "sweep", "p=1,2") == PWSSIM_OK);
  EXPECT(pwssim_config_has_sweep(cfg) == 1);
  EXPECT(pwssim_sweep_create(cfg, &sweep) == PWSSIM_OK);
  EXPECT(pwssim_sweep_size(sweep) == 2);
  EXPECT(pwssim_sweep_invariants_ok(sweep) == 1);
  EXPECT(pwssim_sweep_warning_count(sweep) == 0 || strlen(pwssim_sweep_warning(sweep, 0)) > 0);
  EXPECT(strcmp(pwssim_sweep_warning(sweep, 99), "") == 0);
  pwssim_sweep_destroy(sweep);

  pwssim_config_destroy(cfg);
  pwssim_config_destroy(NULL);
  pwssim_run_destroy(NULL);
  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("capi ok\n");
  return failures ? 1 : 0;
}
