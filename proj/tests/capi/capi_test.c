// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

// Exercises the C interface from plain C.

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "kgmg/kgmg.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  EXPECT(strlen(kgmg_version()) > 0);
  EXPECT(strcmp(kgmg_status_name(KGMG_ERR_PARSE), "parse") == 0);

  kgmg_config* cfg = NULL;
  EXPECT(kgmg_config_default(NULL) == KGMG_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(kgmg_last_error()) > 0);
  EXPECT(kgmg_config_parse("{\"bogus\": 1}", "inline", &cfg) == KGMG_ERR_PARSE);
  EXPECT(cfg == NULL);
  EXPECT(strstr(kgmg_last_error(), "inline:1") != NULL);
  EXPECT(kgmg_config_load("/nonexistent/kgmg.json", &cfg) == KGMG_ERR_IO);

  EXPECT(kgmg_config_parse("{\"hierarchy\": {\"levels\": 1}, \"rhs\": \"zero\"}", "inline", &cfg) == KGMG_OK);
  EXPECT(kgmg_config_set_study(cfg, "nonsense") == KGMG_ERR_INVALID_ARGUMENT);
  EXPECT(kgmg_config_set_levels(cfg, -1) == KGMG_ERR_INVALID_ARGUMENT);
  EXPECT(kgmg_config_set_seed(cfg, 7) == KGMG_OK);
  EXPECT(strlen(kgmg_last_error()) == 0);

  kgmg_problem* problem = NULL;
  EXPECT(kgmg_problem_create(cfg, &problem) == KGMG_OK);
  int levels = 0;
  EXPECT(kgmg_problem_level_count(problem, &levels) == KGMG_OK);
  EXPECT(levels == 2);
  size_t n = 0;
  EXPECT(kgmg_problem_size(problem, 1, &n) == KGMG_OK);
  EXPECT(n == 64);
  EXPECT(kgmg_problem_size(problem, 5, &n) == KGMG_ERR_INVALID_ARGUMENT);

  double* A = malloc(64 * 64 * sizeof(double));
  EXPECT(kgmg_problem_stiffness(problem, 1, A, 10) == KGMG_ERR_CAPACITY);
  EXPECT(kgmg_problem_stiffness(problem, 1, A, 64 * 64) == KGMG_OK);
  EXPECT(A[0] > 0.0);
  EXPECT(A[1] == A[64]);

  double u[64];
  char* json = NULL;
  EXPECT(kgmg_solve(problem, cfg, NULL, 64, u, &json) == KGMG_OK);
  EXPECT(json != NULL && strstr(json, "\"iterations\": 0") != NULL);
  kgmg_string_free(json);

  double b[64];
  for (int i = 0; i < 64; ++i) b[i] = (i % 5) - 2.0;
  EXPECT(kgmg_solve(problem, cfg, b, 63, u, NULL) == KGMG_ERR_INVALID_ARGUMENT);
  EXPECT(kgmg_solve(problem, cfg, b, 64, u, NULL) == KGMG_OK);
  double r = 0.0, bn = 0.0;
  for (int i = 0; i < 64; ++i) {
    double s = b[i];
    for (int j = 0; j < 64; ++j) s -= A[i * 64 + j] * u[j];
    r += s * s;
    bn += b[i] * b[i];
  }
  EXPECT(r <= 1e-14 * bn);
  free(A);

  kgmg_report* rep = NULL;
  EXPECT(kgmg_study_run(cfg, problem, &rep) == KGMG_OK);
  char* csv = NULL;
  EXPECT(kgmg_report_csv(rep, &csv) == KGMG_OK);
  EXPECT(csv != NULL && strncmp(csv, "level,N,", 8) == 0);
  kgmg_string_free(csv);
  char* summary = NULL;
  EXPECT(kgmg_report_summary(rep, &summary) == KGMG_OK);
  EXPECT(summary != NULL && (strstr(summary, "PASS") != NULL || strstr(summary, "FAIL") != NULL));
  kgmg_string_free(summary);
  EXPECT(kgmg_report_pass(rep) == 1);
  EXPECT(kgmg_report_pass(NULL) == 0);

  kgmg_report_free(rep);
  kgmg_problem_free(problem);
  kgmg_config_free(cfg);
  kgmg_report_free(NULL);
  kgmg_problem_free(NULL);
  kgmg_config_free(NULL);

  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
