/* SPDX-FileCopyrightText: 2026 The kgmg authors */
/* SPDX-License-Identifier: Apache-2.0 */

/* C interface to the kernel Galerkin multigrid library. Every function
 * returns a kgmg_status; on failure kgmg_last_error() holds the message for
 * the calling thread until its next call into the library. Strings handed
 * out by the library are released with kgmg_string_free. */

#ifndef KGMG_KGMG_H
#define KGMG_KGMG_H

#include <stddef.h>
#include <stdint.h>

#if defined(KGMG_BUILDING_LIBRARY)
#define KGMG_API __attribute__((visibility("default")))
#else
#define KGMG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kgmg_status {
  KGMG_OK = 0,
  KGMG_ERR_INVALID_ARGUMENT = 1,
  KGMG_ERR_PARSE = 2,
  KGMG_ERR_DOMAIN = 3,
  KGMG_ERR_CONDITIONING = 4,
  KGMG_ERR_CAPACITY = 5,
  KGMG_ERR_UNSUPPORTED = 6,
  KGMG_ERR_INSUFFICIENT_DATA = 7,
  KGMG_ERR_IO = 8,
  KGMG_ERR_SIZE_GUARD = 9,
  KGMG_ERR_INTERNAL = 10
} kgmg_status;

typedef struct kgmg_config kgmg_config;   /* parsed study/problem configuration */
typedef struct kgmg_problem kgmg_problem; /* hierarchy, bases, level systems */
typedef struct kgmg_report kgmg_report;   /* result of a study */

KGMG_API const char* kgmg_version(void);
KGMG_API const char* kgmg_status_name(kgmg_status status);
KGMG_API const char* kgmg_last_error(void);
KGMG_API void kgmg_string_free(char* s);

/* Configuration. */
KGMG_API kgmg_status kgmg_config_default(kgmg_config** out);
KGMG_API kgmg_status kgmg_config_load(const char* path, kgmg_config** out);
KGMG_API kgmg_status kgmg_config_parse(const char* text, const char* source, kgmg_config** out);
KGMG_API void kgmg_config_free(kgmg_config* cfg);
KGMG_API kgmg_status kgmg_config_set_seed(kgmg_config* cfg, uint64_t seed);
KGMG_API kgmg_status kgmg_config_set_output_dir(kgmg_config* cfg, const char* dir);
KGMG_API kgmg_status kgmg_config_set_study(kgmg_config* cfg, const char* kind);
KGMG_API kgmg_status kgmg_config_set_basis_cache(kgmg_config* cfg, const char* dir);
KGMG_API kgmg_status kgmg_config_set_levels(kgmg_config* cfg, int levels);
/* Effective configuration as JSON. */
KGMG_API kgmg_status kgmg_config_json(const kgmg_config* cfg, char** out);

/* Point hierarchy only, written as JSON. */
KGMG_API kgmg_status kgmg_hierarchy_write(const kgmg_config* cfg, const char* path);

/* Discretization: hierarchy, Lagrange bases, stiffness matrices, transfers. */
KGMG_API kgmg_status kgmg_problem_create(const kgmg_config* cfg, kgmg_problem** out);
KGMG_API void kgmg_problem_free(kgmg_problem* problem);
KGMG_API kgmg_status kgmg_problem_level_count(const kgmg_problem* problem, int* count);
KGMG_API kgmg_status kgmg_problem_size(const kgmg_problem* problem, int level, size_t* n);
/* Copies the level's stiffness matrix row-major into a buffer of n*n doubles. */
KGMG_API kgmg_status kgmg_problem_stiffness(const kgmg_problem* problem, int level, double* out, size_t capacity);
/* Writes A_<l>.mtx and P_<l>.mtx (Matrix Market) for every level, truncated
 * when the configuration sets mg.truncation, plus assemble.json. */
KGMG_API kgmg_status kgmg_problem_export(const kgmg_problem* problem, const kgmg_config* cfg, const char* dir);

/* One multigrid solve on the finest level. b may be NULL, in which case the
 * configured right-hand side is assembled. u receives n values when not
 * NULL. report_json, when not NULL, receives the solve report. */
KGMG_API kgmg_status kgmg_solve(const kgmg_problem* problem, const kgmg_config* cfg, const double* b, size_t n,
                                double* u, char** report_json);

/* Studies. problem may be NULL; it must match cfg otherwise. */
KGMG_API kgmg_status kgmg_study_run(const kgmg_config* cfg, const kgmg_problem* problem, kgmg_report** out);
KGMG_API void kgmg_report_free(kgmg_report* report);
KGMG_API int kgmg_report_pass(const kgmg_report* report);
KGMG_API kgmg_status kgmg_report_csv(const kgmg_report* report, char** out);
KGMG_API kgmg_status kgmg_report_json(const kgmg_report* report, const kgmg_config* cfg, char** out);
/* One line per check: PASS/FAIL, name, value, relation, threshold. */
KGMG_API kgmg_status kgmg_report_summary(const kgmg_report* report, char** out);
/* Writes <kind>.csv and <kind>.json into the configured output directory. */
KGMG_API kgmg_status kgmg_report_write(const kgmg_report* report, const kgmg_config* cfg);

#ifdef __cplusplus
}
#endif

#endif
