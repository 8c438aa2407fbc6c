/* oralab C API: opaque handles and status codes over the C++ core. */
#ifndef ORALAB_ORALAB_H
#define ORALAB_ORALAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ORALAB_BUILDING_LIBRARY)
#    define ORALAB_API __declspec(dllexport)
#  else
#    define ORALAB_API __declspec(dllimport)
#  endif
#else
#  define ORALAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oralab_status {
  ORALAB_OK = 0,
  ORALAB_E_INVALID_ARGUMENT = 1,
  ORALAB_E_GRID_MISMATCH = 2,
  ORALAB_E_INSUFFICIENT_MASS = 3,
  ORALAB_E_INFEASIBLE_CUT = 4,
  ORALAB_E_DELTA_TOO_LARGE = 5,
  ORALAB_E_SANDWICH_VIOLATION = 6,
  ORALAB_E_VALIDITY_WINDOW_EXCEEDED = 7,
  ORALAB_E_POPULATION_UNDERFLOW = 8,
  ORALAB_E_COUPLING_PRECONDITION = 9,
  ORALAB_E_NO_SNAPSHOT_AT_TIME = 10,
  ORALAB_E_SUPPORT_ESCAPES_GRID = 11,
  ORALAB_E_EMPTY_WINDOW = 12,
  ORALAB_E_INVALID_CONFIG = 13,
  ORALAB_E_INVARIANT_VIOLATION = 14,
  ORALAB_E_IO = 15,
  ORALAB_E_INTERNAL = 99
} oralab_status;

typedef enum oralab_task {
  ORALAB_TASK_SOLVE = 0,
  ORALAB_TASK_SIMULATE = 1,
  ORALAB_TASK_CHECK_ORA = 2,
  ORALAB_TASK_COMPARE = 3,
  ORALAB_TASK_SWEEP = 4
} oralab_task;

typedef enum oralab_model { ORALAB_MODEL_RAB = 0, ORALAB_MODEL_RAQ = 1 } oralab_model;

typedef enum oralab_branch { ORALAB_LOWER = 0, ORALAB_UPPER = 1, ORALAB_MID = 2 } oralab_branch;

typedef struct oralab_scenario oralab_scenario;
typedef struct oralab_barrier oralab_barrier;
typedef struct oralab_preset_result oralab_preset_result;

typedef struct oralab_run_options {
  const char* out_dir; /* NULL: "run" */
  unsigned threads;    /* 0 is treated as 1 */
  int has_seed;        /* nonzero: seed overrides the config */
  uint64_t seed;
  int strict;          /* nonzero: warnings become errors */
} oralab_run_options;

ORALAB_API const char* oralab_version(void);
ORALAB_API const char* oralab_status_name(oralab_status status);
/* Message of the last failing call on this thread ("" if none). */
ORALAB_API const char* oralab_last_error(void);
/* Strings returned through char** are owned by the caller. */
ORALAB_API void oralab_string_free(char* s);

/* scenarios */
ORALAB_API oralab_status oralab_scenario_load(const char* path, oralab_scenario** out);
ORALAB_API oralab_status oralab_scenario_parse(const char* json, oralab_scenario** out);
/* "rab-preset" or "raq-preset" */
ORALAB_API oralab_status oralab_scenario_preset(const char* name, oralab_scenario** out);
ORALAB_API oralab_status oralab_scenario_to_json(const oralab_scenario* s, char** out);
ORALAB_API oralab_status oralab_scenario_model(const oralab_scenario* s, oralab_model* out);
ORALAB_API void oralab_scenario_free(oralab_scenario* s);

/* harness */
ORALAB_API void oralab_run_options_init(oralab_run_options* o);
/* Writes the task's tables into o->out_dir; *out_dir (optional) receives it. */
ORALAB_API oralab_status oralab_run(const oralab_scenario* s, oralab_task task,
                                    const oralab_run_options* o, char** out_dir);
ORALAB_API oralab_status oralab_emit_plots(const char* run_dir);

/* single barrier solve of the scenario's model */
ORALAB_API oralab_status oralab_barrier_solve(const oralab_scenario* s, double Delta,
                                              double delta, oralab_barrier** out);
ORALAB_API size_t oralab_barrier_steps(const oralab_barrier* b);
/* step n in [0, steps] */
ORALAB_API oralab_status oralab_barrier_gap(const oralab_barrier* b, size_t n, double* bound,
                                            double* measured);
ORALAB_API oralab_status oralab_barrier_mass(const oralab_barrier* b, size_t n, double* lower,
                                             double* upper);
/* Right-tail mass on [r, inf) of a stored snapshot at time t. */
ORALAB_API oralab_status oralab_barrier_tail(const oralab_barrier* b, double t,
                                             oralab_branch branch, double r, double* out);
ORALAB_API void oralab_barrier_free(oralab_barrier* b);

/* named acceptance presets */
ORALAB_API size_t oralab_preset_count(void);
ORALAB_API oralab_status oralab_preset_info(size_t index, int* id, const char** name,
                                            const char** summary);
/* seed 0 keeps the preset default; name may also be the numeric id */
ORALAB_API oralab_status oralab_preset_run(const char* name, unsigned threads, uint64_t seed,
                                           oralab_preset_result** out);
ORALAB_API int oralab_preset_result_passed(const oralab_preset_result* r);
ORALAB_API int oralab_preset_result_id(const oralab_preset_result* r);
ORALAB_API const char* oralab_preset_result_name(const oralab_preset_result* r);
ORALAB_API double oralab_preset_result_seconds(const oralab_preset_result* r);
ORALAB_API size_t oralab_preset_result_warnings(const oralab_preset_result* r);
ORALAB_API size_t oralab_preset_result_detail_count(const oralab_preset_result* r);
ORALAB_API const char* oralab_preset_result_detail(const oralab_preset_result* r, size_t i);
ORALAB_API void oralab_preset_result_free(oralab_preset_result* r);

#ifdef __cplusplus
}
#endif

#endif
