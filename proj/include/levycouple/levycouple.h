/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the coupling simulator. Every function returns an
 * lvc_status; on failure lvc_last_error() describes the problem for the
 * calling thread.
 */
#ifndef LEVYCOUPLE_H
#define LEVYCOUPLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LEVYCOUPLE_BUILDING_LIBRARY)
#    define LVC_API __declspec(dllexport)
#  else
#    define LVC_API __declspec(dllimport)
#  endif
#else
#  define LVC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lvc_status {
  LVC_OK = 0,
  LVC_INVALID_ARGUMENT = 1,
  LVC_INVALID_SPEC = 2,
  LVC_IO_ERROR = 3,
  LVC_VERIFICATION_FAILED = 4,
  LVC_NUMERIC_ERROR = 5,
  LVC_INTERNAL_ERROR = 6
} lvc_status;

typedef struct lvc_simulation lvc_simulation;
typedef struct lvc_verification lvc_verification;

typedef struct lvc_run_result {
  int coupled;
  double t_coupling;   /* NaN when not coupled */
  double tau_coupling; /* NaN when not coupled */
  uint64_t steps;
  double final_v;
  double final_u;
} lvc_run_result;

LVC_API const char* lvc_version(void);
LVC_API int lvc_seed_split_version(void);
LVC_API const char* lvc_status_string(lvc_status status);
/* Message of the last failure on this thread; empty when none. */
LVC_API const char* lvc_last_error(void);

/* Simulation from a JSON experiment spec (see README). Validates eagerly. */
LVC_API lvc_status lvc_simulation_create(const char* spec_json, lvc_simulation** out);
LVC_API void lvc_simulation_destroy(lvc_simulation* sim);
/* Runs the batch; the result does not depend on `threads`. */
LVC_API lvc_status lvc_simulation_run(lvc_simulation* sim, unsigned threads);
LVC_API lvc_status lvc_simulation_run_count(const lvc_simulation* sim, size_t* out);
LVC_API lvc_status lvc_simulation_get_run(const lvc_simulation* sim, size_t index, lvc_run_result* out);
LVC_API lvc_status lvc_simulation_coupling_fraction(const lvc_simulation* sim, double* out);
/* Writers: per-run CSV, JSON sidecar (spec and summary), JSON with all runs,
 * and trajectory snapshots (requires snapshot_every > 0 in the spec). */
LVC_API lvc_status lvc_simulation_write_csv(const lvc_simulation* sim, const char* path);
LVC_API lvc_status lvc_simulation_write_sidecar(const lvc_simulation* sim, const char* path);
LVC_API lvc_status lvc_simulation_write_json(const lvc_simulation* sim, const char* path);
LVC_API lvc_status lvc_simulation_write_trajectories(const lvc_simulation* sim, const char* path);
/* Resolved spec as JSON. The buffer stays valid until the handle is destroyed. */
LVC_API lvc_status lvc_simulation_spec_json(const lvc_simulation* sim, const char** out);

/* Rate verification of one named control from a JSON request. */
LVC_API lvc_status lvc_verification_create(const char* request_json, lvc_verification** out);
LVC_API void lvc_verification_destroy(lvc_verification* ver);
/* Sets *passed to 1 or 0. Returns LVC_OK even when checks fail. */
LVC_API lvc_status lvc_verification_run(lvc_verification* ver, int* passed);
/* The buffer stays valid until the next run or destroy. */
LVC_API lvc_status lvc_verification_report_json(const lvc_verification* ver, const char** out);
LVC_API lvc_status lvc_verification_write_report(const lvc_verification* ver, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* LEVYCOUPLE_H */
