#ifndef INTERLAB_H
#define INTERLAB_H

/* C interface to the interchange-process laboratory.  All entry points are
 * exception-free: failures surface as status codes (or NaN for scalar
 * queries) with a thread-local message available from il_last_error(). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum il_status {
  IL_OK = 0,
  IL_ERR_RUNTIME = 1,
  IL_ERR_INVALID_ARGUMENT = 2,
  IL_ERR_CHECK_FAILED = 3,
  IL_ERR_IO = 4
} il_status;

/* Library version string, e.g. "0.1.0". */
const char* il_version(void);

/* Message describing the most recent failure on this thread; empty when the
 * last call succeeded. */
const char* il_last_error(void);

/* ------------------------------------------------------------------ runs */

/* A completed experiment: the resolved manifest, the verdict, and the
 * generated artifact files, all held in memory until il_run_free. */
typedef struct il_run il_run;

/* Parse the JSON manifest, run its command with the given worker count, and
 * hand back a run handle.  Statistical verdicts do not affect the status:
 * the call returns IL_OK whenever the experiment executed, and
 * il_run_passed reports whether every check passed. */
il_status il_run_manifest(const char* manifest_json, int workers, il_run** out_run);

/* 1 when every check in the verdict passed, else 0. */
int il_run_passed(const il_run* run);

/* Pretty-printed JSON documents owned by the run handle. */
const char* il_run_verdict_json(const il_run* run);
const char* il_run_manifest_json(const il_run* run);

/* Write manifest.json, verdict.json and all artifact files into out_dir,
 * creating it if needed. */
il_status il_run_write_outputs(const il_run* run, const char* out_dir);

/* Access to the artifact files without touching the filesystem. */
size_t il_run_file_count(const il_run* run);
const char* il_run_file_name(const il_run* run, size_t index);
const char* il_run_file_content(const il_run* run, size_t index);

void il_run_free(il_run* run);

/* ----------------------------------------------------------------- paths */

typedef struct il_path il_path;

/* Continuous-time simple random walk on Z started at start, jumping at
 * jump_rate, simulated on [0, horizon] with the seeded counter-based stream
 * identified by (seed, experiment, replicate). */
il_status il_srw_simulate(int64_t start, double jump_rate, double horizon,
                          uint64_t seed, uint32_t experiment, uint32_t replicate,
                          il_path** out_path);

double il_path_value_at(const il_path* path, double t);
double il_path_horizon(const il_path* path);
size_t il_path_jump_count(const il_path* path);

/* Write the path as "time,value" CSV rows to file_path. */
il_status il_path_write_csv(const il_path* path, const char* file_path);

void il_path_free(il_path* path);

/* --------------------------------------------- reflected Brownian motion */

/* Transition density / CDF of Brownian motion on [0,1] reflected at both
 * endpoints.  Returns NaN and sets il_last_error on invalid input. */
double il_rbm_transition_density(double x, double y, double t);
double il_rbm_transition_cdf(double x, double y, double t);

#ifdef __cplusplus
}
#endif

#endif /* INTERLAB_H */
