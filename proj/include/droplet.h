#ifndef DROPLET_H
#define DROPLET_H

/* C interface to the droplet solvers. Handles are opaque; every call that
 * can fail returns a droplet_status, and droplet_last_error() describes the
 * most recent failure on the calling thread. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct droplet_scenario droplet_scenario;
typedef struct droplet_result droplet_result;

typedef enum {
    DROPLET_OK = 0,
    DROPLET_CHECK_FAILURE = 1, /* a verification check did not hold */
    DROPLET_INVALID_INPUT = 2, /* malformed config, key, or argument */
    DROPLET_NUMERIC_ERROR = 3  /* computation could not finish to tolerance */
} droplet_status;

const char* droplet_version(void);

/* message of the last failing call on this thread; empty string if none */
const char* droplet_last_error(void);

/* ---- scenarios -------------------------------------------------------- */

droplet_status droplet_scenario_parse(const char* text, droplet_scenario** out);
droplet_status droplet_scenario_load(const char* path, droplet_scenario** out);
droplet_status droplet_scenario_set(droplet_scenario* sc, const char* key,
                                    const char* value);

/* copy the scenario name / canonical config text into buf (NUL-terminated).
 * Fails with DROPLET_INVALID_INPUT when cap is too small; *needed (optional)
 * receives the required capacity either way. */
droplet_status droplet_scenario_name(const droplet_scenario* sc, char* buf,
                                     size_t cap, size_t* needed);
droplet_status droplet_scenario_canonical(const droplet_scenario* sc, char* buf,
                                          size_t cap, size_t* needed);

void droplet_scenario_free(droplet_scenario* sc);

/* ---- solving ---------------------------------------------------------- */

/* Solve the scenario. When out_dir is non-NULL and non-empty the artifact
 * files (manifest.cfg, slice CSVs, atoms.csv, ...) are written there. */
droplet_status droplet_solve(const droplet_scenario* sc, const char* out_dir,
                             droplet_result** out);

/* Rerun at each cell count in `cells` (ascending, length n >= 2) and record
 * the L1 distance between consecutive resolutions. */
droplet_status droplet_converge(const droplet_scenario* sc, const int* cells,
                                int n, const char* out_dir,
                                droplet_result** out);

/* Solve in memory and audit the result. Returns DROPLET_CHECK_FAILURE (with
 * a result carrying the individual checks) when an audit fails. */
droplet_status droplet_verify(const droplet_scenario* sc, double tol_scale,
                              droplet_result** out);

/* ---- results ---------------------------------------------------------- */

int droplet_result_slice_count(const droplet_result* r);

/* Borrow one solved slice. The pointers stay valid until the result is
 * freed; n receives the node count. Any output pointer may be NULL. */
droplet_status droplet_result_slice(const droplet_result* r, int slice,
                                    double* time, const double** x,
                                    const double** u, const double** V, int* n);

int droplet_result_check_count(const droplet_result* r);
droplet_status droplet_result_check(const droplet_result* r, int idx,
                                    char* name_buf, size_t name_cap,
                                    int* passed, double* value, double* bound);

/* 1 when every check passed (or the result carries no checks), else 0 */
int droplet_result_passed(const droplet_result* r);

int droplet_result_convergence_count(const droplet_result* r);
/* distance is NaN on the first (coarsest) row */
droplet_status droplet_result_convergence(const droplet_result* r, int idx,
                                          int* cells, double* distance);

void droplet_result_free(droplet_result* r);

#ifdef __cplusplus
}
#endif

#endif /* DROPLET_H */
