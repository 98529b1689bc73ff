/*
 * hflow - convex gradient flows and destabilizing rays on CAT(0) model spaces.
 *
 * C API of the shared library. All handles are opaque; every function that
 * can fail returns an hf_status and leaves a message retrievable through
 * hf_last_error() on the calling thread. Handles are created by *_run/_open
 * functions and released by the matching *_free/_close.
 */
#ifndef HFLOW_H
#define HFLOW_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hf_status {
  HF_OK = 0,
  HF_ERR_ARGUMENT = 1,         /* bad inputs, shape mismatch, bad literals */
  HF_ERR_UNKNOWN_INSTANCE = 2, /* unresolvable instance id */
  HF_ERR_NUMERICAL = 3,        /* solver or refinement failure */
  HF_ERR_IO = 4                /* file output failure */
} hf_status;

typedef struct hf_instance hf_instance;
typedef struct hf_trajectory hf_trajectory;
typedef struct hf_report hf_report;

const char* hf_version(void);

/* Message for the most recent failure on this thread. */
const char* hf_last_error(void);

/* Newline-separated ids of the shipped instances. *needed receives the
 * required buffer size including the terminator; buf may be NULL to query. */
hf_status hf_registry_ids(char* buf, size_t cap, size_t* needed);

hf_status hf_instance_open(const char* id, hf_instance** out);
void hf_instance_close(hf_instance* inst);
hf_status hf_instance_payload_size(const hf_instance* inst, size_t* out);

/* Parse a start literal ("3,4"; tripod "1,2"; toric "zero", "sin:0.1", ...)
 * into a payload. */
hf_status hf_instance_parse_start(const hf_instance* inst, const char* literal, double* buf,
                                  size_t cap, size_t* len);

/* k-th canonical start of the instance (k = 0 is the default). */
hf_status hf_instance_default_start(const hf_instance* inst, int k, double* buf, size_t cap,
                                    size_t* len);

typedef struct hf_run_options {
  double horizon; /* <= 0: instance default */
  double tol;     /* <= 0: instance default */
  long m_cap;     /* <= 0: instance default */
  unsigned long long seed;
  int jobs; /* parallelism over starts; <= 0 means 1 */
} hf_run_options;

void hf_run_options_init(hf_run_options* opts);

/* ------------------------------------------------------------------ flow */

hf_status hf_flow_run(const hf_instance* inst, const double* x0, size_t x0_len,
                      const hf_run_options* opts, hf_trajectory** out);
size_t hf_trajectory_nodes(const hf_trajectory* traj);
hf_status hf_trajectory_node(const hf_trajectory* traj, size_t k, double* t, double* value,
                             double* slope, double* dist_from_start);
hf_status hf_trajectory_write_csv(const hf_trajectory* traj, const char* path);
hf_status hf_trajectory_write_json(const hf_trajectory* traj, const char* path);
/* Toric instances only: final potential snapshot (x, u, phi, S, w). */
hf_status hf_trajectory_write_snapshot_csv(const hf_trajectory* traj, const char* path);
void hf_trajectory_free(hf_trajectory* traj);

/* ---------------------------------------------------------- destabilizer */

/* starts: n_starts payloads of payload_len doubles each, concatenated. */
hf_status hf_destabilize_run(const hf_instance* inst, const double* starts, size_t n_starts,
                             size_t payload_len, const hf_run_options* opts, hf_report** out);

/* keys: "B", "ratio", "norm", "gap", "escape_distance", "uniqueness_probe"
 * (multi-start only), "unstable" (0/1), "B_spread" (multi-start only). */
hf_status hf_report_double(const hf_report* rep, const char* key, double* out);
/* keys: "case" ("bounded"/"escaping"), "instance", "flags" (';'-separated). */
hf_status hf_report_string(const hf_report* rep, const char* key, char* buf, size_t cap);
hf_status hf_report_write_json(const hf_report* rep, const char* path);
hf_status hf_report_write_summary_csv(const hf_report* rep, const char* path, int with_header);
/* Ray CSV/JSON; HF_ERR_ARGUMENT when the run ended bounded (trivial ray). */
hf_status hf_report_write_ray_csv(const hf_report* rep, const char* path);
hf_status hf_report_write_ray_json(const hf_report* rep, const char* path);
hf_status hf_report_write_trajectory_csv(const hf_report* rep, const char* path);
void hf_report_free(hf_report* rep);

/* ---------------------------------------------------------------- checks */

/* suite: "cat0", "evi", "sandwich", "moment-weight", "bind" or "all".
 * Writes a pass/fail table into buf; *passed is 1 iff every line passed. */
hf_status hf_check_run(const hf_instance* inst, const char* suite, const hf_run_options* opts,
                       char* buf, size_t cap, size_t* needed, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* HFLOW_H */
