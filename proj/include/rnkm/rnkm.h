#ifndef RNKM_RNKM_H
#define RNKM_RNKM_H

/* C interface to the RNKM toolkit. Every fallible call returns an
 * rnkm_status; on failure rnkm_last_error() describes the problem for the
 * calling thread. Handles are opaque and owned by the caller. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RNKM_API __declspec(dllexport)
#elif defined(__GNUC__)
#define RNKM_API __attribute__((visibility("default")))
#else
#define RNKM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rnkm_status {
  RNKM_OK = 0,
  RNKM_ERR_INVALID_ARGUMENT = 1,
  RNKM_ERR_DOMAIN = 2,
  RNKM_ERR_IO = 3,
  RNKM_ERR_PARSE = 4,
  RNKM_ERR_NUMERIC = 5,
  RNKM_ERR_INTERNAL = 6
} rnkm_status;

typedef enum rnkm_tnorm { RNKM_TNORM_MIN = 0, RNKM_TNORM_PRODUCT = 1, RNKM_TNORM_LUKASIEWICZ = 2 } rnkm_tnorm;

typedef enum rnkm_algorithm {
  RNKM_ALGO_KM = 0,
  RNKM_ALGO_KMPP = 1,
  RNKM_ALGO_KPKM = 2,
  RNKM_ALGO_FCM = 3,
  RNKM_ALGO_RNKM = 4
} rnkm_algorithm;

typedef struct rnkm_dataset rnkm_dataset;
typedef struct rnkm_result rnkm_result;

RNKM_API const char* rnkm_version(void);
RNKM_API const char* rnkm_status_name(rnkm_status status);
/* Message for the last failed call on this thread; "" when none. */
RNKM_API const char* rnkm_last_error(void);
/* Releases buffers returned through out-pointers (labels, JSON text). */
RNKM_API void rnkm_free(void* ptr);

/* ---- distance distribution ---------------------------------------------- */

/* t / (t + r) for t > 0, 0 at t = 0. */
RNKM_API rnkm_status rnkm_gamma(double r, double t, double* out);
RNKM_API rnkm_status rnkm_tnorm_apply(rnkm_tnorm tnorm, double a, double b, double* out);
/* `steps` values from lo to hi (both exact), log-spaced when log_spaced is
 * set; `out` must hold `steps` doubles. */
RNKM_API rnkm_status rnkm_t_grid(double lo, double hi, size_t steps, int log_spaced, double* out);

/* ---- data sets ------------------------------------------------------------ */

/* Loads a CSV file. `label_column` names a header column holding ground
 * truth (NULL for none). */
RNKM_API rnkm_status rnkm_dataset_load_csv(const char* path, const char* label_column, int has_header,
                                           rnkm_dataset** out);
/* CSV path, a JSON file describing a synthetic spec, or inline JSON
 * ({"dist": ..., "n": ..., "d": ..., "seed": ..., "params": {...}}). */
RNKM_API rnkm_status rnkm_dataset_open(const char* input, const char* label_column, rnkm_dataset** out);
/* Copies an n x d row-major array; `labels` may be NULL. */
RNKM_API rnkm_status rnkm_dataset_from_array(const double* values, size_t n, size_t d, const int* labels,
                                             rnkm_dataset** out);
/* `params_json` is an object of numeric parameters or NULL; n or d of 0
 * take the distribution's benchmark preset. */
RNKM_API rnkm_status rnkm_dataset_generate(const char* dist, const char* params_json, size_t n, size_t d,
                                           uint64_t seed, rnkm_dataset** out);
/* Min-max normalizes every column in place. */
RNKM_API rnkm_status rnkm_dataset_normalize(rnkm_dataset* ds);
RNKM_API rnkm_status rnkm_dataset_write_csv(const rnkm_dataset* ds, const char* path);
RNKM_API void rnkm_dataset_free(rnkm_dataset* ds);

RNKM_API size_t rnkm_dataset_rows(const rnkm_dataset* ds);
RNKM_API size_t rnkm_dataset_cols(const rnkm_dataset* ds);
/* Row-major n x d view valid until the handle is modified or freed. */
RNKM_API const double* rnkm_dataset_values(const rnkm_dataset* ds);
/* NULL when the data set carries no ground truth. */
RNKM_API const int* rnkm_dataset_labels(const rnkm_dataset* ds);

/* One label per line (optional header line, any text); labels are numbered
 * by first appearance. Free *labels with rnkm_free. */
RNKM_API rnkm_status rnkm_labels_load(const char* path, int** labels, size_t* n);

/* ---- clustering ----------------------------------------------------------- */

typedef struct rnkm_run_options {
  rnkm_algorithm algorithm;
  size_t k;
  const double* t_values; /* RNKM sweep grid; NULL uses 50 log-spaced values in [0.1, 10] */
  size_t t_count;
  uint64_t seed;
  int max_iters;
  double tol;
  double fcm_m;
  double sigma; /* KPKM bandwidth; <= 0 selects the median pairwise distance */
} rnkm_run_options;

RNKM_API void rnkm_run_options_init(rnkm_run_options* options);
RNKM_API rnkm_status rnkm_run(const rnkm_dataset* ds, const rnkm_run_options* options, rnkm_result** out);
RNKM_API void rnkm_result_free(rnkm_result* result);

RNKM_API size_t rnkm_result_k(const rnkm_result* r);
RNKM_API size_t rnkm_result_size(const rnkm_result* r);
RNKM_API const int* rnkm_result_labels(const rnkm_result* r);
/* k x d row-major. */
RNKM_API const double* rnkm_result_centroids(const rnkm_result* r);
/* Chosen t for RNKM, NaN otherwise. */
RNKM_API double rnkm_result_t(const rnkm_result* r);
RNKM_API int rnkm_result_iterations(const rnkm_result* r);
RNKM_API int rnkm_result_converged(const rnkm_result* r);
RNKM_API const double* rnkm_result_trace(const rnkm_result* r, size_t* length);

/* Elbow choice of k in [k_min, k_max] from Lloyd WCSS. */
RNKM_API rnkm_status rnkm_elbow(const rnkm_dataset* ds, int k_min, int k_max, uint64_t seed, int* k_out);

/* ---- validation ----------------------------------------------------------- */

typedef struct rnkm_report {
  double silhouette;
  double davies_bouldin;
  double calinski_harabasz;
  double distortion;
  double ari; /* NaN unless has_ari */
  int has_ari;
} rnkm_report;

/* Scores `predicted` (length n, labels 0..k-1 after compaction) against the
 * data with cluster-mean centroids. `truth` may be NULL; otherwise its
 * length must equal n. */
RNKM_API rnkm_status rnkm_validate(const rnkm_dataset* ds, const int* predicted, size_t n, const int* truth,
                                   size_t truth_n, rnkm_report* out);
RNKM_API rnkm_status rnkm_result_evaluate(const rnkm_dataset* ds, const rnkm_result* r, rnkm_report* out);
RNKM_API rnkm_status rnkm_adjusted_rand_index(const int* a, const int* b, size_t n, double* out);
RNKM_API rnkm_status rnkm_rand_index(const int* a, const int* b, size_t n, double* out);

/* ---- experiment drivers --------------------------------------------------- */

/* Runs a bench configuration file and writes results.csv, timings.csv and
 * summary.json under out_dir. */
RNKM_API rnkm_status rnkm_bench(const char* config_path, const char* out_dir);
/* RNKM at each t; writes sweep.csv and, when svg is set, one chart per index. */
RNKM_API rnkm_status rnkm_sweep_t(const rnkm_dataset* ds, size_t k, const double* t_values, size_t t_count,
                                  uint64_t seed, int log_x, int svg, const char* out_dir);
/* Per-iteration centroid frames. Each t gets its own run under
 * out_dir/t_<index>; with per_iteration_t the schedule advances one t per
 * iteration in a single run written to out_dir. max_iters <= 0 keeps the
 * default. */
RNKM_API rnkm_status rnkm_trace(const rnkm_dataset* ds, size_t k, const double* t_values, size_t t_count,
                                uint64_t seed, int max_iters, int per_iteration_t, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
