/* qwfin - discrete-time quantum walk models for long-horizon return
 * distributions.
 *
 * C interface of the shared library. All functions return a qwf_error code;
 * outputs are written through pointers. Objects are opaque handles released
 * with the matching *_free function. On failure qwf_last_error() returns a
 * thread-local description of the most recent error.
 *
 * Array getters follow a count/fill pattern: query the element count first,
 * then pass caller-allocated buffers of that size (any buffer pointer may be
 * NULL to skip that output).
 */

#ifndef QWFIN_QWFIN_H
#define QWFIN_QWFIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QWF_API __declspec(dllexport)
#else
#define QWF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qwf_error {
  QWF_OK = 0,
  QWF_ERR_INVALID_ARGUMENT = 1,
  QWF_ERR_PARSE = 2,
  QWF_ERR_INSUFFICIENT_DATA = 3,
  QWF_ERR_DEGENERATE = 4,
  QWF_ERR_OUT_OF_RANGE = 5,
  QWF_ERR_NUMERIC = 6,
  QWF_ERR_IO = 7,
  QWF_ERR_INTERNAL = 8
} qwf_error;

QWF_API const char* qwf_version(void);

/* Message of the most recent error on this thread; empty string if none. */
QWF_API const char* qwf_last_error(void);

/* ------------------------------------------------------------------ */
/* quantum walk distributions                                         */
/* ------------------------------------------------------------------ */

typedef struct qwf_dist qwf_dist_t;

#define QWF_DIST_RAW 0
#define QWF_DIST_SMOOTHED 1
#define QWF_DIST_ENSEMBLE 2

/* Position distribution of a walk with coin angles (eta, theta), initial
 * spinor angles (phi, omega) and n steps. keep_parity_zeros retains the
 * exactly-zero odd-parity sites (0 drops them). */
QWF_API int qwf_walk_distribution(double eta, double theta, double phi, double omega, int n,
                                  int keep_parity_zeros, qwf_dist_t** out);

/* Aggregates consecutive triples of non-zero-probability positions of a raw
 * distribution into single probability-weighted points. */
QWF_API int qwf_dist_smooth(const qwf_dist_t* dist, qwf_dist_t** out);

/* Equal-weight average over `samples` walks whose step counts are drawn from
 * N(n_mean, n_std^2), rounded to the nearest even integer. Seed-reproducible. */
QWF_API int qwf_walk_ensemble(double eta, double theta, double phi, double omega, double n_mean,
                              double n_std, int samples, uint64_t seed, qwf_dist_t** out);

QWF_API int qwf_dist_kind(const qwf_dist_t* dist, int* kind);
QWF_API int qwf_dist_count(const qwf_dist_t* dist, size_t* count);
QWF_API int qwf_dist_data(const qwf_dist_t* dist, double* positions, double* probabilities);
QWF_API void qwf_dist_free(qwf_dist_t* dist);

/* ------------------------------------------------------------------ */
/* price series and return statistics                                 */
/* ------------------------------------------------------------------ */

typedef struct qwf_series qwf_series_t;
typedef struct qwf_sample qwf_sample_t;
typedef struct qwf_hist qwf_hist_t;

/* Loads dated opening prices from CSV. Accepts a minimal `date,open` layout
 * or a vendor export with at least Date and Open columns (case-insensitive);
 * rows with missing or non-positive prices are dropped. ticker may be NULL to
 * use the file stem. */
QWF_API int qwf_series_load_csv(const char* path, const char* ticker, qwf_series_t** out);
QWF_API int qwf_series_count(const qwf_series_t* series, size_t* count);
QWF_API int qwf_series_ticker(const qwf_series_t* series, const char** ticker);
QWF_API void qwf_series_free(qwf_series_t* series);

/* Log-returns over dt trading days, overlapping windows. */
QWF_API int qwf_log_returns(const qwf_series_t* series, int dt, qwf_sample_t** out);
/* Sample built directly from values (for synthetic inputs). */
QWF_API int qwf_sample_from_values(const double* values, size_t count, int dt, qwf_sample_t** out);
QWF_API int qwf_sample_count(const qwf_sample_t* sample, size_t* count);
QWF_API int qwf_sample_data(const qwf_sample_t* sample, double* values);
QWF_API void qwf_sample_free(qwf_sample_t* sample);

/* Equal-width histogram spanning [min, max]; right-most bin closed. */
QWF_API int qwf_histogram(const qwf_sample_t* sample, int n_bins, qwf_hist_t** out);
QWF_API int qwf_hist_bins(const qwf_hist_t* hist, int* n_bins);
/* edges has n_bins + 1 entries, probabilities n_bins; either may be NULL. */
QWF_API int qwf_hist_data(const qwf_hist_t* hist, double* edges, double* probabilities);
QWF_API void qwf_hist_free(qwf_hist_t* hist);

typedef struct qwf_bimodality_report {
  double bm;
  double p_max1;
  double p_max2;
  double p_min;
  double delta_x;
  double l_eff;
  int mode_count;
} qwf_bimodality_report;

QWF_API int qwf_bimodality(const qwf_hist_t* hist, qwf_bimodality_report* out);

/* Cumulant-ratio skewness m3 / m2^{3/2} of the raw sample. */
QWF_API int qwf_skewness(const qwf_sample_t* sample, double* out);

/* Population standard deviation of the dt-day log-returns for dt = 1..dt_max;
 * out must hold dt_max doubles. */
QWF_API int qwf_std_by_scale(const qwf_series_t* series, int dt_max, double* out);

/* Slope of ln std against ln dt over dt = 1..dt_max, with standard error. */
QWF_API int qwf_scaling_exponent(const qwf_series_t* series, int dt_max, double* alpha,
                                 double* alpha_stderr);

/* ------------------------------------------------------------------ */
/* fitting                                                            */
/* ------------------------------------------------------------------ */

typedef struct qwf_fit qwf_fit_t;
typedef struct qwf_gfit qwf_gfit_t;
typedef struct qwf_gmm qwf_gmm_t;

typedef struct qwf_fit_config {
  int base_bins;      /* empirical bins before the bin_delta adjustment */
  int grid_points;    /* stage-1 grid points per angular axis */
  int shift_min;      /* relative shift range, in bins */
  int shift_max;
  int bin_delta_min;  /* bin-count adjustment range */
  int bin_delta_max;
  int max_iterations;
  double angle_tolerance; /* radians; search stops below this step size */
  int n_fixed;        /* walk steps for the fixed-n search */
} qwf_fit_config;

QWF_API void qwf_fit_config_default(qwf_fit_config* cfg);

/* Coarse grid scan plus steepest-ascent hill climbing on the mean absolute
 * error between the binned sample and the aligned walk distribution. */
QWF_API int qwf_hill_climb_fit(const qwf_sample_t* sample, const qwf_fit_config* cfg,
                               qwf_fit_t** out);

/* Re-scores a fixed-n fit with an ensemble-averaged curve; angles and
 * alignment hyperparameters are kept. */
QWF_API int qwf_fit_refine_ensemble(const qwf_fit_t* fit, const qwf_sample_t* sample,
                                    double n_mean, double n_std, int samples, uint64_t seed,
                                    qwf_fit_t** out);

/* angles: eta, theta, phi, omega */
QWF_API int qwf_fit_params(const qwf_fit_t* fit, double angles[4]);
QWF_API int qwf_fit_alignment(const qwf_fit_t* fit, int* shift, int* bin_delta, double* scale,
                              double* initial_position);
QWF_API int qwf_fit_scores(const qwf_fit_t* fit, double* mae, double* ks);
QWF_API int qwf_fit_flags(const qwf_fit_t* fit, int* converged, int* iterations,
                          double* final_step);
/* is_ensemble, n params of the scored curve; any output may be NULL. */
QWF_API int qwf_fit_policy(const qwf_fit_t* fit, int* is_ensemble, int* n_fixed, double* n_mean,
                           double* n_std, int* samples, uint64_t* seed);
QWF_API int qwf_fit_curve_count(const qwf_fit_t* fit, size_t* count);
QWF_API int qwf_fit_curve(const qwf_fit_t* fit, double* centers, double* empirical,
                          double* fitted);
QWF_API int qwf_fit_trace_count(const qwf_fit_t* fit, size_t* count);
QWF_API int qwf_fit_trace(const qwf_fit_t* fit, double* mae_trace);
QWF_API void qwf_fit_free(qwf_fit_t* fit);

/* Method-of-moments Gaussian baseline, bin-integrated on the sample's
 * n_bins histogram. */
QWF_API int qwf_gaussian_fit(const qwf_sample_t* sample, int n_bins, qwf_gfit_t** out);
QWF_API int qwf_gfit_params(const qwf_gfit_t* fit, double* mean, double* stdev);
QWF_API int qwf_gfit_scores(const qwf_gfit_t* fit, double* mae, double* ks);
QWF_API int qwf_gfit_curve_count(const qwf_gfit_t* fit, size_t* count);
QWF_API int qwf_gfit_curve(const qwf_gfit_t* fit, double* centers, double* empirical,
                           double* fitted);
QWF_API void qwf_gfit_free(qwf_gfit_t* fit);

/* Two-component Gaussian mixture baseline fitted by EM with seeded restarts. */
QWF_API int qwf_gmm2_fit(const qwf_sample_t* sample, int n_bins, uint64_t seed, int restarts,
                         qwf_gmm_t** out);
QWF_API int qwf_gmm_params(const qwf_gmm_t* fit, double weights[2], double means[2],
                           double stdevs[2]);
QWF_API int qwf_gmm_scores(const qwf_gmm_t* fit, double* mae, double* ks);
QWF_API int qwf_gmm_loglik_count(const qwf_gmm_t* fit, size_t* count);
QWF_API int qwf_gmm_loglik_trace(const qwf_gmm_t* fit, double* trace);
QWF_API int qwf_gmm_curve_count(const qwf_gmm_t* fit, size_t* count);
QWF_API int qwf_gmm_curve(const qwf_gmm_t* fit, double* centers, double* empirical,
                          double* fitted);
QWF_API void qwf_gmm_free(qwf_gmm_t* fit);

#ifdef __cplusplus
}
#endif

#endif /* QWFIN_QWFIN_H */
