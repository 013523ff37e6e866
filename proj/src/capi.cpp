#include "qwfin/qwfin.h"

#include <cstring>
#include <string>
#include <utility>

#include "error.hpp"
#include "fit.hpp"
#include "qwalk.hpp"
#include "returns.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

static_assert(int(qwfin::ErrorCode::invalid_argument) == QWF_ERR_INVALID_ARGUMENT);
static_assert(int(qwfin::ErrorCode::parse) == QWF_ERR_PARSE);
static_assert(int(qwfin::ErrorCode::insufficient_data) == QWF_ERR_INSUFFICIENT_DATA);
static_assert(int(qwfin::ErrorCode::degenerate_data) == QWF_ERR_DEGENERATE);
static_assert(int(qwfin::ErrorCode::out_of_range) == QWF_ERR_OUT_OF_RANGE);
static_assert(int(qwfin::ErrorCode::numeric) == QWF_ERR_NUMERIC);
static_assert(int(qwfin::ErrorCode::io) == QWF_ERR_IO);
static_assert(int(qwfin::ErrorCode::internal) == QWF_ERR_INTERNAL);

thread_local std::string g_last_error;

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return QWF_OK;
  } catch (const qwfin::Error& e) {
    g_last_error = e.what();
    return int(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return QWF_ERR_INTERNAL;
  }
}

int null_argument() {
  g_last_error = "null argument";
  return QWF_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct qwf_dist {
  qwfin::qwalk::PositionDistribution d;
};
struct qwf_series {
  qwfin::returns::PriceSeries s;
};
struct qwf_sample {
  qwfin::returns::ReturnSample s;
};
struct qwf_hist {
  qwfin::returns::ReturnHistogram h;
};
struct qwf_fit {
  qwfin::fit::FitResult r;
};
struct qwf_gfit {
  qwfin::fit::GaussianFitResult r;
};
struct qwf_gmm {
  qwfin::fit::Gmm2FitResult r;
};

extern "C" {

const char* qwf_version(void) { return kVersion; }

const char* qwf_last_error(void) { return g_last_error.c_str(); }

/* ---------------- walk distributions ---------------- */

int qwf_walk_distribution(double eta, double theta, double phi, double omega, int n,
                          int keep_parity_zeros, qwf_dist_t** out) {
  if (!out) return null_argument();
  return guarded([&] {
    const qwfin::qwalk::CoinParams coin(eta, theta);
    const qwfin::qwalk::InitParams init(phi, omega);
    auto dist = qwfin::qwalk::distribution(qwfin::qwalk::evolve(init, coin, n),
                                           keep_parity_zeros == 0);
    *out = new qwf_dist{std::move(dist)};
  });
}

int qwf_dist_smooth(const qwf_dist_t* dist, qwf_dist_t** out) {
  if (!dist || !out) return null_argument();
  return guarded([&] { *out = new qwf_dist{qwfin::qwalk::smooth_aggregate(dist->d)}; });
}

int qwf_walk_ensemble(double eta, double theta, double phi, double omega, double n_mean,
                      double n_std, int samples, uint64_t seed, qwf_dist_t** out) {
  if (!out) return null_argument();
  return guarded([&] {
    const qwfin::qwalk::CoinParams coin(eta, theta);
    const qwfin::qwalk::InitParams init(phi, omega);
    *out = new qwf_dist{
        qwfin::qwalk::ensemble_distribution(init, coin, n_mean, n_std, samples, seed)};
  });
}

int qwf_dist_kind(const qwf_dist_t* dist, int* kind) {
  if (!dist || !kind) return null_argument();
  *kind = int(dist->d.kind);
  return QWF_OK;
}

int qwf_dist_count(const qwf_dist_t* dist, size_t* count) {
  if (!dist || !count) return null_argument();
  *count = dist->d.positions.size();
  return QWF_OK;
}

int qwf_dist_data(const qwf_dist_t* dist, double* positions, double* probabilities) {
  if (!dist) return null_argument();
  if (positions)
    std::memcpy(positions, dist->d.positions.data(), dist->d.positions.size() * sizeof(double));
  if (probabilities)
    std::memcpy(probabilities, dist->d.probabilities.data(),
                dist->d.probabilities.size() * sizeof(double));
  return QWF_OK;
}

void qwf_dist_free(qwf_dist_t* dist) { delete dist; }

/* ---------------- series and statistics ---------------- */

int qwf_series_load_csv(const char* path, const char* ticker, qwf_series_t** out) {
  if (!path || !out) return null_argument();
  return guarded([&] {
    *out = new qwf_series{qwfin::returns::load_price_csv(path, ticker ? ticker : "")};
  });
}

int qwf_series_count(const qwf_series_t* series, size_t* count) {
  if (!series || !count) return null_argument();
  *count = series->s.size();
  return QWF_OK;
}

int qwf_series_ticker(const qwf_series_t* series, const char** ticker) {
  if (!series || !ticker) return null_argument();
  *ticker = series->s.ticker.c_str();
  return QWF_OK;
}

void qwf_series_free(qwf_series_t* series) { delete series; }

int qwf_log_returns(const qwf_series_t* series, int dt, qwf_sample_t** out) {
  if (!series || !out) return null_argument();
  return guarded([&] { *out = new qwf_sample{qwfin::returns::log_returns(series->s, dt)}; });
}

int qwf_sample_from_values(const double* values, size_t count, int dt, qwf_sample_t** out) {
  if (!values || !out) return null_argument();
  return guarded([&] {
    if (dt < 1) qwfin::fail(qwfin::ErrorCode::invalid_argument, "dt must be >= 1");
    qwfin::returns::ReturnSample sample;
    sample.dt = dt;
    sample.values.assign(values, values + count);
    *out = new qwf_sample{std::move(sample)};
  });
}

int qwf_sample_count(const qwf_sample_t* sample, size_t* count) {
  if (!sample || !count) return null_argument();
  *count = sample->s.values.size();
  return QWF_OK;
}

int qwf_sample_data(const qwf_sample_t* sample, double* values) {
  if (!sample || !values) return null_argument();
  std::memcpy(values, sample->s.values.data(), sample->s.values.size() * sizeof(double));
  return QWF_OK;
}

void qwf_sample_free(qwf_sample_t* sample) { delete sample; }

int qwf_histogram(const qwf_sample_t* sample, int n_bins, qwf_hist_t** out) {
  if (!sample || !out) return null_argument();
  return guarded([&] { *out = new qwf_hist{qwfin::returns::histogram(sample->s, n_bins)}; });
}

int qwf_hist_bins(const qwf_hist_t* hist, int* n_bins) {
  if (!hist || !n_bins) return null_argument();
  *n_bins = hist->h.n_bins();
  return QWF_OK;
}

int qwf_hist_data(const qwf_hist_t* hist, double* edges, double* probabilities) {
  if (!hist) return null_argument();
  if (edges) std::memcpy(edges, hist->h.edges.data(), hist->h.edges.size() * sizeof(double));
  if (probabilities)
    std::memcpy(probabilities, hist->h.probabilities.data(),
                hist->h.probabilities.size() * sizeof(double));
  return QWF_OK;
}

void qwf_hist_free(qwf_hist_t* hist) { delete hist; }

int qwf_bimodality(const qwf_hist_t* hist, qwf_bimodality_report* out) {
  if (!hist || !out) return null_argument();
  return guarded([&] {
    const auto report = qwfin::returns::bimodality(hist->h);
    *out = {report.bm,      report.p_max1, report.p_max2,    report.p_min,
            report.delta_x, report.l_eff,  report.mode_count};
  });
}

int qwf_skewness(const qwf_sample_t* sample, double* out) {
  if (!sample || !out) return null_argument();
  return guarded([&] { *out = qwfin::returns::skewness(sample->s); });
}

int qwf_std_by_scale(const qwf_series_t* series, int dt_max, double* out) {
  if (!series || !out) return null_argument();
  return guarded([&] {
    const auto stds = qwfin::returns::std_by_scale(series->s, dt_max);
    std::memcpy(out, stds.data(), stds.size() * sizeof(double));
  });
}

int qwf_scaling_exponent(const qwf_series_t* series, int dt_max, double* alpha,
                         double* alpha_stderr) {
  if (!series) return null_argument();
  return guarded([&] {
    const auto fit = qwfin::returns::scaling_exponent(series->s, dt_max);
    if (alpha) *alpha = fit.alpha;
    if (alpha_stderr) *alpha_stderr = fit.alpha_stderr;
  });
}

/* ---------------- fitting ---------------- */

void qwf_fit_config_default(qwf_fit_config* cfg) {
  if (!cfg) return;
  cfg->base_bins = 20;
  cfg->grid_points = 8;
  cfg->shift_min = -3;
  cfg->shift_max = 3;
  cfg->bin_delta_min = -4;
  cfg->bin_delta_max = 4;
  cfg->max_iterations = 2000;
  cfg->angle_tolerance = 1e-4;
  cfg->n_fixed = 100;
}

int qwf_hill_climb_fit(const qwf_sample_t* sample, const qwf_fit_config* cfg, qwf_fit_t** out) {
  if (!sample || !cfg || !out) return null_argument();
  return guarded([&] {
    qwfin::fit::NPolicy policy;
    policy.ensemble = false;
    policy.n_fixed = cfg->n_fixed;
    qwfin::fit::SearchConfig search;
    search.grid_points = cfg->grid_points;
    search.shift_min = cfg->shift_min;
    search.shift_max = cfg->shift_max;
    search.bin_delta_min = cfg->bin_delta_min;
    search.bin_delta_max = cfg->bin_delta_max;
    search.max_iterations = cfg->max_iterations;
    search.angle_tolerance = cfg->angle_tolerance;
    *out = new qwf_fit{qwfin::fit::hill_climb_fit(sample->s, cfg->base_bins, policy, search)};
  });
}

int qwf_fit_refine_ensemble(const qwf_fit_t* fit, const qwf_sample_t* sample, double n_mean,
                            double n_std, int samples, uint64_t seed, qwf_fit_t** out) {
  if (!fit || !sample || !out) return null_argument();
  return guarded([&] {
    *out = new qwf_fit{
        qwfin::fit::refine_with_ensemble(fit->r, sample->s, n_mean, n_std, samples, seed)};
  });
}

int qwf_fit_params(const qwf_fit_t* fit, double angles[4]) {
  if (!fit || !angles) return null_argument();
  angles[0] = fit->r.coin.eta;
  angles[1] = fit->r.coin.theta;
  angles[2] = fit->r.init.phi;
  angles[3] = fit->r.init.omega;
  return QWF_OK;
}

int qwf_fit_alignment(const qwf_fit_t* fit, int* shift, int* bin_delta, double* scale,
                      double* initial_position) {
  if (!fit) return null_argument();
  if (shift) *shift = fit->r.alignment.shift;
  if (bin_delta) *bin_delta = fit->r.alignment.bin_delta;
  if (scale) *scale = fit->r.alignment.scale;
  if (initial_position) *initial_position = fit->r.initial_position;
  return QWF_OK;
}

int qwf_fit_scores(const qwf_fit_t* fit, double* mae, double* ks) {
  if (!fit) return null_argument();
  if (mae) *mae = fit->r.mae;
  if (ks) *ks = fit->r.ks;
  return QWF_OK;
}

int qwf_fit_flags(const qwf_fit_t* fit, int* converged, int* iterations, double* final_step) {
  if (!fit) return null_argument();
  if (converged) *converged = fit->r.converged ? 1 : 0;
  if (iterations) *iterations = fit->r.iterations;
  if (final_step) *final_step = fit->r.final_step;
  return QWF_OK;
}

int qwf_fit_policy(const qwf_fit_t* fit, int* is_ensemble, int* n_fixed, double* n_mean,
                   double* n_std, int* samples, uint64_t* seed) {
  if (!fit) return null_argument();
  if (is_ensemble) *is_ensemble = fit->r.n_policy.ensemble ? 1 : 0;
  if (n_fixed) *n_fixed = fit->r.n_policy.n_fixed;
  if (n_mean) *n_mean = fit->r.n_policy.n_mean;
  if (n_std) *n_std = fit->r.n_policy.n_std;
  if (samples) *samples = fit->r.n_policy.samples;
  if (seed) *seed = fit->r.n_policy.seed;
  return QWF_OK;
}

int qwf_fit_curve_count(const qwf_fit_t* fit, size_t* count) {
  if (!fit || !count) return null_argument();
  *count = fit->r.centers.size();
  return QWF_OK;
}

int qwf_fit_curve(const qwf_fit_t* fit, double* centers, double* empirical, double* fitted) {
  if (!fit) return null_argument();
  const std::size_t n = fit->r.centers.size();
  if (centers) std::memcpy(centers, fit->r.centers.data(), n * sizeof(double));
  if (empirical) std::memcpy(empirical, fit->r.empirical_curve.data(), n * sizeof(double));
  if (fitted) std::memcpy(fitted, fit->r.fitted_curve.data(), n * sizeof(double));
  return QWF_OK;
}

int qwf_fit_trace_count(const qwf_fit_t* fit, size_t* count) {
  if (!fit || !count) return null_argument();
  *count = fit->r.mae_trace.size();
  return QWF_OK;
}

int qwf_fit_trace(const qwf_fit_t* fit, double* mae_trace) {
  if (!fit || !mae_trace) return null_argument();
  std::memcpy(mae_trace, fit->r.mae_trace.data(), fit->r.mae_trace.size() * sizeof(double));
  return QWF_OK;
}

void qwf_fit_free(qwf_fit_t* fit) { delete fit; }

int qwf_gaussian_fit(const qwf_sample_t* sample, int n_bins, qwf_gfit_t** out) {
  if (!sample || !out) return null_argument();
  return guarded([&] { *out = new qwf_gfit{qwfin::fit::gaussian_fit(sample->s, n_bins)}; });
}

int qwf_gfit_params(const qwf_gfit_t* fit, double* mean, double* stdev) {
  if (!fit) return null_argument();
  if (mean) *mean = fit->r.mean;
  if (stdev) *stdev = fit->r.stdev;
  return QWF_OK;
}

int qwf_gfit_scores(const qwf_gfit_t* fit, double* mae, double* ks) {
  if (!fit) return null_argument();
  if (mae) *mae = fit->r.mae;
  if (ks) *ks = fit->r.ks;
  return QWF_OK;
}

int qwf_gfit_curve_count(const qwf_gfit_t* fit, size_t* count) {
  if (!fit || !count) return null_argument();
  *count = fit->r.centers.size();
  return QWF_OK;
}

int qwf_gfit_curve(const qwf_gfit_t* fit, double* centers, double* empirical, double* fitted) {
  if (!fit) return null_argument();
  const std::size_t n = fit->r.centers.size();
  if (centers) std::memcpy(centers, fit->r.centers.data(), n * sizeof(double));
  if (empirical) std::memcpy(empirical, fit->r.empirical_curve.data(), n * sizeof(double));
  if (fitted) std::memcpy(fitted, fit->r.fitted_curve.data(), n * sizeof(double));
  return QWF_OK;
}

void qwf_gfit_free(qwf_gfit_t* fit) { delete fit; }

int qwf_gmm2_fit(const qwf_sample_t* sample, int n_bins, uint64_t seed, int restarts,
                 qwf_gmm_t** out) {
  if (!sample || !out) return null_argument();
  return guarded(
      [&] { *out = new qwf_gmm{qwfin::fit::gmm2_fit(sample->s, n_bins, seed, restarts)}; });
}

int qwf_gmm_params(const qwf_gmm_t* fit, double weights[2], double means[2], double stdevs[2]) {
  if (!fit) return null_argument();
  for (int k = 0; k < 2; ++k) {
    if (weights) weights[k] = fit->r.weights[std::size_t(k)];
    if (means) means[k] = fit->r.means[std::size_t(k)];
    if (stdevs) stdevs[k] = fit->r.stdevs[std::size_t(k)];
  }
  return QWF_OK;
}

int qwf_gmm_scores(const qwf_gmm_t* fit, double* mae, double* ks) {
  if (!fit) return null_argument();
  if (mae) *mae = fit->r.mae;
  if (ks) *ks = fit->r.ks;
  return QWF_OK;
}

int qwf_gmm_loglik_count(const qwf_gmm_t* fit, size_t* count) {
  if (!fit || !count) return null_argument();
  *count = fit->r.log_likelihood_trace.size();
  return QWF_OK;
}

int qwf_gmm_loglik_trace(const qwf_gmm_t* fit, double* trace) {
  if (!fit || !trace) return null_argument();
  std::memcpy(trace, fit->r.log_likelihood_trace.data(),
              fit->r.log_likelihood_trace.size() * sizeof(double));
  return QWF_OK;
}

int qwf_gmm_curve_count(const qwf_gmm_t* fit, size_t* count) {
  if (!fit || !count) return null_argument();
  *count = fit->r.centers.size();
  return QWF_OK;
}

int qwf_gmm_curve(const qwf_gmm_t* fit, double* centers, double* empirical, double* fitted) {
  if (!fit) return null_argument();
  const std::size_t n = fit->r.centers.size();
  if (centers) std::memcpy(centers, fit->r.centers.data(), n * sizeof(double));
  if (empirical) std::memcpy(empirical, fit->r.empirical_curve.data(), n * sizeof(double));
  if (fitted) std::memcpy(fitted, fit->r.fitted_curve.data(), n * sizeof(double));
  return QWF_OK;
}

void qwf_gmm_free(qwf_gmm_t* fit) { delete fit; }

}  // extern "C"
