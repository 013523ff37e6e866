#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <string>
#include <vector>

#include "qwfin/qwfin.h"

namespace {

constexpr double kPi = 3.14159265358979323846;

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("qwfin_capi_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::strlen(qwf_version()) > 0);
  qwf_dist_t* dist = nullptr;
  CHECK(qwf_walk_distribution(0.0, -1.0, 0.0, 0.0, 10, 0, &dist) == QWF_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(qwf_last_error()) > 0);
  CHECK(qwf_walk_distribution(0.0, 0.5, 0.0, 0.0, 10, 0, nullptr) == QWF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("walk distribution round trip") {
  qwf_dist_t* raw = nullptr;
  REQUIRE(qwf_walk_distribution(0.0, kPi / 4.0, 0.0, 0.0, 2, 0, &raw) == QWF_OK);
  size_t count = 0;
  CHECK(qwf_dist_count(raw, &count) == QWF_OK);
  REQUIRE(count == 3);
  int kind = -1;
  CHECK(qwf_dist_kind(raw, &kind) == QWF_OK);
  CHECK(kind == QWF_DIST_RAW);
  std::vector<double> pos(count);
  std::vector<double> prob(count);
  CHECK(qwf_dist_data(raw, pos.data(), prob.data()) == QWF_OK);
  CHECK(pos[0] == -2.0);
  CHECK(std::abs(prob[1] - 0.5) < 1e-15);

  qwf_dist_t* smooth = nullptr;
  REQUIRE(qwf_dist_smooth(raw, &smooth) == QWF_OK);
  CHECK(qwf_dist_count(smooth, &count) == QWF_OK);
  CHECK(count == 1);
  CHECK(qwf_dist_kind(smooth, &kind) == QWF_OK);
  CHECK(kind == QWF_DIST_SMOOTHED);
  qwf_dist_free(smooth);
  qwf_dist_free(raw);

  qwf_dist_t* ens = nullptr;
  REQUIRE(qwf_walk_ensemble(0.0, kPi / 4.0, kPi / 2.0, kPi / 2.0, 60.0, 9.0, 50, 42, &ens) ==
          QWF_OK);
  CHECK(qwf_dist_kind(ens, &kind) == QWF_OK);
  CHECK(kind == QWF_DIST_ENSEMBLE);
  CHECK(qwf_dist_count(ens, &count) == QWF_OK);
  std::vector<double> probs(count);
  CHECK(qwf_dist_data(ens, nullptr, probs.data()) == QWF_OK);
  double total = 0.0;
  for (double p : probs) total += p;
  CHECK(std::abs(total - 1.0) < 1e-10);
  qwf_dist_free(ens);
}

TEST_CASE("series, returns and statistics") {
  TempDir tmp;
  const auto csv = tmp.path / "demo.csv";
  {
    std::ofstream out(csv);
    out << "date,open\n";
    double price = 100.0;
    for (int i = 0; i < 400; ++i) {
      out << "2" << char('0' + (i / 100) % 10) << char('0' + (i / 10) % 10) << char('0' + i % 10)
          << "-01-01," << price << "\n";
      price *= (i % 2 == 0) ? 1.02 : 0.99;
    }
  }

  qwf_series_t* series = nullptr;
  REQUIRE(qwf_series_load_csv(csv.string().c_str(), "DEMO", &series) == QWF_OK);
  size_t rows = 0;
  CHECK(qwf_series_count(series, &rows) == QWF_OK);
  CHECK(rows == 400);
  const char* ticker = nullptr;
  CHECK(qwf_series_ticker(series, &ticker) == QWF_OK);
  CHECK(std::string(ticker) == "DEMO");

  qwf_sample_t* sample = nullptr;
  REQUIRE(qwf_log_returns(series, 5, &sample) == QWF_OK);
  size_t count = 0;
  CHECK(qwf_sample_count(sample, &count) == QWF_OK);
  CHECK(count == 395);

  qwf_sample_t* too_long = nullptr;
  CHECK(qwf_log_returns(series, 400, &too_long) == QWF_ERR_INSUFFICIENT_DATA);

  qwf_hist_t* hist = nullptr;
  REQUIRE(qwf_histogram(sample, 12, &hist) == QWF_OK);
  int bins = 0;
  CHECK(qwf_hist_bins(hist, &bins) == QWF_OK);
  CHECK(bins == 12);
  std::vector<double> edges(static_cast<size_t>(bins) + 1);
  std::vector<double> probs(static_cast<size_t>(bins));
  CHECK(qwf_hist_data(hist, edges.data(), probs.data()) == QWF_OK);
  double total = 0.0;
  for (double p : probs) total += p;
  CHECK(std::abs(total - 1.0) < 1e-12);

  qwf_bimodality_report report{};
  CHECK(qwf_bimodality(hist, &report) == QWF_OK);
  CHECK(report.mode_count >= 1);
  CHECK(report.l_eff > 0.0);

  double skew = 0.0;
  CHECK(qwf_skewness(sample, &skew) == QWF_OK);

  std::vector<double> stds(30);
  CHECK(qwf_std_by_scale(series, 30, stds.data()) == QWF_OK);
  CHECK(stds[0] > 0.0);
  double alpha = 0.0;
  double stderr_ = 0.0;
  CHECK(qwf_scaling_exponent(series, 30, &alpha, &stderr_) == QWF_OK);

  qwf_hist_free(hist);
  qwf_sample_free(sample);
  qwf_series_free(series);

  CHECK(qwf_series_load_csv((tmp.path / "absent.csv").string().c_str(), nullptr, &series) ==
        QWF_ERR_IO);
}

TEST_CASE("fit pipeline through the C interface") {
  // bimodal synthetic sample
  std::vector<double> values;
  for (int i = 0; i < 600; ++i) {
    const double u = double(i) / 600.0;
    values.push_back(-1.0 + 0.3 * std::sin(37.0 * u) + (i % 2 ? 2.0 : 0.0) +
                     0.2 * std::cos(113.0 * u));
  }
  qwf_sample_t* sample = nullptr;
  REQUIRE(qwf_sample_from_values(values.data(), values.size(), 1, &sample) == QWF_OK);

  qwf_fit_config cfg;
  qwf_fit_config_default(&cfg);
  CHECK(cfg.base_bins == 20);
  CHECK(cfg.n_fixed == 100);
  cfg.grid_points = 3;
  cfg.shift_min = -1;
  cfg.shift_max = 1;
  cfg.bin_delta_min = -1;
  cfg.bin_delta_max = 1;

  qwf_fit_t* fit = nullptr;
  REQUIRE(qwf_hill_climb_fit(sample, &cfg, &fit) == QWF_OK);
  double angles[4] = {};
  CHECK(qwf_fit_params(fit, angles) == QWF_OK);
  CHECK(angles[1] >= 0.0);
  CHECK(angles[1] <= kPi / 2.0);
  double mae = 0.0;
  double ks = 0.0;
  CHECK(qwf_fit_scores(fit, &mae, &ks) == QWF_OK);
  CHECK(mae >= 0.0);
  CHECK(ks >= 0.0);
  CHECK(ks <= 1.0);
  int shift = 0;
  int bin_delta = 0;
  double scale = 0.0;
  double initial_position = 0.0;
  CHECK(qwf_fit_alignment(fit, &shift, &bin_delta, &scale, &initial_position) == QWF_OK);
  CHECK(scale > 0.0);
  size_t curve_len = 0;
  CHECK(qwf_fit_curve_count(fit, &curve_len) == QWF_OK);
  REQUIRE(curve_len >= 19);
  std::vector<double> centers(curve_len);
  std::vector<double> emp(curve_len);
  std::vector<double> fitted(curve_len);
  CHECK(qwf_fit_curve(fit, centers.data(), emp.data(), fitted.data()) == QWF_OK);
  size_t trace_len = 0;
  CHECK(qwf_fit_trace_count(fit, &trace_len) == QWF_OK);
  std::vector<double> trace(trace_len);
  CHECK(qwf_fit_trace(fit, trace.data()) == QWF_OK);
  for (size_t i = 1; i < trace_len; ++i) CHECK(trace[i] <= trace[i - 1]);

  qwf_fit_t* refined = nullptr;
  REQUIRE(qwf_fit_refine_ensemble(fit, sample, 100.0, 0.0, 10, 42, &refined) == QWF_OK);
  double refined_mae = 0.0;
  CHECK(qwf_fit_scores(refined, &refined_mae, nullptr) == QWF_OK);
  CHECK(refined_mae == mae);
  int is_ensemble = 0;
  CHECK(qwf_fit_policy(refined, &is_ensemble, nullptr, nullptr, nullptr, nullptr, nullptr) ==
        QWF_OK);
  CHECK(is_ensemble == 1);
  qwf_fit_free(refined);
  qwf_fit_free(fit);

  qwf_gfit_t* gauss = nullptr;
  REQUIRE(qwf_gaussian_fit(sample, 20, &gauss) == QWF_OK);
  double g_mae = 0.0;
  CHECK(qwf_gfit_scores(gauss, &g_mae, nullptr) == QWF_OK);

  qwf_gmm_t* gmm = nullptr;
  REQUIRE(qwf_gmm2_fit(sample, 20, 42, 3, &gmm) == QWF_OK);
  double weights[2] = {};
  double means[2] = {};
  double stdevs[2] = {};
  CHECK(qwf_gmm_params(gmm, weights, means, stdevs) == QWF_OK);
  CHECK(std::abs(weights[0] + weights[1] - 1.0) < 1e-12);
  double m_mae = 0.0;
  CHECK(qwf_gmm_scores(gmm, &m_mae, nullptr) == QWF_OK);
  CHECK(m_mae < g_mae);  // bimodal target
  size_t ll_len = 0;
  CHECK(qwf_gmm_loglik_count(gmm, &ll_len) == QWF_OK);
  std::vector<double> ll(ll_len);
  CHECK(qwf_gmm_loglik_trace(gmm, ll.data()) == QWF_OK);
  for (size_t i = 1; i < ll_len; ++i) CHECK(ll[i] >= ll[i - 1] - 1e-9);

  qwf_gmm_free(gmm);
  qwf_gfit_free(gauss);
  qwf_sample_free(sample);
}
