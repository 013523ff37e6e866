// qwfin command-line tool: walk simulation, return statistics, volatility
// scaling and distribution fits, emitted as JSON reports and plot-ready CSV.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qwfin/qwfin.h"

namespace {

using json = nlohmann::ordered_json;

// exit codes: 0 success, 2 usage/parse error, 3 insufficient data
struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(int rc) {
  return (rc == QWF_ERR_INSUFFICIENT_DATA || rc == QWF_ERR_DEGENERATE) ? 3 : 2;
}

void check(int rc) {
  if (rc != QWF_OK) throw CliError{exit_code_for(rc), qwf_last_error()};
}

template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, std::integral_constant<decltype(Free), Free>>;

using Dist = Handle<qwf_dist_t, qwf_dist_free>;
using Series = Handle<qwf_series_t, qwf_series_free>;
using Sample = Handle<qwf_sample_t, qwf_sample_free>;
using Hist = Handle<qwf_hist_t, qwf_hist_free>;
using Fit = Handle<qwf_fit_t, qwf_fit_free>;
using GFit = Handle<qwf_gfit_t, qwf_gfit_free>;
using Gmm = Handle<qwf_gmm_t, qwf_gmm_free>;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{2, "cannot open '" + path + "'"};
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char chunk[65536];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= std::uint64_t(static_cast<unsigned char>(chunk[i]));
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw CliError{2, "cannot write '" + path.string() + "'"};
  return out;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << "\n";
}

json dist_to_json(const qwf_dist_t* dist) {
  size_t count = 0;
  check(qwf_dist_count(dist, &count));
  int kind = 0;
  check(qwf_dist_kind(dist, &kind));
  std::vector<double> pos(count);
  std::vector<double> prob(count);
  check(qwf_dist_data(dist, pos.data(), prob.data()));
  static const char* kKinds[] = {"raw", "smoothed", "ensemble"};
  return json{{"kind", kKinds[kind]}, {"positions", pos}, {"probabilities", prob}};
}

void write_dist_csv(const std::filesystem::path& path, const qwf_dist_t* dist) {
  size_t count = 0;
  check(qwf_dist_count(dist, &count));
  std::vector<double> pos(count);
  std::vector<double> prob(count);
  check(qwf_dist_data(dist, pos.data(), prob.data()));
  auto out = open_output(path);
  out << "coordinate,probability\n";
  for (size_t i = 0; i < count; ++i) out << fmt17(pos[i]) << "," << fmt17(prob[i]) << "\n";
}

json bimodality_to_json(const qwf_bimodality_report& r) {
  return json{{"bm", r.bm},           {"p_max1", r.p_max1}, {"p_max2", r.p_max2},
              {"p_min", r.p_min},     {"delta_x", r.delta_x}, {"l_eff", r.l_eff},
              {"mode_count", r.mode_count}};
}

json input_provenance(const std::string& path, const qwf_series_t* series) {
  size_t rows = 0;
  check(qwf_series_count(series, &rows));
  return json{{"path", path}, {"digest_fnv1a64", hex64(fnv1a64_file(path))}, {"rows_used", rows}};
}

// JSON config file: keys are long option names without the leading dashes.
// Values from the file are injected as trailing arguments for every option the
// user did not pass explicitly, so command-line flags win.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw CliError{2, "cannot open config '" + config_path + "'"};
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    throw CliError{2, std::string("invalid config JSON: ") + e.what()};
  }
  if (!cfg.is_object()) throw CliError{2, "config must be a JSON object"};

  std::vector<std::string> out = args;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
    if (present) continue;
    auto append_value = [&](const json& v) {
      out.push_back(flag);
      if (v.is_string()) out.push_back(v.get<std::string>());
      else if (v.is_boolean()) { if (!v.get<bool>()) out.pop_back(); }
      else out.push_back(v.dump());
    };
    if (value.is_array())
      for (const auto& v : value) append_value(v);
    else
      append_value(value);
  }
  return out;
}

struct SimulateOptions {
  double eta = 0.0;
  double theta = 0.78539816339744831;  // pi/4
  double phi = 0.0;
  double omega = 0.0;
  int n = 100;
  bool ensemble = false;
  double n_mean = 100.0;
  double n_std = 15.0;
  int samples = 1000;
  std::uint64_t seed = 42;
  std::string output = ".";
};

int run_simulate(const SimulateOptions& opt) {
  std::filesystem::create_directories(opt.output);
  const std::filesystem::path dir(opt.output);

  Dist raw{nullptr};
  {
    qwf_dist_t* p = nullptr;
    check(qwf_walk_distribution(opt.eta, opt.theta, opt.phi, opt.omega, opt.n, 0, &p));
    raw.reset(p);
  }
  Dist smoothed{nullptr};
  {
    qwf_dist_t* p = nullptr;
    check(qwf_dist_smooth(raw.get(), &p));
    smoothed.reset(p);
  }
  write_dist_csv(dir / "raw.csv", raw.get());
  write_json(dir / "raw.json", dist_to_json(raw.get()));
  write_dist_csv(dir / "smoothed.csv", smoothed.get());
  write_json(dir / "smoothed.json", dist_to_json(smoothed.get()));

  if (opt.ensemble) {
    qwf_dist_t* p = nullptr;
    check(qwf_walk_ensemble(opt.eta, opt.theta, opt.phi, opt.omega, opt.n_mean, opt.n_std,
                            opt.samples, opt.seed, &p));
    Dist ens(p);
    write_dist_csv(dir / "ensemble.csv", ens.get());
    write_json(dir / "ensemble.json", dist_to_json(ens.get()));
  }

  json config_echo{{"eta", opt.eta},       {"theta", opt.theta}, {"phi", opt.phi},
                   {"omega", opt.omega},   {"n", opt.n},         {"ensemble", opt.ensemble},
                   {"n-mean", opt.n_mean}, {"n-std", opt.n_std}, {"samples", opt.samples},
                   {"seed", opt.seed}};
  write_json(dir / "run.json", json{{"config", config_echo},
                                    {"tool_version", qwf_version()},
                                    {"timestamp", utc_timestamp()}});
  return 0;
}

struct StatsOptions {
  std::string input;
  std::string ticker;
  std::vector<int> dts;
  int bins = 20;
  std::string output = ".";
};

int run_stats(const StatsOptions& opt) {
  std::filesystem::create_directories(opt.output);
  const std::filesystem::path dir(opt.output);

  Series series{nullptr};
  {
    qwf_series_t* p = nullptr;
    check(qwf_series_load_csv(opt.input.c_str(), opt.ticker.empty() ? nullptr : opt.ticker.c_str(),
                              &p));
    series.reset(p);
  }
  const char* ticker = nullptr;
  check(qwf_series_ticker(series.get(), &ticker));

  std::vector<int> dts = opt.dts.empty() ? std::vector<int>{504} : opt.dts;
  json per_dt = json::array();
  for (int dt : dts) {
    qwf_sample_t* sp = nullptr;
    check(qwf_log_returns(series.get(), dt, &sp));
    Sample sample(sp);
    size_t count = 0;
    check(qwf_sample_count(sample.get(), &count));

    json entry{{"dt", dt}, {"sample_size", count}};

    // samples too small or flat for a histogram still get a stats entry
    qwf_hist_t* hp = nullptr;
    int rc = qwf_histogram(sample.get(), opt.bins, &hp);
    if (rc == QWF_OK) {
      Hist hist(hp);
      int n_bins = 0;
      check(qwf_hist_bins(hist.get(), &n_bins));
      std::vector<double> edges(static_cast<size_t>(n_bins) + 1);
      std::vector<double> probs(static_cast<size_t>(n_bins));
      check(qwf_hist_data(hist.get(), edges.data(), probs.data()));

      const std::string hist_file = "hist_dt" + std::to_string(dt) + ".csv";
      {
        auto out = open_output(dir / hist_file);
        out << "bin_left,bin_right,bin_center,probability\n";
        for (int i = 0; i < n_bins; ++i)
          out << fmt17(edges[size_t(i)]) << "," << fmt17(edges[size_t(i) + 1]) << ","
              << fmt17(0.5 * (edges[size_t(i)] + edges[size_t(i) + 1])) << ","
              << fmt17(probs[size_t(i)]) << "\n";
      }

      qwf_bimodality_report report{};
      check(qwf_bimodality(hist.get(), &report));
      entry["bins"] = n_bins;
      entry["classification"] = report.mode_count >= 2 ? "bimodal" : "unimodal";
      entry["bimodality"] = bimodality_to_json(report);
      entry["histogram_file"] = hist_file;
    } else if (rc == QWF_ERR_DEGENERATE) {
      entry["degenerate"] = true;
    } else {
      check(rc);
    }

    double skew = 0.0;
    rc = qwf_skewness(sample.get(), &skew);
    if (rc == QWF_OK) entry["skewness"] = skew;
    else if (rc != QWF_ERR_DEGENERATE && rc != QWF_ERR_INVALID_ARGUMENT) check(rc);

    per_dt.push_back(entry);
  }

  json doc{{"ticker", ticker},
           {"input", input_provenance(opt.input, series.get())},
           {"config", json{{"bins", opt.bins}, {"dt", dts}}},
           {"tool_version", qwf_version()},
           {"timestamp", utc_timestamp()},
           {"stats", per_dt}};
  write_json(dir / "stats.json", doc);
  return 0;
}

struct ScalingOptions {
  std::string input;
  std::string ticker;
  int dt_max = 504;
  std::string output = ".";
};

int run_scaling(const ScalingOptions& opt) {
  std::filesystem::create_directories(opt.output);
  const std::filesystem::path dir(opt.output);

  Series series{nullptr};
  {
    qwf_series_t* p = nullptr;
    check(qwf_series_load_csv(opt.input.c_str(), opt.ticker.empty() ? nullptr : opt.ticker.c_str(),
                              &p));
    series.reset(p);
  }
  const char* ticker = nullptr;
  check(qwf_series_ticker(series.get(), &ticker));

  std::vector<double> stds(size_t(opt.dt_max));
  check(qwf_std_by_scale(series.get(), opt.dt_max, stds.data()));
  double alpha = 0.0;
  double alpha_stderr = 0.0;
  check(qwf_scaling_exponent(series.get(), opt.dt_max, &alpha, &alpha_stderr));

  {
    auto out = open_output(dir / "scaling.csv");
    out << "dt,std\n";
    for (int dt = 1; dt <= opt.dt_max; ++dt)
      out << dt << "," << fmt17(stds[size_t(dt) - 1]) << "\n";
  }
  json doc{{"ticker", ticker},
           {"input", input_provenance(opt.input, series.get())},
           {"config", json{{"dt-max", opt.dt_max}}},
           {"tool_version", qwf_version()},
           {"timestamp", utc_timestamp()},
           {"alpha", alpha},
           {"alpha_stderr", alpha_stderr},
           {"dt_range", json::array({1, opt.dt_max})},
           {"csv_file", "scaling.csv"}};
  write_json(dir / "scaling.json", doc);
  return 0;
}

struct FitOptions {
  std::string input;
  std::string ticker;
  int dt = 504;
  int classify_bins = 20;
  int base_bins = 20;
  int n = 100;
  bool no_ensemble = false;
  double n_mean = 100.0;
  double n_std = 15.0;
  int samples = 1000;
  std::uint64_t seed = 42;
  int grid = 8;
  int shift_range = 3;
  int bin_delta_range = 4;
  int max_iterations = 2000;
  int restarts = 4;
  int dt_max_scaling = 0;  // 0: skip the scaling block
  std::string output = ".";
};

void write_curve_csv(const std::filesystem::path& path, const std::vector<double>& centers,
                     const std::vector<double>& empirical, const std::vector<double>& fitted) {
  auto out = open_output(path);
  out << "bin_center,empirical,fitted\n";
  for (size_t i = 0; i < centers.size(); ++i)
    out << fmt17(centers[i]) << "," << fmt17(empirical[i]) << "," << fmt17(fitted[i]) << "\n";
}

int run_fit(const FitOptions& opt) {
  std::filesystem::create_directories(opt.output);
  const std::filesystem::path dir(opt.output);

  Series series{nullptr};
  {
    qwf_series_t* p = nullptr;
    check(qwf_series_load_csv(opt.input.c_str(), opt.ticker.empty() ? nullptr : opt.ticker.c_str(),
                              &p));
    series.reset(p);
  }
  const char* ticker = nullptr;
  check(qwf_series_ticker(series.get(), &ticker));

  Sample sample{nullptr};
  {
    qwf_sample_t* p = nullptr;
    check(qwf_log_returns(series.get(), opt.dt, &p));
    sample.reset(p);
  }
  size_t sample_size = 0;
  check(qwf_sample_count(sample.get(), &sample_size));

  // classification on the coarse histogram
  qwf_bimodality_report bim{};
  double skew = 0.0;
  {
    qwf_hist_t* hp = nullptr;
    check(qwf_histogram(sample.get(), opt.classify_bins, &hp));
    Hist hist(hp);
    check(qwf_bimodality(hist.get(), &bim));
    check(qwf_skewness(sample.get(), &skew));
  }

  // fixed-n hill climb
  qwf_fit_config cfg;
  qwf_fit_config_default(&cfg);
  cfg.base_bins = opt.base_bins;
  cfg.grid_points = opt.grid;
  cfg.shift_min = -opt.shift_range;
  cfg.shift_max = opt.shift_range;
  cfg.bin_delta_min = -opt.bin_delta_range;
  cfg.bin_delta_max = opt.bin_delta_range;
  cfg.max_iterations = opt.max_iterations;
  cfg.n_fixed = opt.n;

  Fit fixed_fit{nullptr};
  {
    qwf_fit_t* p = nullptr;
    check(qwf_hill_climb_fit(sample.get(), &cfg, &p));
    fixed_fit.reset(p);
  }

  Fit final_fit{nullptr};
  if (!opt.no_ensemble) {
    qwf_fit_t* p = nullptr;
    check(qwf_fit_refine_ensemble(fixed_fit.get(), sample.get(), opt.n_mean, opt.n_std,
                                  opt.samples, opt.seed, &p));
    final_fit.reset(p);
  }
  const qwf_fit_t* best = final_fit ? final_fit.get() : fixed_fit.get();

  double angles[4] = {};
  check(qwf_fit_params(best, angles));
  int shift = 0;
  int bin_delta = 0;
  double scale = 0.0;
  double initial_position = 0.0;
  check(qwf_fit_alignment(best, &shift, &bin_delta, &scale, &initial_position));
  double fit_mae = 0.0;
  double fit_ks = 0.0;
  check(qwf_fit_scores(best, &fit_mae, &fit_ks));
  double fixed_mae = 0.0;
  double fixed_ks = 0.0;
  check(qwf_fit_scores(fixed_fit.get(), &fixed_mae, &fixed_ks));
  int converged = 0;
  int iterations = 0;
  double final_step = 0.0;
  check(qwf_fit_flags(fixed_fit.get(), &converged, &iterations, &final_step));

  size_t curve_len = 0;
  check(qwf_fit_curve_count(best, &curve_len));
  std::vector<double> centers(curve_len);
  std::vector<double> empirical(curve_len);
  std::vector<double> fitted(curve_len);
  check(qwf_fit_curve(best, centers.data(), empirical.data(), fitted.data()));
  write_curve_csv(dir / "curve_qw.csv", centers, empirical, fitted);

  size_t trace_len = 0;
  check(qwf_fit_trace_count(fixed_fit.get(), &trace_len));
  std::vector<double> trace(trace_len);
  check(qwf_fit_trace(fixed_fit.get(), trace.data()));

  // baselines on the same final binning as the quantum walk fit
  const int baseline_bins = opt.base_bins + bin_delta;

  GFit gauss{nullptr};
  {
    qwf_gfit_t* p = nullptr;
    check(qwf_gaussian_fit(sample.get(), baseline_bins, &p));
    gauss.reset(p);
  }
  double g_mean = 0.0;
  double g_std = 0.0;
  double g_mae = 0.0;
  double g_ks = 0.0;
  check(qwf_gfit_params(gauss.get(), &g_mean, &g_std));
  check(qwf_gfit_scores(gauss.get(), &g_mae, &g_ks));
  json gauss_curve;
  {
    size_t len = 0;
    check(qwf_gfit_curve_count(gauss.get(), &len));
    std::vector<double> c(len);
    std::vector<double> e(len);
    std::vector<double> f(len);
    check(qwf_gfit_curve(gauss.get(), c.data(), e.data(), f.data()));
    write_curve_csv(dir / "curve_gaussian.csv", c, e, f);
    gauss_curve = json{{"centers", c}, {"empirical", e}, {"fitted", f}};
  }

  Gmm gmm{nullptr};
  {
    qwf_gmm_t* p = nullptr;
    check(qwf_gmm2_fit(sample.get(), baseline_bins, opt.seed, opt.restarts, &p));
    gmm.reset(p);
  }
  double weights[2] = {};
  double means[2] = {};
  double stdevs[2] = {};
  double m_mae = 0.0;
  double m_ks = 0.0;
  check(qwf_gmm_params(gmm.get(), weights, means, stdevs));
  check(qwf_gmm_scores(gmm.get(), &m_mae, &m_ks));
  size_t ll_len = 0;
  check(qwf_gmm_loglik_count(gmm.get(), &ll_len));
  std::vector<double> loglik(ll_len);
  check(qwf_gmm_loglik_trace(gmm.get(), loglik.data()));
  json gmm_curve;
  {
    size_t len = 0;
    check(qwf_gmm_curve_count(gmm.get(), &len));
    std::vector<double> c(len);
    std::vector<double> e(len);
    std::vector<double> f(len);
    check(qwf_gmm_curve(gmm.get(), c.data(), e.data(), f.data()));
    write_curve_csv(dir / "curve_gmm.csv", c, e, f);
    gmm_curve = json{{"centers", c}, {"empirical", e}, {"fitted", f}};
  }

  json config_echo{{"dt", opt.dt},
                   {"classify-bins", opt.classify_bins},
                   {"bins", opt.base_bins},
                   {"n", opt.n},
                   {"ensemble", !opt.no_ensemble},
                   {"n-mean", opt.n_mean},
                   {"n-std", opt.n_std},
                   {"samples", opt.samples},
                   {"seed", opt.seed},
                   {"grid", opt.grid},
                   {"shift-range", opt.shift_range},
                   {"bin-delta-range", opt.bin_delta_range},
                   {"max-iterations", opt.max_iterations},
                   {"restarts", opt.restarts}};

  json qw{{"eta", angles[0]},
          {"theta", angles[1]},
          {"phi", angles[2]},
          {"omega", angles[3]},
          {"alignment",
           json{{"shift", shift}, {"bin_delta", bin_delta}, {"scale", scale}, {"mu_drift", 0.0}}},
          {"initial_position", initial_position},
          {"fixed", json{{"n", opt.n}, {"mae", fixed_mae}, {"ks", fixed_ks}}},
          {"mae", fit_mae},
          {"ks", fit_ks},
          {"converged", converged != 0},
          {"iterations", iterations},
          {"final_step", final_step},
          {"mae_trace", trace},
          {"curve_file", "curve_qw.csv"},
          {"curve",
           json{{"centers", centers}, {"empirical", empirical}, {"fitted", fitted}}}};
  if (!opt.no_ensemble)
    qw["ensemble"] = json{{"n_mean", opt.n_mean},
                          {"n_std", opt.n_std},
                          {"samples", opt.samples},
                          {"seed", opt.seed},
                          {"mae", fit_mae},
                          {"ks", fit_ks}};

  json doc{{"ticker", ticker},
           {"input", input_provenance(opt.input, series.get())},
           {"config", config_echo},
           {"tool_version", qwf_version()},
           {"timestamp", utc_timestamp()},
           {"dt", opt.dt},
           {"sample_size", sample_size},
           {"classification", bim.mode_count >= 2 ? "bimodal" : "unimodal"},
           {"bimodality", bimodality_to_json(bim)},
           {"skewness", skew},
           {"quantum_walk", qw},
           {"gaussian",
            json{{"mean", g_mean}, {"std", g_std}, {"mae", g_mae}, {"ks", g_ks},
                 {"curve_file", "curve_gaussian.csv"}, {"curve", gauss_curve}}},
           {"gmm2", json{{"weights", json::array({weights[0], weights[1]})},
                         {"means", json::array({means[0], means[1]})},
                         {"stds", json::array({stdevs[0], stdevs[1]})},
                         {"mae", m_mae},
                         {"ks", m_ks},
                         {"em_iterations", ll_len},
                         {"log_likelihood", loglik},
                         {"curve_file", "curve_gmm.csv"},
                         {"curve", gmm_curve}}}};

  if (opt.dt_max_scaling > 0) {
    double alpha = 0.0;
    double alpha_stderr = 0.0;
    check(qwf_scaling_exponent(series.get(), opt.dt_max_scaling, &alpha, &alpha_stderr));
    doc["scaling"] = json{{"alpha", alpha},
                          {"alpha_stderr", alpha_stderr},
                          {"dt_range", json::array({1, opt.dt_max_scaling})}};
  }

  write_json(dir / "report.json", doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-walk models for long-horizon logarithmic return distributions"};
  app.require_subcommand(1);

  std::string config_path;

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a discrete-time quantum walk");
  simulate->add_option("--config", config_path, "JSON config file; flags override its values");
  simulate->add_option("--eta", sim.eta, "Coin angle eta (radians)");
  simulate->add_option("--theta", sim.theta, "Coin angle theta (radians, [0, pi/2])");
  simulate->add_option("--phi", sim.phi, "Initial-state angle phi (radians)");
  simulate->add_option("--omega", sim.omega, "Initial-state angle omega (radians, [-pi, pi])");
  simulate->add_option("--n", sim.n, "Number of time steps");
  simulate->add_flag("--ensemble", sim.ensemble, "Also emit the step-count ensemble average");
  simulate->add_option("--n-mean", sim.n_mean, "Ensemble: mean of the step-count law");
  simulate->add_option("--n-std", sim.n_std, "Ensemble: std of the step-count law");
  simulate->add_option("--samples", sim.samples, "Ensemble: number of sampled walks");
  simulate->add_option("--seed", sim.seed, "Ensemble seed");
  simulate->add_option("--output", sim.output, "Output directory");

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Return histograms, bimodality and skewness");
  stats_cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  stats_cmd->add_option("--input", stats.input, "Price CSV (date,open or vendor export)")
      ->required();
  stats_cmd->add_option("--ticker", stats.ticker, "Ticker label (default: file stem)");
  stats_cmd->add_option("--dt", stats.dts, "Time scale in trading days (repeatable)");
  stats_cmd->add_option("--bins", stats.bins, "Histogram bins");
  stats_cmd->add_option("--output", stats.output, "Output directory");

  ScalingOptions scaling;
  auto* scaling_cmd = app.add_subcommand("scaling", "Volatility scaling exponent");
  scaling_cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  scaling_cmd->add_option("--input", scaling.input, "Price CSV")->required();
  scaling_cmd->add_option("--ticker", scaling.ticker, "Ticker label (default: file stem)");
  scaling_cmd->add_option("--dt-max", scaling.dt_max, "Largest time scale (trading days)");
  scaling_cmd->add_option("--output", scaling.output, "Output directory");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Quantum walk, Gaussian and GMM fits of returns");
  fit_cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  fit_cmd->add_option("--input", fit.input, "Price CSV")->required();
  fit_cmd->add_option("--ticker", fit.ticker, "Ticker label (default: file stem)");
  fit_cmd->add_option("--dt", fit.dt, "Time scale in trading days");
  fit_cmd->add_option("--classify-bins", fit.classify_bins, "Bins for mode classification");
  fit_cmd->add_option("--bins", fit.base_bins, "Base bins of the fitted histogram");
  fit_cmd->add_option("--n", fit.n, "Walk steps for the fixed-n search");
  fit_cmd->add_flag("--no-ensemble", fit.no_ensemble, "Skip the ensemble refinement");
  fit_cmd->add_option("--n-mean", fit.n_mean, "Ensemble: mean of the step-count law");
  fit_cmd->add_option("--n-std", fit.n_std, "Ensemble: std of the step-count law");
  fit_cmd->add_option("--samples", fit.samples, "Ensemble: number of sampled walks");
  fit_cmd->add_option("--seed", fit.seed, "Seed for ensemble and GMM restarts");
  fit_cmd->add_option("--grid", fit.grid, "Coarse-grid points per angular axis");
  fit_cmd->add_option("--shift-range", fit.shift_range, "Shift hyperparameter range (+-bins)");
  fit_cmd->add_option("--bin-delta-range", fit.bin_delta_range, "Bin-count adjustment range");
  fit_cmd->add_option("--max-iterations", fit.max_iterations, "Hill-climb iteration cap");
  fit_cmd->add_option("--restarts", fit.restarts, "GMM EM restarts");
  fit_cmd->add_option("--dt-max", fit.dt_max_scaling,
                      "Also include the scaling exponent up to this dt");
  fit_cmd->add_option("--output", fit.output, "Output directory");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_file(args);
    std::vector<const char*> cargs{argv[0]};
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(int(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (stats_cmd->parsed()) return run_stats(stats);
    if (scaling_cmd->parsed()) return run_scaling(scaling);
    if (fit_cmd->parsed()) return run_fit(fit);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
