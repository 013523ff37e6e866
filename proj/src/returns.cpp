#include "returns.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "error.hpp"

namespace qwfin::returns {

namespace {

bool is_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::string file_stem(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name.resize(dot);
  return name;
}

}  // namespace

PriceSeries PriceSeries::from_observations(std::string ticker, std::vector<Observation> obs) {
  if (obs.empty()) fail(ErrorCode::insufficient_data, "price series is empty");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!is_iso_date(obs[i].date))
      fail(ErrorCode::parse, "invalid ISO-8601 date: '" + obs[i].date + "'");
    if (!(obs[i].open > 0.0) || !std::isfinite(obs[i].open))
      fail(ErrorCode::invalid_argument, "non-positive price at " + obs[i].date);
    if (i > 0 && !(obs[i - 1].date < obs[i].date))
      fail(ErrorCode::parse, "dates not strictly increasing at " + obs[i].date);
  }
  PriceSeries series;
  series.ticker = std::move(ticker);
  series.observations = std::move(obs);
  return series;
}

PriceSeries load_price_csv(const std::string& path, const std::string& ticker_hint) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");

  std::string line;
  std::size_t date_col = std::string::npos;
  std::size_t open_col = std::string::npos;
  std::size_t header_cols = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto header = split_csv_row(line);
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string name = lower(header[c]);
      if (name == "date" && date_col == std::string::npos) date_col = c;
      if (name == "open" && open_col == std::string::npos) open_col = c;
    }
    header_cols = header.size();
    break;
  }
  if (date_col == std::string::npos || open_col == std::string::npos)
    fail(ErrorCode::parse, "CSV header must contain Date and Open columns");

  std::vector<Observation> obs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != header_cols)
      fail(ErrorCode::parse, "malformed CSV row " + std::to_string(line_no) + " in '" + path + "'");
    const std::string& date = fields[date_col];
    if (!is_iso_date(date))
      fail(ErrorCode::parse, "invalid date '" + date + "' at row " + std::to_string(line_no));
    double open = 0.0;
    if (!parse_double(fields[open_col], open)) continue;  // missing/non-numeric: drop row
    if (!(open > 0.0) || !std::isfinite(open)) continue;
    obs.push_back({date, open});
  }
  if (obs.empty()) fail(ErrorCode::insufficient_data, "no usable rows in '" + path + "'");

  return PriceSeries::from_observations(ticker_hint.empty() ? file_stem(path) : ticker_hint,
                                        std::move(obs));
}

ReturnSample log_returns(const PriceSeries& series, int dt) {
  if (dt < 1) fail(ErrorCode::invalid_argument, "dt must be >= 1");
  const std::size_t len = series.size();
  if (std::size_t(dt) >= len) fail(ErrorCode::insufficient_data, "insufficient history");
  ReturnSample sample;
  sample.dt = dt;
  sample.values.reserve(len - std::size_t(dt));
  for (std::size_t t = 0; t + std::size_t(dt) < len; ++t)
    sample.values.push_back(std::log(series.observations[t + std::size_t(dt)].open) -
                            std::log(series.observations[t].open));
  return sample;
}

ReturnHistogram histogram(std::span<const double> values, int n_bins) {
  if (n_bins < 2) fail(ErrorCode::invalid_argument, "n_bins must be >= 2");
  if (values.empty()) fail(ErrorCode::invalid_argument, "empty sample");
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double mn = *mn_it;
  const double mx = *mx_it;
  if (!(mx > mn)) fail(ErrorCode::degenerate_data, "zero-width support");

  ReturnHistogram hist;
  const double width = (mx - mn) / n_bins;
  hist.edges.resize(std::size_t(n_bins) + 1);
  for (int k = 0; k <= n_bins; ++k) hist.edges[std::size_t(k)] = mn + width * k;
  hist.edges.back() = mx;

  std::vector<std::size_t> counts(std::size_t(n_bins), 0);
  for (double v : values) {
    int idx = v >= mx ? n_bins - 1 : int(std::floor((v - mn) / width));
    idx = std::clamp(idx, 0, n_bins - 1);
    ++counts[std::size_t(idx)];
  }
  hist.probabilities.resize(std::size_t(n_bins));
  for (int i = 0; i < n_bins; ++i)
    hist.probabilities[std::size_t(i)] = double(counts[std::size_t(i)]) / double(values.size());
  return hist;
}

ReturnHistogram histogram(const ReturnSample& sample, int n_bins) {
  return histogram(std::span<const double>(sample.values), n_bins);
}

std::vector<Mode> detect_modes(const ReturnHistogram& hist) {
  const auto& p = hist.probabilities;
  std::vector<Mode> modes;
  std::size_t i = 0;
  while (i < p.size()) {
    std::size_t j = i;
    while (j + 1 < p.size() && p[j + 1] == p[i]) ++j;  // run of equal bins
    const bool left_ok = i == 0 || p[i - 1] < p[i];
    const bool right_ok = j + 1 == p.size() || p[j + 1] < p[i];
    if (left_ok && right_ok) modes.push_back({int((i + j) / 2), p[i]});
    i = j + 1;
  }
  return modes;
}

double histogram_quantile(const ReturnHistogram& hist, double u) {
  u = std::clamp(u, 0.0, 1.0);
  double cum = 0.0;
  for (std::size_t i = 0; i < hist.probabilities.size(); ++i) {
    const double p = hist.probabilities[i];
    if (p > 0.0 && u <= cum + p)
      return hist.edges[i] + (u - cum) / p * (hist.edges[i + 1] - hist.edges[i]);
    cum += p;
  }
  return hist.edges.back();
}

double effective_range(const ReturnHistogram& hist) {
  return histogram_quantile(hist, 0.975) - histogram_quantile(hist, 0.025);
}

double bimodality_measure(double p_max1, double p_max2, double p_min, double delta_x,
                          double l_eff) {
  if (!(p_max1 > 0.0) || !(l_eff > 0.0)) return 0.0;
  return ((p_max2 - p_min) / p_max1) * (delta_x / l_eff);
}

BimodalityReport bimodality(const ReturnHistogram& hist) {
  BimodalityReport report;
  const auto modes = detect_modes(hist);
  report.mode_count = int(modes.size());
  report.l_eff = effective_range(hist);
  if (modes.size() < 2) {
    report.p_max1 = modes.empty() ? 0.0 : modes[0].probability;
    return report;
  }

  // pick the pair realizing the two highest mode probabilities; among ties,
  // the pair with the larger separation
  std::vector<double> probs;
  for (const auto& m : modes) probs.push_back(m.probability);
  std::sort(probs.begin(), probs.end(), std::greater<>());
  const double v1 = probs[0];
  const double v2 = probs[1];
  std::size_t best_a = 0;
  std::size_t best_b = 1;
  double best_sep = -1.0;
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = a + 1; b < modes.size(); ++b) {
      const double hi = std::max(modes[a].probability, modes[b].probability);
      const double lo = std::min(modes[a].probability, modes[b].probability);
      if (hi != v1 || lo != v2) continue;
      const double sep = std::abs(hist.center(modes[b].bin) - hist.center(modes[a].bin));
      if (sep > best_sep) {
        best_sep = sep;
        best_a = a;
        best_b = b;
      }
    }
  }

  const Mode& ma = modes[best_a];
  const Mode& mb = modes[best_b];
  report.p_max1 = std::max(ma.probability, mb.probability);
  report.p_max2 = std::min(ma.probability, mb.probability);
  report.delta_x = std::abs(hist.center(mb.bin) - hist.center(ma.bin));

  const int lo_bin = std::min(ma.bin, mb.bin);
  const int hi_bin = std::max(ma.bin, mb.bin);
  if (hi_bin - lo_bin <= 1) {
    report.p_min = report.p_max2;  // adjacent modes: no interior bin
  } else {
    double pmin = std::numeric_limits<double>::infinity();
    for (int b = lo_bin + 1; b < hi_bin; ++b)
      pmin = std::min(pmin, hist.probabilities[std::size_t(b)]);
    report.p_min = pmin;
  }
  report.bm = bimodality_measure(report.p_max1, report.p_max2, report.p_min, report.delta_x,
                                 report.l_eff);
  return report;
}

double skewness(std::span<const double> values) {
  if (values.size() < 3) fail(ErrorCode::invalid_argument, "skewness needs at least 3 values");
  const double n = double(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (!(m2 > 0.0)) fail(ErrorCode::degenerate_data, "zero variance");
  return m3 / std::pow(m2, 1.5);
}

double skewness(const ReturnSample& sample) {
  return skewness(std::span<const double>(sample.values));
}

std::vector<double> std_by_scale(const PriceSeries& series, int dt_max) {
  if (dt_max < 2) fail(ErrorCode::invalid_argument, "dt_max must be >= 2");
  if (series.size() <= std::size_t(dt_max)) fail(ErrorCode::insufficient_data, "insufficient history");
  std::vector<double> stds;
  stds.reserve(std::size_t(dt_max));
  for (int dt = 1; dt <= dt_max; ++dt) {
    const ReturnSample sample = log_returns(series, dt);
    const double n = double(sample.values.size());
    double mean = 0.0;
    for (double v : sample.values) mean += v;
    mean /= n;
    double m2 = 0.0;
    for (double v : sample.values) m2 += (v - mean) * (v - mean);
    stds.push_back(std::sqrt(m2 / n));
  }
  return stds;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::invalid_argument, "length mismatch");
  const std::size_t m = x.size();
  if (m < 2) fail(ErrorCode::invalid_argument, "need at least 2 points");
  std::vector<double> lx(m);
  std::vector<double> ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(x[i] > 0.0)) fail(ErrorCode::invalid_argument, "non-positive x in log-log fit");
    if (!(y[i] > 0.0)) fail(ErrorCode::degenerate_data, "zero variance");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(m);
  my /= double(m);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::invalid_argument, "degenerate x in log-log fit");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  if (m > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = ly[i] - (intercept + fit.exponent * lx[i]);
      ssr += r * r;
    }
    fit.exponent_stderr = std::sqrt(ssr / double(m - 2) / sxx);
  }
  return fit;
}

ScalingFit scaling_exponent(const PriceSeries& series, int dt_max) {
  ScalingFit fit;
  fit.dt_min = 1;
  fit.dt_max = dt_max;
  fit.stds = std_by_scale(series, dt_max);
  std::vector<double> dts(fit.stds.size());
  for (std::size_t i = 0; i < dts.size(); ++i) dts[i] = double(i + 1);
  const PowerLawFit pl = fit_power_law(dts, fit.stds);
  fit.alpha = pl.exponent;
  fit.alpha_stderr = pl.exponent_stderr;
  return fit;
}

}  // namespace qwfin::returns
