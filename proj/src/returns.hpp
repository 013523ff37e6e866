#pragma once

#include <span>
#include <string>
#include <vector>

namespace qwfin::returns {

struct Observation {
  std::string date;  // ISO-8601 YYYY-MM-DD
  double open = 0.0;
};

// Dated opening prices. Dates strictly increasing, prices strictly positive;
// consecutive rows are consecutive trading days (calendar gaps are not
// special-cased).
struct PriceSeries {
  std::string ticker;
  std::vector<Observation> observations;

  static PriceSeries from_observations(std::string ticker, std::vector<Observation> obs);
  std::size_t size() const { return observations.size(); }
};

// Accepts (a) a minimal `date,open` layout and (b) vendor exports whose header
// contains at least Date and Open columns (case-insensitive, other columns
// ignored). Rows with missing or non-positive opening prices are dropped.
PriceSeries load_price_csv(const std::string& path, const std::string& ticker_hint = "");

// Log-returns over a horizon of dt trading days; overlapping windows.
struct ReturnSample {
  int dt = 1;
  std::vector<double> values;
};

// values[t] = ln S(t+dt) - ln S(t) for every start index t.
ReturnSample log_returns(const PriceSeries& series, int dt);

struct ReturnHistogram {
  std::vector<double> edges;          // n_bins + 1, equal width, ascending
  std::vector<double> probabilities;  // counts / total

  int n_bins() const { return int(probabilities.size()); }
  double bin_width() const { return (edges.back() - edges.front()) / n_bins(); }
  double center(int i) const { return edges.front() + (i + 0.5) * bin_width(); }
};

// Equal-width bins spanning [min, max] of the values; the right-most bin is
// closed on both sides. Rejects degenerate samples (min == max).
ReturnHistogram histogram(std::span<const double> values, int n_bins);
ReturnHistogram histogram(const ReturnSample& sample, int n_bins);

struct Mode {
  int bin = 0;
  double probability = 0.0;
};

// Strict local maxima of the binned probabilities, ascending by bin. A plateau
// of equal adjacent bins counts as one mode at the plateau's center bin;
// boundary bins qualify when they exceed their single neighbor.
std::vector<Mode> detect_modes(const ReturnHistogram& hist);

// Piecewise-linear quantile of the binned distribution (linear interpolation
// of the CDF within bins).
double histogram_quantile(const ReturnHistogram& hist, double u);

// q(0.975) - q(0.025): span of the central 95% of probability.
double effective_range(const ReturnHistogram& hist);

struct BimodalityReport {
  double bm = 0.0;
  double p_max1 = 0.0;
  double p_max2 = 0.0;
  double p_min = 0.0;
  double delta_x = 0.0;
  double l_eff = 0.0;
  int mode_count = 0;
};

// BM = ((p_max2 - p_min) / p_max1) * (delta_x / l_eff)
double bimodality_measure(double p_max1, double p_max2, double p_min, double delta_x,
                          double l_eff);

// BM of a histogram: 0 unless two modes are present. With more than two modes
// the two highest-probability ones are used (ties broken toward larger
// separation); p_min is the minimum strictly between the mode bins, delta_x
// the distance between mode-bin centers.
BimodalityReport bimodality(const ReturnHistogram& hist);

// gamma_1 = m3 / m2^{3/2} from population moments about the mean.
double skewness(std::span<const double> values);
double skewness(const ReturnSample& sample);

// Population standard deviation of log_returns(series, dt) for dt = 1..dt_max.
std::vector<double> std_by_scale(const PriceSeries& series, int dt_max);

struct ScalingFit {
  double alpha = 0.0;
  double alpha_stderr = 0.0;
  int dt_min = 1;
  int dt_max = 1;
  std::vector<double> stds;  // per-dt standard deviations, dt = dt_min..dt_max
};

struct PowerLawFit {
  double exponent = 0.0;
  double exponent_stderr = 0.0;
};

// OLS of ln y against ln x; all entries must be positive.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

// Slope of ln std against ln dt over dt = 1..dt_max, with its standard error.
ScalingFit scaling_exponent(const PriceSeries& series, int dt_max);

}  // namespace qwfin::returns
