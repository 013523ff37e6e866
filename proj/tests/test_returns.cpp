#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <optional>

#include "error.hpp"
#include "returns.hpp"
#include "synth.hpp"

using namespace qwfin;
using namespace qwfin::returns;

namespace {

template <typename Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

ReturnSample sample_of(std::vector<double> values) {
  ReturnSample s;
  s.dt = 1;
  s.values = std::move(values);
  return s;
}

ReturnHistogram make_hist(std::vector<double> edges, std::vector<double> probs) {
  ReturnHistogram h;
  h.edges = std::move(edges);
  h.probabilities = std::move(probs);
  return h;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("qwfin_returns_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("log returns") {
  SUBCASE("ln e - ln 1") {
    const PriceSeries s = testutil::series_from_prices({1.0, std::exp(1.0)});
    const ReturnSample r = log_returns(s, 1);
    REQUIRE(r.values.size() == 1);
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("constant prices give zero returns") {
    const PriceSeries s = testutil::series_from_prices(std::vector<double>(40, 55.5));
    for (double v : log_returns(s, 7).values) CHECK(v == 0.0);
  }
  SUBCASE("window counting") {
    const PriceSeries s = testutil::series_from_prices(testutil::gbm_prices(756, 0.01, 3));
    CHECK(log_returns(s, 504).values.size() == 252);
  }
  SUBCASE("insufficient history") {
    const PriceSeries s = testutil::series_from_prices(testutil::gbm_prices(100, 0.01, 3));
    CHECK(error_code_of([&] { log_returns(s, 100); }) == ErrorCode::insufficient_data);
    CHECK(error_code_of([&] { log_returns(s, 0); }) == ErrorCode::invalid_argument);
  }
  SUBCASE("returns are additive across horizons") {
    const PriceSeries s = testutil::series_from_prices(testutil::gbm_prices(300, 0.02, 9));
    const ReturnSample g1 = log_returns(s, 5);
    const ReturnSample g2 = log_returns(s, 10);
    for (std::size_t t = 0; t < g2.values.size(); ++t)
      CHECK(std::abs(g2.values[t] - (g1.values[t] + g1.values[t + 5])) < 1e-12);
  }
}

TEST_CASE("price series validation") {
  CHECK(error_code_of([] {
          PriceSeries::from_observations("X", {{"2020-01-01", 1.0}, {"2020-01-01", 2.0}});
        }) == ErrorCode::parse);
  CHECK(error_code_of([] {
          PriceSeries::from_observations("X", {{"2020-01-02", 1.0}, {"2020-01-01", 2.0}});
        }) == ErrorCode::parse);
  CHECK(error_code_of([] { PriceSeries::from_observations("X", {{"2020-01-01", -3.0}}); }) ==
        ErrorCode::invalid_argument);
  CHECK(error_code_of([] { PriceSeries::from_observations("X", {{"01/02/2020", 3.0}}); }) ==
        ErrorCode::parse);
  CHECK(error_code_of([] { PriceSeries::from_observations("X", {}); }) ==
        ErrorCode::insufficient_data);
}

TEST_CASE("CSV ingestion") {
  TempDir tmp;
  SUBCASE("minimal layout") {
    const auto p = tmp.path / "mini.csv";
    write_file(p, "date,open\n2020-01-01,10\n2020-01-02,11\n2020-01-03,12\n");
    const PriceSeries s = load_price_csv(p.string());
    CHECK(s.ticker == "mini");
    REQUIRE(s.size() == 3);
    CHECK(s.observations[2].open == 12.0);
  }
  SUBCASE("vendor layout with extra columns and dropped rows") {
    const auto p = tmp.path / "vendor.csv";
    write_file(p,
               "Date,Open,High,Low,Close,Adj Close,Volume\n"
               "2020-01-01,10,11,9,10.5,10.5,100\n"
               "2020-01-02,null,11,9,10.5,10.5,100\n"
               "2020-01-03,,11,9,10.5,10.5,100\n"
               "2020-01-06,-4,11,9,10.5,10.5,100\n"
               "2020-01-07,12,13,11,12.5,12.5,100\n");
    const PriceSeries s = load_price_csv(p.string(), "VND");
    CHECK(s.ticker == "VND");
    REQUIRE(s.size() == 2);
    CHECK(s.observations[0].date == "2020-01-01");
    CHECK(s.observations[1].open == 12.0);
  }
  SUBCASE("missing Open column") {
    const auto p = tmp.path / "noopen.csv";
    write_file(p, "Date,Close\n2020-01-01,10\n");
    CHECK(error_code_of([&] { load_price_csv(p.string()); }) == ErrorCode::parse);
  }
  SUBCASE("ragged row") {
    const auto p = tmp.path / "ragged.csv";
    write_file(p, "date,open\n2020-01-01,10\n2020-01-02\n");
    CHECK(error_code_of([&] { load_price_csv(p.string()); }) == ErrorCode::parse);
  }
  SUBCASE("missing file") {
    CHECK(error_code_of([&] { load_price_csv((tmp.path / "nope.csv").string()); }) ==
          ErrorCode::io);
  }
}

TEST_CASE("histogram") {
  SUBCASE("two values, two bins") {
    const ReturnHistogram h = histogram(sample_of({0.0, 1.0}), 2);
    CHECK(h.probabilities[0] == 0.5);
    CHECK(h.probabilities[1] == 0.5);
    CHECK(h.probabilities[0] + h.probabilities[1] == 1.0);
    CHECK(h.edges[0] == 0.0);
    CHECK(h.edges[2] == 1.0);
  }
  SUBCASE("right-most bin is closed") {
    const ReturnHistogram h = histogram(sample_of({0.0, 0.4, 1.0}), 2);
    CHECK(h.probabilities[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(h.probabilities[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("equal-width edges") {
    const ReturnHistogram h = histogram(sample_of({-1.0, 0.3, 0.7, 2.0, 5.0}), 7);
    const double w = h.bin_width();
    for (std::size_t i = 1; i < h.edges.size(); ++i)
      CHECK(std::abs((h.edges[i] - h.edges[i - 1]) - w) < 1e-12 * std::abs(w));
  }
  SUBCASE("degenerate and invalid inputs") {
    CHECK(error_code_of([] { histogram(sample_of({2.0, 2.0, 2.0}), 4); }) ==
          ErrorCode::degenerate_data);
    CHECK(error_code_of([] { histogram(sample_of({0.0, 1.0}), 1); }) ==
          ErrorCode::invalid_argument);
    CHECK(error_code_of([] { histogram(sample_of({}), 4); }) == ErrorCode::invalid_argument);
  }
}

TEST_CASE("mode detection") {
  SUBCASE("monotone decreasing has one boundary mode") {
    const auto modes = detect_modes(make_hist({0, 1, 2, 3}, {0.5, 0.3, 0.2}));
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].bin == 0);
  }
  SUBCASE("two local maxima") {
    const auto modes = detect_modes(make_hist({0, 1, 2, 3}, {0.4, 0.1, 0.5}));
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].bin == 0);
    CHECK(modes[1].bin == 2);
  }
  SUBCASE("a flat histogram is a single plateau mode") {
    const auto modes = detect_modes(make_hist({0, 1, 2, 3, 4}, {0.25, 0.25, 0.25, 0.25}));
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].bin == 1);
  }
  SUBCASE("interior plateau sits at its center bin") {
    const auto modes = detect_modes(make_hist({0, 1, 2, 3, 4}, {0.1, 0.35, 0.35, 0.2}));
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].bin == 1);
    CHECK(modes[0].probability == 0.35);
  }
  SUBCASE("invariant under affine edge rescaling") {
    const auto a = detect_modes(make_hist({0, 1, 2, 3}, {0.4, 0.1, 0.5}));
    const auto b = detect_modes(make_hist({-7, -3, 1, 5}, {0.4, 0.1, 0.5}));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].bin == b[i].bin);
  }
}

TEST_CASE("quantiles and effective range") {
  SUBCASE("uniform histogram over [0, 1]") {
    const ReturnHistogram h =
        make_hist({0.0, 0.25, 0.5, 0.75, 1.0}, {0.25, 0.25, 0.25, 0.25});
    CHECK(std::abs(effective_range(h) - 0.95) < 1e-12);
  }
  SUBCASE("two equal-mass unit bins") {
    const ReturnHistogram h = make_hist({0.0, 1.0, 2.0}, {0.5, 0.5});
    CHECK(std::abs(effective_range(h) - 1.9) < 1e-12);
  }
  SUBCASE("single bin") {
    const ReturnHistogram h = make_hist({2.0, 6.0}, {1.0});
    CHECK(std::abs(effective_range(h) - 0.95 * 4.0) < 1e-12);
  }
  SUBCASE("zero-probability bins are skipped") {
    const ReturnHistogram h = make_hist({0.0, 1.0, 2.0, 3.0}, {0.5, 0.0, 0.5});
    CHECK(histogram_quantile(h, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(histogram_quantile(h, 0.6) == doctest::Approx(2.2).epsilon(1e-12));
  }
  SUBCASE("quantile function is monotone") {
    const ReturnHistogram h =
        make_hist({-2, -1, 0, 1, 2, 3}, {0.15, 0.3, 0.0, 0.35, 0.2});
    double prev = histogram_quantile(h, 0.0);
    for (int k = 1; k <= 100; ++k) {
      const double q = histogram_quantile(h, k / 100.0);
      CHECK(q >= prev);
      prev = q;
    }
    CHECK(histogram_quantile(h, 0.0) == -2.0);
    CHECK(histogram_quantile(h, 1.0) == 3.0);
  }
}

TEST_CASE("bimodality") {
  SUBCASE("unimodal histograms score zero") {
    const BimodalityReport r = bimodality(make_hist({0, 1, 2, 3}, {0.2, 0.5, 0.3}));
    CHECK(r.bm == 0.0);
    CHECK(r.mode_count == 1);
    CHECK(r.p_max1 == 0.5);
  }
  SUBCASE("hand-evaluated two-mode case") {
    const ReturnHistogram h = make_hist({0, 1, 2, 3}, {0.4, 0.1, 0.5});
    const BimodalityReport r = bimodality(h);
    CHECK(r.mode_count == 2);
    CHECK(r.p_max1 == 0.5);
    CHECK(r.p_max2 == 0.4);
    CHECK(r.p_min == 0.1);
    CHECK(r.delta_x == doctest::Approx(2.0).epsilon(1e-15));
    const double l_eff = 2.95 - 0.0625;  // piecewise-linear CDF by hand
    CHECK(r.l_eff == doctest::Approx(l_eff).epsilon(1e-12));
    CHECK(r.bm == doctest::Approx((0.3 / 0.5) * (2.0 / l_eff)).epsilon(1e-12));
  }
  SUBCASE("direct substitution: equal peaks a full effective range apart") {
    CHECK(bimodality_measure(0.5, 0.5, 0.0, 1.7, 1.7) == 1.0);
  }
  SUBCASE("a rising slope is a single mode") {
    const BimodalityReport r = bimodality(make_hist({0, 1, 2, 3, 4}, {0.1, 0.4, 0.45, 0.05}));
    CHECK(r.mode_count == 1);
  }
  SUBCASE("invariant under affine rescaling of the return axis") {
    const ReturnHistogram h = make_hist({0, 1, 2, 3, 4, 5}, {0.3, 0.05, 0.1, 0.35, 0.2});
    ReturnHistogram scaled = h;
    for (double& e : scaled.edges) e = 0.013 * e - 4.5;
    const BimodalityReport a = bimodality(h);
    const BimodalityReport b = bimodality(scaled);
    CHECK(a.mode_count == b.mode_count);
    CHECK(std::abs(a.bm - b.bm) < 1e-12);
  }
  SUBCASE("more than two modes uses the two tallest") {
    const ReturnHistogram h =
        make_hist({0, 1, 2, 3, 4, 5, 6, 7}, {0.3, 0.05, 0.2, 0.05, 0.35, 0.04, 0.01});
    const BimodalityReport r = bimodality(h);
    CHECK(r.mode_count == 3);
    CHECK(r.p_max1 == 0.35);
    CHECK(r.p_max2 == 0.3);
    CHECK(r.delta_x == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(r.p_min == 0.05);
  }
}

TEST_CASE("skewness") {
  SUBCASE("symmetric samples") { CHECK(std::abs(skewness(sample_of({-1.0, 0.0, 1.0}))) < 1e-14); }
  SUBCASE("hand-computed value") {
    CHECK(skewness(sample_of({0.0, 0.0, 1.0})) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("negation flips the sign exactly") {
    const double g = skewness(sample_of({0.1, 0.4, 0.45, 0.9, 2.0}));
    CHECK(skewness(sample_of({-0.1, -0.4, -0.45, -0.9, -2.0})) == -g);
  }
  SUBCASE("invariant under positive affine maps") {
    const std::vector<double> base{0.1, 0.4, 0.45, 0.9, 2.0};
    std::vector<double> mapped;
    for (double v : base) mapped.push_back(3.7 * v - 11.0);
    CHECK(std::abs(skewness(sample_of(mapped)) - skewness(sample_of(base))) < 1e-12);
  }
  SUBCASE("errors") {
    CHECK(error_code_of([] { skewness(sample_of({1.0, 1.0, 1.0})); }) ==
          ErrorCode::degenerate_data);
    CHECK(error_code_of([] { skewness(sample_of({1.0, 2.0})); }) == ErrorCode::invalid_argument);
  }
}

TEST_CASE("scaling") {
  SUBCASE("exact power law recovers its exponent") {
    std::vector<double> dts;
    std::vector<double> stds;
    for (int dt = 1; dt <= 504; ++dt) {
      dts.push_back(double(dt));
      stds.push_back(0.02 * std::sqrt(double(dt)));
    }
    const PowerLawFit fit = fit_power_law(dts, stds);
    CHECK(std::abs(fit.exponent - 0.5) < 1e-12);
    CHECK(fit.exponent_stderr < 1e-10);
  }
  SUBCASE("seeded diffusive path scales like sqrt(dt)") {
    const PriceSeries s = testutil::series_from_prices(testutil::gbm_prices(20000, 0.01, 17));
    const ScalingFit fit = scaling_exponent(s, 100);
    CHECK(fit.stds.size() == 100);
    CHECK(fit.alpha == doctest::Approx(0.5).epsilon(0.1));
    CHECK(fit.alpha_stderr >= 0.0);
  }
  SUBCASE("constant prices fail downstream") {
    const PriceSeries s = testutil::series_from_prices(std::vector<double>(50, 3.0));
    CHECK(error_code_of([&] { scaling_exponent(s, 10); }) == ErrorCode::degenerate_data);
  }
  SUBCASE("std_by_scale needs history beyond dt_max") {
    const PriceSeries s = testutil::series_from_prices(testutil::gbm_prices(50, 0.01, 1));
    CHECK(error_code_of([&] { std_by_scale(s, 50); }) == ErrorCode::insufficient_data);
    CHECK(error_code_of([&] { std_by_scale(s, 1); }) == ErrorCode::invalid_argument);
  }
}
