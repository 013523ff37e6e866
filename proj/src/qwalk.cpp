#include "qwalk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "error.hpp"
#include "rng.hpp"

namespace qwfin::qwalk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kCoinUnitarityTol = 1e-10;
constexpr double kStateNormTol = 1e-9;

double wrap_two_pi(double v) {
  double r = std::fmod(v, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, std::string(name) + " must be finite");
}

}  // namespace

CoinParams::CoinParams(double eta_, double theta_) {
  require_finite(eta_, "eta");
  require_finite(theta_, "theta");
  if (theta_ < 0.0 || theta_ > kHalfPi)
    fail(ErrorCode::invalid_argument, "theta outside [0, pi/2]");
  eta = wrap_two_pi(eta_);
  theta = theta_;
}

InitParams::InitParams(double phi_, double omega_) {
  require_finite(phi_, "phi");
  require_finite(omega_, "omega");
  if (omega_ < -std::numbers::pi || omega_ > std::numbers::pi)
    fail(ErrorCode::invalid_argument, "omega outside [-pi, pi]");
  phi = wrap_two_pi(phi_);
  omega = omega_;
  const double c = std::cos(omega / 2.0);
  const double s = std::sin(omega / 2.0);
  if (std::abs(c * c + s * s - 1.0) > 1e-15)
    fail(ErrorCode::internal, "initial spinor is not unit norm");
}

CoinMatrix coin_matrix(const CoinParams& params) {
  const double c = std::cos(params.theta);
  const double s = std::sin(params.theta);
  return {std::polar(c, params.eta), Complex(s, 0.0),
          Complex(s, 0.0), -std::polar(c, -params.eta)};
}

double unitarity_deviation(const CoinMatrix& u) {
  // rows of U U^dagger
  const Complex d00 = u[0] * std::conj(u[0]) + u[1] * std::conj(u[1]) - 1.0;
  const Complex d01 = u[0] * std::conj(u[2]) + u[1] * std::conj(u[3]);
  const Complex d10 = u[2] * std::conj(u[0]) + u[3] * std::conj(u[1]);
  const Complex d11 = u[2] * std::conj(u[2]) + u[3] * std::conj(u[3]) - 1.0;
  return std::max({std::abs(d00), std::abs(d01), std::abs(d10), std::abs(d11)});
}

double WalkState::total_probability() const {
  double t = 0.0;
  for (const auto& a : up) t += std::norm(a);
  for (const auto& b : down) t += std::norm(b);
  return t;
}

WalkState initial_state(const InitParams& params) {
  WalkState state;
  state.n = 0;
  state.up = {Complex(std::cos(params.omega / 2.0), 0.0)};
  state.down = {std::polar(std::sin(params.omega / 2.0), params.phi)};
  return state;
}

WalkState step(const WalkState& state, const CoinMatrix& coin) {
  if (unitarity_deviation(coin) > kCoinUnitarityTol)
    fail(ErrorCode::invalid_argument, "coin matrix is not unitary");
  if (std::abs(state.total_probability() - 1.0) > kStateNormTol)
    fail(ErrorCode::invalid_argument, "walk state is not normalized");

  WalkState next;
  next.n = state.n + 1;
  next.up.assign(std::size_t(2 * next.n + 1), Complex(0.0, 0.0));
  next.down.assign(std::size_t(2 * next.n + 1), Complex(0.0, 0.0));
  for (int j = -state.n; j <= state.n; ++j) {
    const Complex a = state.up_at(j);
    const Complex b = state.down_at(j);
    if (a == Complex(0.0, 0.0) && b == Complex(0.0, 0.0)) continue;
    next.up[std::size_t(j + 1 + next.n)] += coin[0] * a + coin[1] * b;
    next.down[std::size_t(j - 1 + next.n)] += coin[2] * a + coin[3] * b;
  }
  return next;
}

WalkState evolve(const InitParams& init, const CoinParams& coin, int steps) {
  if (steps < 0) fail(ErrorCode::invalid_argument, "step count must be non-negative");
  const CoinMatrix u = coin_matrix(coin);
  WalkState state = initial_state(init);
  for (int i = 0; i < steps; ++i) state = step(state, u);
  return state;
}

double PositionDistribution::total() const {
  double t = 0.0;
  for (double p : probabilities) t += p;
  return t;
}

PositionDistribution distribution(const WalkState& state, bool drop_parity_zeros) {
  if (std::abs(state.total_probability() - 1.0) > kStateNormTol)
    fail(ErrorCode::invalid_argument, "walk state is not normalized");
  PositionDistribution dist;
  dist.kind = DistKind::raw;
  for (int j = -state.n; j <= state.n; ++j) {
    if (drop_parity_zeros && ((j + state.n) & 1)) continue;
    dist.positions.push_back(double(j));
    dist.probabilities.push_back(std::norm(state.up_at(j)) + std::norm(state.down_at(j)));
  }
  return dist;
}

PositionDistribution smooth_aggregate(const PositionDistribution& dist) {
  if (dist.kind != DistKind::raw)
    fail(ErrorCode::invalid_argument, "smooth_aggregate expects a raw distribution");
  std::vector<std::size_t> nz;
  for (std::size_t i = 0; i < dist.probabilities.size(); ++i)
    if (dist.probabilities[i] > 0.0) nz.push_back(i);
  if (nz.empty()) fail(ErrorCode::degenerate_data, "empty distribution");

  PositionDistribution out;
  out.kind = DistKind::smoothed;
  for (std::size_t g = 0; g < nz.size(); g += 3) {
    const std::size_t end = std::min(g + 3, nz.size());
    double psum = 0.0;
    double xdotp = 0.0;
    for (std::size_t k = g; k < end; ++k) {
      psum += dist.probabilities[nz[k]];
      xdotp += dist.positions[nz[k]] * dist.probabilities[nz[k]];
    }
    out.positions.push_back(xdotp / psum);
    out.probabilities.push_back(psum);
  }
  return out;
}

namespace {

constexpr int kEnsembleGridHalf = 100;  // 201 grid points over [-1, 1]

int draw_even_steps(double n_mean, double n_std, rng::Generator& gen) {
  // nearest even integer; draws below 2 are rejected rather than clamped so
  // the step-count law has no atom at 0
  if (n_std == 0.0) {
    const long long n = 2 * std::llround(n_mean / 2.0);
    if (n < 2) fail(ErrorCode::invalid_argument, "n_mean rounds to zero steps");
    return int(n);
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double x = gen.normal(n_mean, n_std);
    if (x >= 2.0) return int(2 * std::llround(x / 2.0));
  }
  fail(ErrorCode::invalid_argument, "n_mean too small: step-count draws never reach 2");
}

}  // namespace

PositionDistribution ensemble_distribution(const InitParams& init, const CoinParams& coin,
                                           double n_mean, double n_std, int samples,
                                           std::uint64_t seed) {
  if (samples < 1) fail(ErrorCode::invalid_argument, "samples must be >= 1");
  if (!(n_mean > 0.0)) fail(ErrorCode::invalid_argument, "n_mean must be positive");
  if (!(n_std >= 0.0)) fail(ErrorCode::invalid_argument, "n_std must be non-negative");

  std::map<int, int> counts;  // step count -> multiplicity
  if (n_std == 0.0) {
    rng::Generator gen(rng::substream_seed(seed, 0));
    counts[draw_even_steps(n_mean, 0.0, gen)] = samples;
  } else {
    for (int i = 0; i < samples; ++i) {
      rng::Generator gen(rng::substream_seed(seed, std::uint64_t(i)));
      ++counts[draw_even_steps(n_mean, n_std, gen)];
    }
  }

  if (counts.size() == 1) {
    PositionDistribution single =
        smooth_aggregate(distribution(evolve(init, coin, counts.begin()->first)));
    single.kind = DistKind::ensemble;
    return single;
  }

  std::array<double, 2 * kEnsembleGridHalf + 1> grid{};
  for (const auto& [n, count] : counts) {
    const PositionDistribution sm = smooth_aggregate(distribution(evolve(init, coin, n)));
    const double weight = double(count) / double(samples);
    for (std::size_t i = 0; i < sm.positions.size(); ++i) {
      long k = std::lround(sm.positions[i] / double(n) * kEnsembleGridHalf) + kEnsembleGridHalf;
      k = std::clamp(k, 0L, long(grid.size() - 1));
      grid[std::size_t(k)] += weight * sm.probabilities[i];
    }
  }

  PositionDistribution out;
  out.kind = DistKind::ensemble;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] == 0.0) continue;
    out.positions.push_back(double(long(k) - kEnsembleGridHalf) / kEnsembleGridHalf);
    out.probabilities.push_back(grid[k]);
  }
  return out;
}

}  // namespace qwfin::qwalk
