#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace qwfin::qwalk {

using Complex = std::complex<double>;

// Row-major 2x2 coin matrix {U00, U01, U10, U11}.
using CoinMatrix = std::array<Complex, 4>;

// Coin angles. eta is reduced modulo 2*pi on construction; theta outside
// [0, pi/2] is rejected.
struct CoinParams {
  double eta = 0.0;
  double theta = 0.0;
  CoinParams() = default;
  CoinParams(double eta_, double theta_);
};

// Bloch angles of the starting spinor. phi is reduced modulo 2*pi; omega
// outside [-pi, pi] is rejected.
struct InitParams {
  double phi = 0.0;
  double omega = 0.0;
  InitParams() = default;
  InitParams(double phi_, double omega_);
};

// U = [[e^{i eta} cos(theta), sin(theta)], [sin(theta), -e^{-i eta} cos(theta)]]
CoinMatrix coin_matrix(const CoinParams& params);

// max-norm of U U^dagger - I
double unitarity_deviation(const CoinMatrix& coin);

// Spin-up/down amplitudes over positions j in [-n, n]; index(j) = j + n.
// Sites with odd (j + n) carry exactly zero amplitude.
struct WalkState {
  int n = 0;
  std::vector<Complex> up;
  std::vector<Complex> down;

  const Complex& up_at(int j) const { return up[std::size_t(j + n)]; }
  const Complex& down_at(int j) const { return down[std::size_t(j + n)]; }
  double total_probability() const;
};

// All amplitude at j = 0: a_0 = cos(omega/2), b_0 = e^{i phi} sin(omega/2).
WalkState initial_state(const InitParams& params);

// One update: the coin mixes (a_j, b_j), then the up component shifts to j+1
// and the down component to j-1. Rejects non-unitary coins (deviation > 1e-10)
// and non-normalized states.
WalkState step(const WalkState& state, const CoinMatrix& coin);

// step applied `steps` times to initial_state(init).
WalkState evolve(const InitParams& init, const CoinParams& coin, int steps);

enum class DistKind { raw, smoothed, ensemble };

struct PositionDistribution {
  std::vector<double> positions;      // strictly increasing
  std::vector<double> probabilities;  // non-negative, sums to 1
  DistKind kind = DistKind::raw;
  double total() const;
};

// Occupation probabilities |a_j|^2 + |b_j|^2. drop_parity_zeros selects
// whether the exactly-zero sites at odd (j + n) are omitted (default) or kept;
// this is the only knob, even-parity sites are always retained.
PositionDistribution distribution(const WalkState& state, bool drop_parity_zeros = true);

// Aggregates consecutive triples of non-zero-probability sites, left to right,
// into single points: probability = triple sum, coordinate = probability-
// weighted mean position. A trailing group of 1-2 sites is aggregated the same
// way. Total probability is preserved.
PositionDistribution smooth_aggregate(const PositionDistribution& dist);

// Equal-weight average over `samples` walks whose step counts are drawn from
// N(n_mean, n_std^2) and rounded to the nearest even integer; draws below 2
// are rejected and redrawn. Each draw uses an independent sub-stream of
// `seed`, so the result is reproducible and order-independent. Distinct step
// counts are evolved once, smoothed, rescaled to [-1, 1] via position/n and
// accumulated on a fixed 201-point grid. When every draw yields the same n the
// smoothed distribution is returned unchanged (only the kind differs), which
// makes the n_std = 0 case bit-identical to the fixed-n path.
PositionDistribution ensemble_distribution(const InitParams& init, const CoinParams& coin,
                                           double n_mean, double n_std, int samples,
                                           std::uint64_t seed);

}  // namespace qwfin::qwalk
