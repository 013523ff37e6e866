#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qwalk.hpp"
#include "returns.hpp"

namespace qwfin::fit {

// (1/N) sum |p_emp(i) - p_fit(i)|
double mae(std::span<const double> p_emp, std::span<const double> p_fit);

// max |CDF_emp(i) - CDF_fit(i)| over cumulative sums of the shared binning
double ks_statistic(std::span<const double> p_emp, std::span<const double> p_fit);

// Alignment hyperparameters: shift moves the fitted curve by whole bins,
// bin_delta adjusts the empirical bin count. scale is derived (never searched)
// by stretching the walk's effective range to the histogram's, and drift is
// fixed at zero: horizontal placement is delegated entirely to shift.
struct AlignmentConfig {
  int shift = 0;
  int bin_delta = 0;
  double scale = 1.0;  // realized value, recorded by align
  double mu_drift = 0.0;
};

struct AlignedCurves {
  std::vector<double> centers;    // shared binning, return units
  std::vector<double> empirical;  // zero-padded, renormalized
  std::vector<double> fitted;
  AlignmentConfig realized;
  int n_empirical_bins = 0;       // histogram bins before zero padding
  double offset = 0.0;            // additive part of the walk -> return map
  double initial_position = 0.0;  // image of walk coordinate 0
};

// Fit objective: the padded absolute-error sum divided by the empirical bin
// count. Keeping the denominator at the histogram's bin count means fitted
// mass escaping the histogram support always worsens the score; dividing by
// the padded length instead would let spiky walk curves shrink their MAE by
// inflating the support with zero-padding bins.
double objective_mae(const AlignedCurves& curves);

// Maps walk coordinates to return units via g = scale * x + offset where scale
// matches effective ranges and offset matches their centers plus shift whole
// bins, re-bins the walk mass onto the histogram edges (support extended with
// zero-padding bins where needed) and renormalizes both curves. Walk
// distributions with zero effective range map with scale 1 about coordinate 0.
AlignedCurves align(const qwalk::PositionDistribution& walk,
                    const returns::ReturnHistogram& hist, int shift);
AlignedCurves align(const qwalk::PositionDistribution& walk,
                    const returns::ReturnSample& sample, int base_bins,
                    const AlignmentConfig& cfg);

// Step-count policy of the fitted curve.
struct NPolicy {
  bool ensemble = false;
  int n_fixed = 100;
  double n_mean = 100.0;
  double n_std = 15.0;
  int samples = 1000;
  std::uint64_t seed = 42;
};

struct SearchConfig {
  int grid_points = 8;  // stage-1 points per angular axis
  int shift_min = -3;
  int shift_max = 3;
  int bin_delta_min = -4;
  int bin_delta_max = 4;
  int max_iterations = 2000;
  double angle_tolerance = 1e-4;  // radians
};

struct FitResult {
  qwalk::CoinParams coin;
  qwalk::InitParams init;
  AlignmentConfig alignment;
  int base_bins = 20;
  double mae = 0.0;  // objective_mae of the aligned curves
  double ks = 0.0;
  NPolicy n_policy;
  std::vector<double> centers;
  std::vector<double> empirical_curve;
  std::vector<double> fitted_curve;
  double initial_position = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_step = 0.0;          // largest angular step at termination
  std::vector<double> mae_trace;    // non-increasing
};

// Stage 1: coarse grid over (eta, theta, phi, omega) crossed with the
// (shift, bin_delta) hyperparameter grid; lowest MAE seeds stage 2.
// Stage 2: steepest-ascent hill climbing; all axis-aligned neighbors are
// evaluated (angles at the current step size, shift/bin_delta at +-1), the
// best strictly-improving one is taken, angular steps are halved on
// stagnation, and the search stops once every angular step is below
// angle_tolerance. Equal-MAE candidates are ordered lexicographically on
// (theta, eta, omega, phi, shift, bin_delta). Hitting max_iterations flags
// the result as non-converged; it is still returned.
FitResult hill_climb_fit(const returns::ReturnSample& sample, int base_bins,
                         const NPolicy& policy, const SearchConfig& cfg);

// Keeps the fitted angles and alignment hyperparameters, replaces the curve
// with an ensemble-averaged one and recomputes MAE/KS. The input fit must come
// from a fixed-n search; n_std = 0 with n_mean equal to the fixed n reproduces
// its scores bit-exactly.
FitResult refine_with_ensemble(const FitResult& fit, const returns::ReturnSample& sample,
                               double n_mean, double n_std, int samples, std::uint64_t seed);

struct GaussianFitResult {
  double mean = 0.0;
  double stdev = 0.0;
  double mae = 0.0;
  double ks = 0.0;
  std::vector<double> centers;
  std::vector<double> empirical_curve;
  std::vector<double> fitted_curve;
};

// Method-of-moments Gaussian, integrated over each histogram bin and
// renormalized on the binned support.
GaussianFitResult gaussian_fit(const returns::ReturnSample& sample, int n_bins);

struct Gmm2FitResult {
  std::array<double, 2> weights{};
  std::array<double, 2> means{};
  std::array<double, 2> stdevs{};
  double mae = 0.0;
  double ks = 0.0;
  int iterations = 0;
  std::vector<double> log_likelihood_trace;  // non-decreasing
  std::vector<double> centers;
  std::vector<double> empirical_curve;
  std::vector<double> fitted_curve;
};

// Two-component 1-D Gaussian mixture by EM on the raw sample. Initialization
// from the 25th/75th percentiles with pooled std and equal weights, plus
// `restarts` seeded perturbed restarts and a moment-matched single-component
// candidate (an EM fixed point, so the mixture never scores worse than the
// plain Gaussian). Best restart by log-likelihood; collapsed components abort
// a restart, and all restarts collapsing is an error.
Gmm2FitResult gmm2_fit(const returns::ReturnSample& sample, int n_bins, std::uint64_t seed,
                       int restarts = 4);

}  // namespace qwfin::fit
