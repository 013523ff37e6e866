#include "fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "error.hpp"
#include "rng.hpp"

namespace qwfin::fit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::invalid_argument, "length mismatch");
  if (a.empty()) fail(ErrorCode::invalid_argument, "empty probability vectors");
}

// Inverse CDF of a discrete point-mass distribution: the first position whose
// cumulative probability reaches u. Equivariant under affine maps of the
// positions, so align() does not depend on the walk's coordinate convention.
double point_quantile(const qwalk::PositionDistribution& dist, double u) {
  double cum = 0.0;
  for (std::size_t i = 0; i < dist.positions.size(); ++i) {
    cum += dist.probabilities[i];
    if (cum >= u) return dist.positions[i];
  }
  return dist.positions.back();
}

}  // namespace

double mae(std::span<const double> p_emp, std::span<const double> p_fit) {
  check_lengths(p_emp, p_fit);
  double acc = 0.0;
  for (std::size_t i = 0; i < p_emp.size(); ++i) acc += std::abs(p_emp[i] - p_fit[i]);
  return acc / double(p_emp.size());
}

double ks_statistic(std::span<const double> p_emp, std::span<const double> p_fit) {
  check_lengths(p_emp, p_fit);
  double cum_e = 0.0;
  double cum_f = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < p_emp.size(); ++i) {
    cum_e += p_emp[i];
    cum_f += p_fit[i];
    worst = std::max(worst, std::abs(cum_e - cum_f));
  }
  return worst;
}

double objective_mae(const AlignedCurves& curves) {
  double acc = 0.0;
  for (std::size_t i = 0; i < curves.empirical.size(); ++i)
    acc += std::abs(curves.empirical[i] - curves.fitted[i]);
  return acc / double(curves.n_empirical_bins);
}

AlignedCurves align(const qwalk::PositionDistribution& walk,
                    const returns::ReturnHistogram& hist, int shift) {
  if (walk.kind == qwalk::DistKind::raw)
    fail(ErrorCode::invalid_argument, "align expects a smoothed or ensemble distribution");
  if (walk.positions.empty()) fail(ErrorCode::degenerate_data, "empty walk distribution");

  const int n_bins = hist.n_bins();
  const double width = hist.bin_width();
  const double e0 = hist.edges.front();

  const double h_lo = returns::histogram_quantile(hist, 0.025);
  const double h_hi = returns::histogram_quantile(hist, 0.975);
  const double w_lo = point_quantile(walk, 0.025);
  const double w_hi = point_quantile(walk, 0.975);

  double scale = 1.0;
  double offset = 0.0;
  if (w_hi > w_lo) {
    scale = (h_hi - h_lo) / (w_hi - w_lo);
    offset = 0.5 * (h_hi + h_lo) - scale * 0.5 * (w_hi + w_lo);
  }
  offset += shift * width;

  // extended bin index of every walk point; indices outside [0, n_bins) become
  // zero-padding bins
  std::vector<long> idx(walk.positions.size());
  long min_idx = std::numeric_limits<long>::max();
  long max_idx = std::numeric_limits<long>::min();
  bool any_inside = false;
  for (std::size_t i = 0; i < walk.positions.size(); ++i) {
    const double g = scale * walk.positions[i] + offset;
    long k = long(std::floor((g - e0) / width));
    // inside the histogram range the right-most bin is closed on both sides
    if (g >= e0 && g <= hist.edges.back()) {
      k = std::clamp(k, 0L, long(n_bins) - 1);
      any_inside = true;
    }
    idx[i] = k;
    min_idx = std::min(min_idx, k);
    max_idx = std::max(max_idx, k);
  }
  if (!any_inside) fail(ErrorCode::out_of_range, "alignment out of range");

  const long lo = std::min(0L, min_idx);
  const long hi = std::max(long(n_bins) - 1, max_idx);
  const std::size_t total = std::size_t(hi - lo + 1);

  AlignedCurves out;
  out.empirical.assign(total, 0.0);
  out.fitted.assign(total, 0.0);
  out.centers.resize(total);
  for (std::size_t i = 0; i < total; ++i) out.centers[i] = e0 + (double(lo + long(i)) + 0.5) * width;
  for (int b = 0; b < n_bins; ++b) out.empirical[std::size_t(b - lo)] = hist.probabilities[std::size_t(b)];
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.fitted[std::size_t(idx[i] - lo)] += walk.probabilities[i];

  for (auto* curve : {&out.empirical, &out.fitted}) {
    double sum = 0.0;
    for (double v : *curve) sum += v;
    if (!(sum > 0.0)) fail(ErrorCode::degenerate_data, "zero-mass curve");
    for (double& v : *curve) v /= sum;
  }

  out.realized.shift = shift;
  out.realized.scale = scale;
  out.n_empirical_bins = n_bins;
  out.offset = offset;
  out.initial_position = offset;
  return out;
}

AlignedCurves align(const qwalk::PositionDistribution& walk,
                    const returns::ReturnSample& sample, int base_bins,
                    const AlignmentConfig& cfg) {
  if (base_bins + cfg.bin_delta < 2)
    fail(ErrorCode::invalid_argument, "base_bins + bin_delta must be >= 2");
  AlignedCurves out = align(walk, returns::histogram(sample, base_bins + cfg.bin_delta), cfg.shift);
  out.realized.bin_delta = cfg.bin_delta;
  return out;
}

namespace {

struct Candidate {
  double eta = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double omega = 0.0;
  int shift = 0;
  int bin_delta = 0;
  double score = kInf;

  // deterministic ordering among equal-MAE candidates
  std::array<double, 7> key() const {
    return {score, theta, eta, omega, phi, double(shift), double(bin_delta)};
  }
  bool better_than(const Candidate& other) const { return key() < other.key(); }
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

class Objective {
 public:
  Objective(const returns::ReturnSample& sample, int base_bins, const NPolicy& policy,
            const SearchConfig& cfg)
      : policy_(policy) {
    for (int d = cfg.bin_delta_min; d <= cfg.bin_delta_max; ++d)
      hists_.emplace(d, returns::histogram(sample, base_bins + d));
  }

  const qwalk::PositionDistribution& curve(double eta, double theta, double phi, double omega) {
    const std::array<double, 4> key{eta, theta, phi, omega};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const qwalk::CoinParams coin(eta, theta);
    const qwalk::InitParams init(phi, omega);
    qwalk::PositionDistribution dist =
        policy_.ensemble
            ? qwalk::ensemble_distribution(init, coin, policy_.n_mean, policy_.n_std,
                                           policy_.samples, policy_.seed)
            : qwalk::smooth_aggregate(
                  qwalk::distribution(qwalk::evolve(init, coin, policy_.n_fixed)));
    return cache_.emplace(key, std::move(dist)).first->second;
  }

  double evaluate(Candidate& c) {
    const auto& dist = curve(c.eta, c.theta, c.phi, c.omega);
    try {
      const AlignedCurves aligned = align(dist, hists_.at(c.bin_delta), c.shift);
      c.score = objective_mae(aligned);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::out_of_range) throw;
      c.score = kInf;  // infeasible alignment
    }
    return c.score;
  }

  const returns::ReturnHistogram& hist(int bin_delta) const { return hists_.at(bin_delta); }

 private:
  NPolicy policy_;
  std::map<int, returns::ReturnHistogram> hists_;
  std::map<std::array<double, 4>, qwalk::PositionDistribution> cache_;
};

double wrap_angle(double v) {
  double r = std::fmod(v, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

}  // namespace

FitResult hill_climb_fit(const returns::ReturnSample& sample, int base_bins,
                         const NPolicy& policy, const SearchConfig& cfg) {
  if (cfg.grid_points < 2) fail(ErrorCode::invalid_argument, "grid_points must be >= 2");
  if (cfg.shift_min > cfg.shift_max || cfg.bin_delta_min > cfg.bin_delta_max)
    fail(ErrorCode::invalid_argument, "empty hyperparameter range");
  if (base_bins + cfg.bin_delta_min < 2)
    fail(ErrorCode::invalid_argument, "base_bins + bin_delta_min must be >= 2");
  if (cfg.max_iterations < 1 || !(cfg.angle_tolerance > 0.0))
    fail(ErrorCode::invalid_argument, "invalid search configuration");
  if (!policy.ensemble && policy.n_fixed < 0)
    fail(ErrorCode::invalid_argument, "n_fixed must be non-negative");

  Objective objective(sample, base_bins, policy, cfg);

  // stage 1: coarse scan; periodic axes spread grid_points over the period,
  // closed axes include both endpoints
  const int g = cfg.grid_points;
  const double eta_spacing = kTwoPi / g;
  const double theta_spacing = kHalfPi / (g - 1);
  const double phi_spacing = kTwoPi / g;
  const double omega_spacing = kTwoPi / (g - 1);

  Candidate best;
  for (int ie = 0; ie < g; ++ie) {
    for (int it = 0; it < g; ++it) {
      for (int ip = 0; ip < g; ++ip) {
        for (int io = 0; io < g; ++io) {
          Candidate c;
          c.eta = ie * eta_spacing;
          c.theta = it * theta_spacing;
          c.phi = ip * phi_spacing;
          c.omega = -std::numbers::pi + io * omega_spacing;
          for (int d = cfg.bin_delta_min; d <= cfg.bin_delta_max; ++d) {
            for (int s = cfg.shift_min; s <= cfg.shift_max; ++s) {
              c.shift = s;
              c.bin_delta = d;
              objective.evaluate(c);
              if (c.better_than(best)) best = c;
            }
          }
        }
      }
    }
  }
  if (best.score == kInf) fail(ErrorCode::numeric, "no feasible alignment found");

  // stage 2: steepest-ascent refinement
  std::array<double, 4> steps{eta_spacing / 2.0, theta_spacing / 2.0, phi_spacing / 2.0,
                              omega_spacing / 2.0};
  Candidate cur = best;
  std::vector<double> trace{cur.score};
  int iterations = 0;
  bool capped = false;

  auto max_step = [&steps] { return *std::max_element(steps.begin(), steps.end()); };

  while (max_step() >= cfg.angle_tolerance) {
    if (iterations >= cfg.max_iterations) {
      capped = true;
      break;
    }
    ++iterations;

    std::vector<Candidate> neighbors;
    for (int axis = 0; axis < 4; ++axis) {
      for (double dir : {+1.0, -1.0}) {
        Candidate c = cur;
        c.score = kInf;
        switch (axis) {
          case 0: c.eta = wrap_angle(cur.eta + dir * steps[0]); break;
          case 1: c.theta = std::clamp(cur.theta + dir * steps[1], 0.0, kHalfPi); break;
          case 2: c.phi = wrap_angle(cur.phi + dir * steps[2]); break;
          case 3:
            c.omega = std::clamp(cur.omega + dir * steps[3], -std::numbers::pi, std::numbers::pi);
            break;
        }
        if (c.eta == cur.eta && c.theta == cur.theta && c.phi == cur.phi && c.omega == cur.omega)
          continue;  // clamped onto the current point
        neighbors.push_back(c);
      }
    }
    for (int ds : {+1, -1}) {
      if (cur.shift + ds >= cfg.shift_min && cur.shift + ds <= cfg.shift_max) {
        Candidate c = cur;
        c.score = kInf;
        c.shift += ds;
        neighbors.push_back(c);
      }
      if (cur.bin_delta + ds >= cfg.bin_delta_min && cur.bin_delta + ds <= cfg.bin_delta_max) {
        Candidate c = cur;
        c.score = kInf;
        c.bin_delta += ds;
        neighbors.push_back(c);
      }
    }

    Candidate best_neighbor;
    for (Candidate& c : neighbors) {
      objective.evaluate(c);
      if (c.better_than(best_neighbor)) best_neighbor = c;
    }

    if (best_neighbor.score < cur.score) {
      cur = best_neighbor;
      trace.push_back(cur.score);
    } else {
      for (double& s : steps) s /= 2.0;
    }
  }

  const AlignedCurves aligned =
      align(objective.curve(cur.eta, cur.theta, cur.phi, cur.omega),
            objective.hist(cur.bin_delta), cur.shift);

  FitResult result;
  result.coin = qwalk::CoinParams(cur.eta, cur.theta);
  result.init = qwalk::InitParams(cur.phi, cur.omega);
  result.alignment = aligned.realized;
  result.alignment.bin_delta = cur.bin_delta;
  result.base_bins = base_bins;
  result.mae = cur.score;
  result.ks = ks_statistic(aligned.empirical, aligned.fitted);
  result.n_policy = policy;
  result.centers = aligned.centers;
  result.empirical_curve = aligned.empirical;
  result.fitted_curve = aligned.fitted;
  result.initial_position = aligned.initial_position;
  result.converged = !capped;
  result.iterations = iterations;
  result.final_step = max_step();
  result.mae_trace = std::move(trace);
  return result;
}

FitResult refine_with_ensemble(const FitResult& fit, const returns::ReturnSample& sample,
                               double n_mean, double n_std, int samples, std::uint64_t seed) {
  if (fit.n_policy.ensemble)
    fail(ErrorCode::invalid_argument, "refine_with_ensemble expects a fixed-n fit");

  const qwalk::PositionDistribution dist =
      qwalk::ensemble_distribution(fit.init, fit.coin, n_mean, n_std, samples, seed);
  AlignmentConfig cfg;
  cfg.shift = fit.alignment.shift;
  cfg.bin_delta = fit.alignment.bin_delta;
  const AlignedCurves aligned = align(dist, sample, fit.base_bins, cfg);

  FitResult out = fit;
  out.alignment = aligned.realized;
  out.mae = objective_mae(aligned);
  out.ks = ks_statistic(aligned.empirical, aligned.fitted);
  out.n_policy.ensemble = true;
  out.n_policy.n_mean = n_mean;
  out.n_policy.n_std = n_std;
  out.n_policy.samples = samples;
  out.n_policy.seed = seed;
  out.centers = aligned.centers;
  out.empirical_curve = aligned.empirical;
  out.fitted_curve = aligned.fitted;
  out.initial_position = aligned.initial_position;
  return out;
}

namespace {

double normal_cdf(double x, double mean, double stdev) {
  return 0.5 * std::erfc(-(x - mean) / (stdev * std::numbers::sqrt2));
}

struct BinnedDensityFit {
  std::vector<double> centers;
  std::vector<double> empirical;
  std::vector<double> fitted;
  double mae_score = 0.0;
  double ks_score = 0.0;
};

// Integrates cdf over each histogram bin and renormalizes on the binned
// support so both curves sum to 1.
template <typename Cdf>
BinnedDensityFit bin_density(const returns::ReturnHistogram& hist, Cdf&& cdf) {
  BinnedDensityFit out;
  const int n = hist.n_bins();
  out.centers.resize(std::size_t(n));
  out.fitted.resize(std::size_t(n));
  out.empirical = hist.probabilities;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    out.centers[std::size_t(i)] = hist.center(i);
    out.fitted[std::size_t(i)] = cdf(hist.edges[std::size_t(i) + 1]) - cdf(hist.edges[std::size_t(i)]);
    total += out.fitted[std::size_t(i)];
  }
  if (!(total > 0.0)) fail(ErrorCode::numeric, "fitted density vanishes on the binned support");
  for (double& v : out.fitted) v /= total;
  out.mae_score = mae(out.empirical, out.fitted);
  out.ks_score = ks_statistic(out.empirical, out.fitted);
  return out;
}

double population_mean(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / double(v.size());
}

double population_var(std::span<const double> v, double mean) {
  double m2 = 0.0;
  for (double x : v) m2 += (x - mean) * (x - mean);
  return m2 / double(v.size());
}

// type-7 quantile of a sorted copy
double sample_quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * double(sorted.size() - 1);
  const std::size_t lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

GaussianFitResult gaussian_fit(const returns::ReturnSample& sample, int n_bins) {
  const returns::ReturnHistogram hist = returns::histogram(sample, n_bins);
  const double mean = population_mean(sample.values);
  const double var = population_var(sample.values, mean);
  if (!(var > 0.0)) fail(ErrorCode::degenerate_data, "zero variance");

  GaussianFitResult result;
  result.mean = mean;
  result.stdev = std::sqrt(var);
  BinnedDensityFit binned =
      bin_density(hist, [&](double x) { return normal_cdf(x, result.mean, result.stdev); });
  result.centers = std::move(binned.centers);
  result.empirical_curve = std::move(binned.empirical);
  result.fitted_curve = std::move(binned.fitted);
  result.mae = binned.mae_score;
  result.ks = binned.ks_score;
  return result;
}

namespace {

struct GmmParams {
  std::array<double, 2> w{0.5, 0.5};
  std::array<double, 2> mu{0.0, 0.0};
  std::array<double, 2> sigma{1.0, 1.0};
};

struct EmRun {
  GmmParams params;
  std::vector<double> trace;
  double log_likelihood = -kInf;
  bool ok = false;
};

EmRun run_em(std::span<const double> x, GmmParams p, double collapse_floor) {
  EmRun run;
  const std::size_t n = x.size();
  std::vector<double> resp(n);
  double prev_ll = -kInf;

  for (int iter = 0; iter < 500; ++iter) {
    // E step with log-sum-exp
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 2> lp;
      for (int k = 0; k < 2; ++k) {
        const double z = (x[i] - p.mu[std::size_t(k)]) / p.sigma[std::size_t(k)];
        lp[std::size_t(k)] = std::log(p.w[std::size_t(k)]) - 0.5 * z * z -
                             std::log(p.sigma[std::size_t(k)]) -
                             0.5 * std::log(2.0 * std::numbers::pi);
      }
      const double m = std::max(lp[0], lp[1]);
      const double e0 = std::exp(lp[0] - m);
      const double e1 = std::exp(lp[1] - m);
      resp[i] = e0 / (e0 + e1);
      ll += m + std::log(e0 + e1);
    }
    run.trace.push_back(ll);
    run.log_likelihood = ll;
    if (iter > 0 && ll - prev_ll < 1e-8) break;
    prev_ll = ll;

    // M step
    double n0 = 0.0;
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      n0 += resp[i];
      s0 += resp[i] * x[i];
      s1 += (1.0 - resp[i]) * x[i];
    }
    const double n1 = double(n) - n0;
    if (n0 < 1e-9 || n1 < 1e-9) return run;  // weight collapsed
    p.mu = {s0 / n0, s1 / n1};
    double v0 = 0.0;
    double v1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v0 += resp[i] * (x[i] - p.mu[0]) * (x[i] - p.mu[0]);
      v1 += (1.0 - resp[i]) * (x[i] - p.mu[1]) * (x[i] - p.mu[1]);
    }
    p.sigma = {std::sqrt(v0 / n0), std::sqrt(v1 / n1)};
    p.w = {n0 / double(n), n1 / double(n)};
    if (p.sigma[0] < collapse_floor || p.sigma[1] < collapse_floor) return run;
  }

  run.params = p;
  run.ok = true;
  return run;
}

}  // namespace

Gmm2FitResult gmm2_fit(const returns::ReturnSample& sample, int n_bins, std::uint64_t seed,
                       int restarts) {
  if (sample.values.size() < 10)
    fail(ErrorCode::invalid_argument, "gmm2_fit needs at least 10 values");
  if (restarts < 0) fail(ErrorCode::invalid_argument, "restarts must be non-negative");
  const returns::ReturnHistogram hist = returns::histogram(sample, n_bins);

  const std::span<const double> x(sample.values);
  const double mean = population_mean(x);
  const double stdev = std::sqrt(population_var(x, mean));
  if (!(stdev > 0.0)) fail(ErrorCode::degenerate_data, "zero variance");
  const double collapse_floor = 1e-10 * stdev;

  std::vector<GmmParams> candidates;
  GmmParams base;
  base.mu = {sample_quantile(sample.values, 0.25), sample_quantile(sample.values, 0.75)};
  base.sigma = {stdev, stdev};
  candidates.push_back(base);
  for (int r = 0; r < restarts; ++r) {
    rng::Generator gen(rng::substream_seed(seed, std::uint64_t(r)));
    GmmParams p = base;
    for (auto& m : p.mu) m += 0.5 * stdev * gen.normal();
    for (auto& s : p.sigma) s *= std::exp(0.25 * gen.normal());
    const double w0 = 0.3 + 0.4 * gen.uniform();
    p.w = {w0, 1.0 - w0};
    candidates.push_back(p);
  }
  // moment-matched single-component candidate: an EM fixed point whose density
  // is exactly the plain Gaussian fit
  GmmParams degenerate;
  degenerate.mu = {mean, mean};
  degenerate.sigma = {stdev, stdev};
  candidates.push_back(degenerate);

  EmRun best;
  for (const GmmParams& p : candidates) {
    EmRun run = run_em(x, p, collapse_floor);
    if (run.ok && run.log_likelihood > best.log_likelihood) best = std::move(run);
  }
  if (!best.ok) fail(ErrorCode::numeric, "all EM restarts collapsed");

  Gmm2FitResult result;
  result.weights = best.params.w;
  result.means = best.params.mu;
  result.stdevs = best.params.sigma;
  result.iterations = int(best.trace.size());
  result.log_likelihood_trace = std::move(best.trace);

  BinnedDensityFit binned = bin_density(hist, [&](double v) {
    return result.weights[0] * normal_cdf(v, result.means[0], result.stdevs[0]) +
           result.weights[1] * normal_cdf(v, result.means[1], result.stdevs[1]);
  });
  result.centers = std::move(binned.centers);
  result.empirical_curve = std::move(binned.empirical);
  result.fitted_curve = std::move(binned.fitted);
  result.mae = binned.mae_score;
  result.ks = binned.ks_score;
  return result;
}

}  // namespace qwfin::fit
