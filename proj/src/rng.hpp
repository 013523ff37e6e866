#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qwfin::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the index-th independent sub-stream of a master seed. Results that
// average over sub-streams are then independent of evaluation order.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// mt19937_64 with explicit uniform/normal transforms. std::*_distribution is
// implementation-defined, which would break cross-platform reproducibility of
// seeded runs; the transforms below are pinned.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : engine_(seed) {}

  // [0, 1), 53-bit resolution
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller (cosine branch); two uniforms per call
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // ln(1-u1), 1-u1 in (0,1]
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qwfin::rng
