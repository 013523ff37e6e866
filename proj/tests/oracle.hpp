#pragma once

// Brute-force reference for walk distributions: enumerates all 2^n spin paths,
// multiplying coin entries along each path and accumulating the complex
// amplitude per (endpoint, spin). Kept independent of the production
// evolution code on purpose.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qwalk.hpp"

namespace testutil {

inline std::vector<double> path_sum_distribution(const qwfin::qwalk::InitParams& init,
                                                 const qwfin::qwalk::CoinParams& coin, int n) {
  using qwfin::qwalk::Complex;
  const qwfin::qwalk::CoinMatrix u = qwfin::qwalk::coin_matrix(coin);
  const std::array<Complex, 2> amp0{Complex(std::cos(init.omega / 2.0), 0.0),
                                    std::polar(std::sin(init.omega / 2.0), init.phi)};

  std::vector<std::array<Complex, 2>> acc(std::size_t(2 * n + 1),
                                          {Complex(0.0, 0.0), Complex(0.0, 0.0)});
  for (int s0 = 0; s0 < 2; ++s0) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
      Complex amp = amp0[std::size_t(s0)];
      int spin = s0;
      int pos = 0;
      for (int t = 0; t < n; ++t) {
        const int next = int((mask >> t) & 1);
        amp *= u[std::size_t(next * 2 + spin)];  // row = new spin, column = old
        pos += next == 0 ? 1 : -1;
        spin = next;
      }
      acc[std::size_t(pos + n)][std::size_t(spin)] += amp;
    }
  }

  std::vector<double> probs(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k)
    probs[k] = std::norm(acc[k][0]) + std::norm(acc[k][1]);
  return probs;
}

}  // namespace testutil
