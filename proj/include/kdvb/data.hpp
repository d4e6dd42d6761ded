#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "kdvb/grid.hpp"
#include "kdvb/norms.hpp"

namespace kdvb {

/// Real field with Gaussian coefficients on 0 < |k| <= kmax, scaled to the given L^2 norm.
inline SpectralField smooth_random(const Grid1D& g, long kmax, double l2_norm, std::uint64_t seed) {
  require(kmax >= 1 && static_cast<std::size_t>(2 * kmax) < g.size(), "kmax must lie in [1, n/2)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField f(g);
  for (long k = 1; k <= kmax; ++k) {
    const cplx c(gauss(rng), gauss(rng));
    f[g.index_of(k)] = c;
    f[g.index_of(-k)] = std::conj(c);
  }
  const double nrm = sobolev_norm(f, 0.0);
  for (auto& c : f.coeffs) c *= l2_norm / nrm;
  return f;
}

/// Real field with |phi^(xi)| = <xi>^-decay and uniformly random phases; Nyquist mode zero.
inline SpectralField rough_random(const Grid1D& g, double decay, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  SpectralField f(g);
  f[0] = 1.0;
  const long kmax = static_cast<long>(g.size() / 2) - 1;
  for (long k = 1; k <= kmax; ++k) {
    const double xi = static_cast<double>(k) / g.half_width();
    const cplx c = std::polar(std::pow(1.0 + xi * xi, -0.5 * decay), phase(rng));
    f[g.index_of(k)] = c;
    f[g.index_of(-k)] = std::conj(c);
  }
  return f;
}

}  // namespace kdvb
