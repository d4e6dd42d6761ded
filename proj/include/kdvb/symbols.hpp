#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "kdvb/grid.hpp"

namespace kdvb {

/// Every exponent of the equation and of the estimates in one place.
struct EquationParams {
  double alpha = 1.0;
  double s = 0.0;
  double b = 0.5;
  double rho = 0.75;
  double delta = 0.01;
  double beta = 1.0;
  double mu = 0.0;
  double s_c = -0.75;

  void validate() const {
    require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0,1]");
  }
};

inline void check_alpha(double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0 && std::isfinite(alpha), "alpha must lie in [0,1]");
}

/// |xi|^(2 alpha); identically 1 when alpha = 0.
inline double dissipation_symbol(double xi, double alpha) {
  check_alpha(alpha);
  if (alpha == 0.0) return 1.0;
  const double a = std::abs(xi);
  if (alpha == 1.0) return a * a;
  if (alpha == 0.5) return a;
  return std::pow(a, 2.0 * alpha);
}

/// <z> = (1 + |z|^2)^(1/2).
inline double bracket(double z) { return std::sqrt(1.0 + z * z); }
inline double bracket(cplx z) { return std::sqrt(1.0 + std::norm(z)); }

/// Linear symbol i xi^3 - |xi|^(2 alpha).
inline cplx linear_symbol(double xi, double alpha) {
  return {-dissipation_symbol(xi, alpha), xi * xi * xi};
}

/// exp(i t xi^3 - |t| |xi|^(2 alpha)).
inline cplx semigroup_factor(double t, double xi, double alpha) {
  const double damp = std::exp(-std::abs(t) * dissipation_symbol(xi, alpha));
  return std::polar(damp, t * xi * xi * xi);
}

inline cplx free_factor(double t, double xi) { return std::polar(1.0, t * xi * xi * xi); }

inline SpectralField free_group_U(double t, const SpectralField& phi) {
  SpectralField out(phi.grid);
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = free_factor(t, phi.grid.frequency(i)) * phi[i];
  return out;
}

inline SpectralField semigroup_W(double t, const SpectralField& phi, double alpha) {
  check_alpha(alpha);
  SpectralField out(phi.grid);
  for (std::size_t i = 0; i < phi.size(); ++i)
    out[i] = semigroup_factor(t, phi.grid.frequency(i), alpha) * phi[i];
  return out;
}

/// lambda = i tau - h(xi) = i(tau - xi^3) + |xi|^(2 alpha).
inline cplx modulation_lambda(double tau, double xi, double alpha) {
  return {dissipation_symbol(xi, alpha), tau - xi * xi * xi};
}

/// h(xi) = 3i xi1 xi2 xi3 - sum |xi_j|^(2 alpha) on xi1 + xi2 + xi3 = 0.
inline cplx resonance_h(double xi1, double xi2, double xi3, double alpha, double tol = 1e-9) {
  const double scale = std::max({1.0, std::abs(xi1), std::abs(xi2), std::abs(xi3)});
  require(std::abs(xi1 + xi2 + xi3) <= tol * scale, "resonance_h: xi1 + xi2 + xi3 != 0");
  const double d = dissipation_symbol(xi1, alpha) + dissipation_symbol(xi2, alpha) +
                   dissipation_symbol(xi3, alpha);
  return {-d, 3.0 * xi1 * xi2 * xi3};
}

}  // namespace kdvb
