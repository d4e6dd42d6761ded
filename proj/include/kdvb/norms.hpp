#pragma once

#include <cmath>
#include <vector>

#include "kdvb/grid.hpp"
#include "kdvb/symbols.hpp"

namespace kdvb {

/// (sum <xi>^(2s) |phi(xi)|^2 dxi)^(1/2).
inline double sobolev_norm(const SpectralField& phi, double s) {
  const double dxi = phi.grid.spacing();
  double acc = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double xi = phi.grid.frequency(i);
    const double w = s == 0.0 ? 1.0 : std::pow(1.0 + xi * xi, s);
    acc += w * std::norm(phi[i]);
  }
  return std::sqrt(acc * dxi);
}

namespace detail {
inline double smooth_step_g(double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; }
// 0 for x <= 0, 1 for x >= 1, C-infinity in between.
inline double smooth_step(double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double a = smooth_step_g(x);
  return a / (a + smooth_step_g(1.0 - x));
}
}  // namespace detail

/// psi(t/T): 1 on [-T, T], 0 outside (-2T, 2T), smooth.
inline double cutoff_psi(double t, double T = 1.0) {
  require(T > 0 && std::isfinite(T), "cutoff_psi needs T > 0");
  return detail::smooth_step(2.0 - std::abs(t / T));
}

/**
 * Checks <xi>^s <= C (<xi>^s_c <xi1>^(s-s_c) + <xi>^s_c <xi-xi1>^(s-s_c)) with
 * C = max(1, 2^(s-s_c-1)). C = 1 on 0 <= s - s_c <= 1; beyond that the
 * constant-one form is false (xi = 10, xi1 = 5, s - s_c = 2).
 */
inline bool triangle_weight_check(double xi, double xi1, double s, double s_c) {
  require(s >= s_c, "triangle_weight_check needs s >= s_c");
  const double g = s - s_c;
  const double C = std::max(1.0, std::pow(2.0, g - 1.0));
  const double lhs = std::pow(bracket(xi), g);
  const double rhs = C * (std::pow(bracket(xi1), g) + std::pow(bracket(xi - xi1), g));
  return lhs <= rhs * (1.0 + 1e-12);
}

/// Frame of a space-time transform.
enum class Frame {
  lab,          ///< F_{t,x} u
  interaction,  ///< F_{t,x} U(-t) u; tau is then the modulation tau - xi^3
};

/// (tau, xi) lattice: space grid times a time window [-W/2, W/2) with nt points.
struct SpaceTimeGrid {
  Grid1D space;
  double window = 8.0;
  std::size_t nt = 256;

  double dt() const { return window / static_cast<double>(nt); }
  double dtau() const { return 2.0 * pi / window; }
  double t(std::size_t j) const { return -0.5 * window + static_cast<double>(j) * dt(); }
  double tau(std::size_t l) const {
    const long k = l < nt / 2 ? static_cast<long>(l) : static_cast<long>(l) - static_cast<long>(nt);
    return static_cast<double>(k) * dtau();
  }
};

/// Coefficients u^(tau_l, xi_i) at index l * n + i (both axes FFT order).
struct SpaceTimeField {
  SpaceTimeGrid grid;
  Frame frame = Frame::lab;
  std::vector<cplx> coeffs;

  cplx at(std::size_t l, std::size_t i) const { return coeffs[l * grid.space.size() + i]; }
};

/// Transform of time samples u(t_j) (one SpectralField per t_j) in t.
inline SpaceTimeField space_time_transform(const SpaceTimeGrid& g, const std::vector<SpectralField>& samples,
                                           Frame frame) {
  require(is_power_of_two(g.nt), "time resolution must be a power of two");
  require(samples.size() == g.nt, "need one spatial field per time sample");
  const std::size_t n = g.space.size();
  SpaceTimeField out{g, frame, std::vector<cplx>(g.nt * n)};
  std::vector<cplx> col(g.nt);
  const double scale = g.dt() / (2.0 * pi);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < g.nt; ++j) {
      require(samples[j].grid == g.space, "time sample on a different grid");
      col[j] = samples[j][i];
    }
    fft_forward(col);
    for (std::size_t l = 0; l < g.nt; ++l) out.coeffs[l * n + i] = col[l] * (l % 2 == 0 ? scale : -scale);
  }
  return out;
}

/// (sum <lambda>^(2b) <xi>^(2s) |u^|^2 dtau dxi)^(1/2).
inline double bourgain_norm(const SpaceTimeField& u, double b, double s, double alpha) {
  check_alpha(alpha);
  const auto& g = u.grid;
  const std::size_t n = g.space.size();
  double acc = 0.0;
  for (std::size_t l = 0; l < g.nt; ++l) {
    const double tau = g.tau(l);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = g.space.frequency(i);
      const cplx lam = u.frame == Frame::lab ? modulation_lambda(tau, xi, alpha)
                                             : cplx(dissipation_symbol(xi, alpha), tau);
      double w = std::pow(1.0 + std::norm(lam), b);
      if (s != 0.0) w *= std::pow(1.0 + xi * xi, s);
      acc += w * std::norm(u.coeffs[l * n + i]);
    }
  }
  return std::sqrt(acc * g.dtau() * g.space.spacing());
}

/// psi_T(t) W(t) phi in the interaction frame, so that the fast phase
/// exp(i t xi^3) never has to be resolved in time.
inline SpaceTimeField cutoff_linear_flow(const SpectralField& phi, double alpha, double T, const SpaceTimeGrid& g) {
  require(g.space == phi.grid, "space grid mismatch");
  require(g.window >= 4.0 * T, "time window must contain supp psi_T");
  std::vector<SpectralField> samples;
  samples.reserve(g.nt);
  for (std::size_t j = 0; j < g.nt; ++j) {
    const double t = g.t(j);
    const double c = cutoff_psi(t, T);
    SpectralField f(phi.grid);
    for (std::size_t i = 0; i < phi.size(); ++i)
      f[i] = c * std::exp(-std::abs(t) * dissipation_symbol(phi.grid.frequency(i), alpha)) * phi[i];
    samples.push_back(std::move(f));
  }
  return space_time_transform(g, samples, Frame::interaction);
}

}  // namespace kdvb
