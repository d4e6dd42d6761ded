#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kdvb/grid.hpp"
#include "kdvb/norms.hpp"
#include "kdvb/parallel.hpp"
#include "kdvb/solver.hpp"
#include "kdvb/stats.hpp"
#include "kdvb/symbols.hpp"

namespace kdvb {

namespace detail {
inline double overlap(double a, double b, double c, double d) { return std::max(0.0, std::min(b, d) - std::max(a, c)); }

// (exp(z) - 1) / z.
inline cplx phi1(cplx z) {
  if (z == cplx(0.0)) return 1.0;
  return expm1(z) / z;
}

template <class F>
auto gk(F f, double a, double b, double tol, double* err) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, err);
}
}  // namespace detail

/// phi_N^ = N^-s (chi_[N,N+2] + chi_[-N-2,-N]); each coefficient is the cell average.
inline SpectralField phi_N(double N, double s, const Grid1D& g) {
  require(N >= 1 && std::isfinite(N), "phi_N needs N >= 1");
  require(2.0 / g.spacing() >= 8.0, "grid does not resolve [N, N+2] with 8 points; raise half_width");
  require(N + 2.0 < g.nyquist(), "N + 2 is beyond the grid Nyquist frequency");
  SpectralField f(g);
  const double h = 0.5 * g.spacing();
  const double amp = std::pow(N, -s);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.frequency(i);
    const double w = detail::overlap(xi - h, xi + h, N, N + 2) + detail::overlap(xi - h, xi + h, -N - 2, -N);
    f[i] = amp * w / (2.0 * h);
  }
  return f;
}

/// Intervals of xi1 with xi1 in +-I_N and xi - xi1 in +-I_N.
inline std::vector<std::pair<double, double>> interaction_intervals(double N, double xi) {
  std::vector<std::pair<double, double>> out;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) {
      const double a1 = s1 > 0 ? N : -N - 2, b1 = s1 > 0 ? N + 2 : -N;
      const double a2 = s2 > 0 ? N : -N - 2, b2 = s2 > 0 ? N + 2 : -N;
      const double lo = std::max(a1, xi - b2), hi = std::min(b1, xi - a2);
      if (hi > lo) out.emplace_back(lo, hi);
    }
  std::sort(out.begin(), out.end());
  return out;
}

/// Measure of the interaction set K_xi.
inline double interaction_set_measure(double N, double xi) {
  double m = 0;
  for (auto [a, b] : interaction_intervals(N, xi)) m += b - a;
  return m;
}

/**
 * F_x(u_2,N(t))(xi) for u_2,N(t) = int_0^t W(t-t') d/dx[(W(t') phi_N)^2] dt':
 * exp(t L(xi)) (i xi) int phi^(xi1) phi^(xi-xi1) (exp(t a) - 1)/a dxi1,
 * a = L(xi1) + L(xi-xi1) - L(xi), by adaptive Gauss-Kronrod on each interval
 * of the interaction set.
 */
inline cplx second_iterate_spectrum(double N, double s, double alpha, double t, double xi, double tol = 1e-10,
                                    double* error_estimate = nullptr) {
  check_alpha(alpha);
  require(t >= 0, "second_iterate_spectrum needs t >= 0");
  if (error_estimate) *error_estimate = 0;
  if (t == 0.0 || xi == 0.0) return 0.0;
  const double d = dissipation_symbol(xi, alpha);
  const cplx L(-d, xi * xi * xi);
  auto integrand = [&](double x1) -> cplx {
    const double x2 = xi - x1;
    const double d1 = dissipation_symbol(x1, alpha), d2 = dissipation_symbol(x2, alpha);
    // x1^3 + x2^3 - xi^3 = -3 xi x1 x2 on xi = x1 + x2, without cancellation.
    const cplx a(-(d1 + d2 - d), -3.0 * xi * x1 * x2);
    if (a.real() <= 0) return std::exp(t * L) * t * detail::phi1(t * a);
    const cplx L12(-(d1 + d2), x1 * x1 * x1 + x2 * x2 * x2);
    return std::exp(t * L12) * t * detail::phi1(-t * a);
  };
  cplx acc = 0.0;
  double err_total = 0.0;
  for (auto [a, b] : interaction_intervals(N, xi)) {
    double err = 0;
    acc += detail::gk(integrand, a, b, tol, &err);
    err_total += err;
  }
  if (error_estimate) *error_estimate = err_total * std::abs(xi) * std::pow(N, -2.0 * s);
  return cplx(0.0, xi) * std::pow(N, -2.0 * s) * acc;
}

/// Square root of the closed-form bound: N^(-2s-2) (exp(-(1/2)^(2a) t) - exp(-2 (N+2)^(2a) t)).
inline double inflation_lower_bound(double N, double s, double alpha, double t) {
  check_alpha(alpha);
  require(N >= 1 && t > 0, "inflation_lower_bound needs N >= 1, t > 0");
  const double gap = std::exp(-dissipation_symbol(0.5, alpha) * t) - std::exp(-2.0 * dissipation_symbol(N + 2, alpha) * t);
  return std::pow(N, -2.0 * s - 2.0) * gap;
}

/**
 * The bound before its last two simplifications: the xi-weight
 * (int_{|xi|<1/2} <xi>^2s xi^2)^(1/2) is kept and 1/(N^2a + N^2) is not
 * replaced by N^-2.
 */
inline double inflation_intermediate_bound(double N, double s, double alpha, double t) {
  double err = 0;
  const double w = 2.0 * detail::gk([&](double x) { return std::pow(1.0 + x * x, s) * x * x; }, 0.0, 0.5, 1e-12, &err);
  const double gap = std::exp(-dissipation_symbol(0.5, alpha) * t) - std::exp(-2.0 * dissipation_symbol(N + 2, alpha) * t);
  return std::pow(N, -2.0 * s) * gap / (dissipation_symbol(N, alpha) + N * N) * std::sqrt(w);
}

struct ResonanceMagnitudes {
  double cubic;        ///< xi1^3 + (xi-xi1)^3 - xi^3, equal to -3 xi xi1 (xi-xi1)
  double dissipative;  ///< |xi1|^2a + |xi-xi1|^2a - |xi|^2a
};

inline ResonanceMagnitudes resonance_magnitudes(double N, double xi, double xi1, double alpha) {
  check_alpha(alpha);
  require(std::abs(xi) <= 0.5, "resonance_magnitudes needs |xi| <= 1/2");
  bool inside = false;
  for (auto [a, b] : interaction_intervals(N, xi)) inside = inside || (xi1 >= a - 1e-12 && xi1 <= b + 1e-12);
  require(inside, "xi1 is outside the interaction set");
  const double x2 = xi - xi1;
  return {-3.0 * xi * xi1 * x2,
          dissipation_symbol(xi1, alpha) + dissipation_symbol(x2, alpha) - dissipation_symbol(xi, alpha)};
}

/// (int_lo^hi <xi>^2s |F_x u_2,N(t)(xi)|^2 dxi), splitting at interior kinks.
inline double second_iterate_mass(double N, double s, double alpha, double t, double lo, double hi, double tol) {
  double err = 0;
  auto f = [&](double xi) {
    const cplx v = second_iterate_spectrum(N, s, alpha, t, xi, 0.1 * tol);
    return std::pow(1.0 + xi * xi, s) * std::norm(v);
  };
  return detail::gk(f, lo, hi, tol, &err);
}

/// Second-iterate H^s norms: restricted to |xi| <= 1/2 and over the whole line.
struct SecondIterateNorms {
  double restricted = 0.0;
  double full = 0.0;
};

inline SecondIterateNorms second_iterate_norms(double N, double s, double alpha, double t, double tol = 1e-9) {
  // |F u_2(-xi)| = |F u_2(xi)|; the support is [-2,2] and +-[2N, 2N+4].
  const double inner = 2.0 * second_iterate_mass(N, s, alpha, t, 0.0, 0.5, tol);
  const double mid = 2.0 * second_iterate_mass(N, s, alpha, t, 0.5, 2.0, tol);
  const double high = 2.0 * (second_iterate_mass(N, s, alpha, t, 2 * N, 2 * N + 2, tol) +
                             second_iterate_mass(N, s, alpha, t, 2 * N + 2, 2 * N + 4, tol));
  return {std::sqrt(inner), std::sqrt(inner + mid + high)};
}

struct InflationGrid {
  std::size_t n = 8192;
  double half_width = 4.0;
};

struct InflationRow {
  double N = 0;
  double phi_norm = 0;            ///< ||phi_N||_{H^s} on the grid
  double restricted_norm = 0;     ///< ||u_2,N(t)||_{H^s(|xi| <= 1/2)}
  double full_norm = 0;           ///< ||u_2,N(t)||_{H^s}
  double lower_bound = 0;         ///< closed-form bound
  double intermediate_bound = 0;  ///< bound before its last simplifications
  double bound_ratio = 0;         ///< restricted_norm / lower_bound
  double quadratic_ratio = 0;     ///< full_norm / phi_norm^2
};

struct InflationReport {
  double s = 0, alpha = 1, t = 0.1;
  double tolerance = 0.01;
  std::vector<InflationRow> rows;
  double slope = 0;        ///< log-log slope of restricted_norm vs N
  double ratio_slope = 0;  ///< log-log slope of quadratic_ratio vs N
  bool bound_holds = true;
  bool intermediate_bound_holds = true;
  bool bounded_ratio = true;
  bool quadratic_estimate_fails = false;
  bool alpha_in_theorem_range = true;
  double min_bound_ratio = 0;
};

inline InflationReport inflation_experiment(double s, double alpha, double t, const std::vector<double>& N_list,
                                            const InflationGrid& grid = {}, double ratio_slope_limit = 0.05,
                                            unsigned workers = 0) {
  check_alpha(alpha);
  require(t > 0, "inflation_experiment needs t > 0");
  InflationReport rep;
  rep.s = s;
  rep.alpha = alpha;
  rep.t = t;
  rep.alpha_in_theorem_range = alpha >= 0.5 && alpha <= 1.0;
  if (N_list.empty()) return rep;
  const Grid1D g(grid.n, grid.half_width);
  for (double N : N_list) (void)phi_N(N, s, g);
  rep.rows = parallel_map(
      N_list,
      [&](const double& N) {
        InflationRow row;
        row.N = N;
        row.phi_norm = sobolev_norm(phi_N(N, s, g), s);
        const auto norms = second_iterate_norms(N, s, alpha, t);
        row.restricted_norm = norms.restricted;
        row.full_norm = norms.full;
        row.lower_bound = inflation_lower_bound(N, s, alpha, t);
        row.intermediate_bound = inflation_intermediate_bound(N, s, alpha, t);
        row.bound_ratio = row.restricted_norm / row.lower_bound;
        row.quadratic_ratio = row.full_norm / (row.phi_norm * row.phi_norm);
        return row;
      },
      workers);
  std::vector<double> logN, logR, logQ;
  rep.min_bound_ratio = INFINITY;
  for (const auto& row : rep.rows) {
    if (row.restricted_norm < row.lower_bound * (1.0 - rep.tolerance)) rep.bound_holds = false;
    if (row.restricted_norm < row.intermediate_bound * (1.0 - rep.tolerance)) rep.intermediate_bound_holds = false;
    rep.min_bound_ratio = std::min(rep.min_bound_ratio, row.bound_ratio);
    logN.push_back(std::log(row.N));
    logR.push_back(std::log(row.restricted_norm));
    logQ.push_back(std::log(row.quadratic_ratio));
  }
  if (rep.rows.size() >= 2) {
    rep.slope = fit_line(logN, logR).slope;
    rep.ratio_slope = fit_line(logN, logQ).slope;
  }
  rep.bounded_ratio = rep.ratio_slope <= ratio_slope_limit;
  rep.quadratic_estimate_fails = !rep.bounded_ratio;
  return rep;
}

}  // namespace kdvb
