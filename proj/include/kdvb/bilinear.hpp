#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "kdvb/multiplier.hpp"
#include "kdvb/parallel.hpp"
#include "kdvb/stats.hpp"
#include "kdvb/symbols.hpp"

namespace kdvb {

/// 1/2 < rho < min{(3 + 2 alpha)/4, 1} and delta > 0.
inline void check_weight_params(double rho, double delta, double alpha) {
  check_alpha(alpha);
  require(rho > 0.5 && rho < std::min((3.0 + 2.0 * alpha) / 4.0, 1.0),
          "rho must lie in (1/2, min{(3+2 alpha)/4, 1})");
  require(delta > 0 && delta < 0.5, "delta must lie in (0, 1/2)");
}

/// |xi3| <xi1>^rho <xi2>^rho <xi3>^-rho / (<lambda1>^(1/2) <lambda2>^(1/2) <lambda3>^(1/2 - delta)).
inline double bilinear_weight(const Eta& e1, const Eta& e2, const Eta& e3, double rho, double delta, double alpha,
                              double tol = 1e-9) {
  check_weight_params(rho, delta, alpha);
  const double sc = std::max({1.0, std::abs(e1.tau), std::abs(e2.tau), std::abs(e3.tau)});
  require(std::abs(e1.tau + e2.tau + e3.tau) <= tol * sc, "bilinear_weight: tau1 + tau2 + tau3 != 0");
  require(std::abs(e1.xi + e2.xi + e3.xi) <= tol * std::max({1.0, std::abs(e1.xi), std::abs(e2.xi), std::abs(e3.xi)}),
          "bilinear_weight: xi1 + xi2 + xi3 != 0");
  if (e3.xi == 0.0) return 0.0;
  const double num =
      std::abs(e3.xi) * std::pow(bracket(e1.xi), rho) * std::pow(bracket(e2.xi), rho) * std::pow(bracket(e3.xi), -rho);
  const double den = std::sqrt(bracket(modulation_lambda(e1.tau, e1.xi, alpha))) *
                     std::sqrt(bracket(modulation_lambda(e2.tau, e2.xi, alpha))) *
                     std::pow(bracket(modulation_lambda(e3.tau, e3.xi, alpha)), 0.5 - delta);
  return num / den;
}

/**
 * Truncation D_n of the lattice tau = a dtau, xi = b dxi: b in [-n/2, n/2) and
 * a - round(xi^3 / dtau) in [-n/2, n/2), so each slot holds n x n points
 * following the dispersion curve.
 */
struct CurveLattice {
  double dtau = 0.5;
  double dxi = 0.25;
  long centre(long b) const { return std::lround(std::pow(b * dxi, 3) / dtau); }
};

/// The weight on all (eta1, eta2) with eta1, eta2, eta3 in D_n.
inline MultiplierGrid<double> weighted_multiplier(long n, const CurveLattice& lat, double rho, double delta,
                                                  double alpha) {
  check_weight_params(rho, delta, alpha);
  require(n >= 1, "truncation size must be >= 1");
  MultiplierGrid<double> m(lat.dtau, lat.dxi);
  const long lo = -n / 2, hi = lo + n - 1;
  for (long b1 = lo; b1 <= hi; ++b1)
    for (long b2 = lo; b2 <= hi; ++b2) {
      const long b3 = -b1 - b2;
      if (b3 < lo || b3 > hi) continue;
      const long c1 = lat.centre(b1), c2 = lat.centre(b2), c3 = lat.centre(b3);
      for (long a1 = c1 + lo; a1 <= c1 + hi; ++a1) {
        // a3 = -a1 - a2 must lie in c3 + [lo, hi].
        const long from = std::max(c2 + lo, -a1 - c3 - hi), to = std::min(c2 + hi, -a1 - c3 - lo);
        for (long a2 = from; a2 <= to; ++a2) {
          const Eta e1{a1 * lat.dtau, b1 * lat.dxi}, e2{a2 * lat.dtau, b2 * lat.dxi};
          const Eta e3{-e1.tau - e2.tau, -e1.xi - e2.xi};
          const double w = bilinear_weight(e1, e2, e3, rho, delta, alpha);
          if (w != 0.0) m.add(a1, b1, a2, b2, w);
        }
      }
    }
  return m;
}

struct Lemma32Row {
  long n = 0;
  std::size_t entries = 0;
  double lower = 0, upper = 0;
};

struct Lemma32Report {
  double alpha = 1, rho = 0.75, delta = 0.01;
  CurveLattice lattice;
  std::vector<Lemma32Row> rows;
  double final_ratio = 0;  ///< lower(last) / lower(penultimate)
  double slope = 0;        ///< log-log slope of lower vs n
  bool non_diverging = true;
};

inline Lemma32Report verify_lemma32(double alpha, double rho, double delta, const std::vector<long>& sizes,
                                    const CurveLattice& lat = {}, const NormOptions& opt = {8, 400, 1e-9, 1, false},
                                    double ratio_limit = 1.2, unsigned workers = 0) {
  check_weight_params(rho, delta, alpha);
  Lemma32Report rep;
  rep.alpha = alpha;
  rep.rho = rho;
  rep.delta = delta;
  rep.lattice = lat;
  rep.rows = parallel_map(
      sizes,
      [&](const long& n) {
        const auto m = weighted_multiplier(n, lat, rho, delta, alpha);
        const auto est = multiplier_norm_estimate(m, opt);
        return Lemma32Row{n, m.size(), est.lower, est.upper};
      },
      workers);
  const std::size_t k = rep.rows.size();
  if (k >= 2 && rep.rows[k - 2].lower > 0) {
    rep.final_ratio = rep.rows[k - 1].lower / rep.rows[k - 2].lower;
    rep.non_diverging = rep.final_ratio <= ratio_limit;
  }
  std::vector<double> x, y;
  for (const auto& r : rep.rows)
    if (r.lower > 0) {
      x.push_back(std::log(static_cast<double>(r.n)));
      y.push_back(std::log(r.lower));
    }
  if (x.size() >= 2) rep.slope = fit_line(x, y).slope;
  return rep;
}

}  // namespace kdvb
