#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "kdvb/grid.hpp"
#include "kdvb/norms.hpp"
#include "kdvb/symbols.hpp"

namespace kdvb {

enum class StepperKind { exponential, picard };

struct SolverConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  StepperKind kind = StepperKind::exponential;
  int picard_iterations = 6;
  bool dealias = true;
  bool nonlinear = true;
  std::size_t record_every = 1;
  double tolerance = 1e-13;

  void validate() const {
    require(dt > 0 && std::isfinite(dt), "dt must be positive");
    require(t_final > 0 && std::isfinite(t_final), "t_final must be positive");
    require(picard_iterations >= 0, "picard iteration count must be >= 0");
    require(record_every >= 1, "record_every must be >= 1");
  }
  std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_final / dt)); }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  EquationParams params;
  double dt = 0.0;

  std::size_t size() const { return times.size(); }
};

/// 2/3 rule: modes |k| < n/3 survive.
inline bool dealias_keeps(const Grid1D& g, std::size_t i) {
  const long k = g.wavenumber(i);
  return 3 * std::labs(k) < static_cast<long>(g.size());
}

inline bool all_finite(const SpectralField& f) {
  for (const auto& c : f.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

/// Coefficients of (1/2) d/dx (u^2): (i xi / 2) (u^ * u^)(xi).
inline SpectralField nonlinear_term(const SpectralField& u, bool dealias = true) {
  const Grid1D& g = u.grid;
  SpectralField v = u;
  if (dealias)
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!dealias_keeps(g, i)) v[i] = 0.0;
  std::vector<cplx> phys = inverse(v);
  for (auto& z : phys) z = cplx(z.real() * z.real() - z.imag() * z.imag(), 2.0 * z.real() * z.imag());
  SpectralField out = forward(g, phys);
  const std::size_t nyq = g.size() / 2;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i == nyq || (dealias && !dealias_keeps(g, i))) {
      out[i] = 0.0;
      continue;
    }
    out[i] *= cplx(0.0, 0.5 * g.frequency(i));
  }
  return out;
}

/**
 * Fourth-order exponential Runge-Kutta (Cox-Matthews) for
 * u_t = L u - N(u), L = i xi^3 - |xi|^(2 alpha), N = nonlinear_term.
 * The phi-function weights are contour means over a circle of radius 1
 * around dt L, which stays accurate when dt L is near 0. The linear factors
 * are exactly the semigroup factors, so with the nonlinearity off one step
 * is W(dt).
 */
class ExponentialStepper {
 public:
  ExponentialStepper(const Grid1D& g, double dt, double alpha, bool nonlinear = true, bool dealias = true)
      : grid_(g), dt_(dt), nonlinear_(nonlinear), dealias_(dealias) {
    require(dt > 0 && std::isfinite(dt), "dt must be positive");
    check_alpha(alpha);
    const std::size_t n = g.size();
    E_.resize(n);
    E2_.resize(n);
    Q_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
    constexpr int M = 32;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = g.frequency(i);
      E_[i] = semigroup_factor(dt, xi, alpha);
      E2_[i] = semigroup_factor(0.5 * dt, xi, alpha);
      const cplx z = dt * linear_symbol(xi, alpha);
      cplx q = 0, a = 0, b = 0, c = 0;
      for (int m = 0; m < M; ++m) {
        const cplx r = z + std::polar(1.0, 2.0 * pi * (m + 0.5) / M);
        const cplx er = std::exp(r), er2 = std::exp(0.5 * r);
        const cplx r3 = r * r * r;
        q += (er2 - 1.0) / r;
        a += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
        b += (2.0 + r + er * (r - 2.0)) / r3;
        c += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
      }
      Q_[i] = dt * q / double(M);
      f1_[i] = dt * a / double(M);
      f2_[i] = dt * b / double(M);
      f3_[i] = dt * c / double(M);
    }
  }

  double dt() const { return dt_; }
  const Grid1D& grid() const { return grid_; }

  SpectralField step(const SpectralField& v) const {
    require(v.grid == grid_, "state lives on a different grid");
    const std::size_t n = grid_.size();
    SpectralField out(grid_);
    if (!nonlinear_) {
      for (std::size_t i = 0; i < n; ++i) out[i] = E_[i] * v[i];
      return out;
    }
    // N(v) enters with a minus sign: u_t = L u - nonlinear_term(u).
    const SpectralField Nv = nonlinear_term(v, dealias_);
    SpectralField a(grid_);
    for (std::size_t i = 0; i < n; ++i) a[i] = E2_[i] * v[i] - Q_[i] * Nv[i];
    const SpectralField Na = nonlinear_term(a, dealias_);
    SpectralField b(grid_);
    for (std::size_t i = 0; i < n; ++i) b[i] = E2_[i] * v[i] - Q_[i] * Na[i];
    const SpectralField Nb = nonlinear_term(b, dealias_);
    SpectralField c(grid_);
    for (std::size_t i = 0; i < n; ++i) c[i] = E2_[i] * a[i] - Q_[i] * (2.0 * Nb[i] - Nv[i]);
    const SpectralField Nc = nonlinear_term(c, dealias_);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = E_[i] * v[i] - (Nv[i] * f1_[i] + 2.0 * (Na[i] + Nb[i]) * f2_[i] + Nc[i] * f3_[i]);
    return out;
  }

 private:
  Grid1D grid_;
  double dt_;
  bool nonlinear_;
  bool dealias_;
  std::vector<cplx> E_, E2_, Q_, f1_, f2_, f3_;
};

inline SpectralField step_exponential(const SpectralField& state, double dt, const EquationParams& params,
                                      bool nonlinear = true) {
  params.validate();
  SpectralField next = ExponentialStepper(state.grid, dt, params.alpha, nonlinear).step(state);
  if (!all_finite(next)) throw BlowUpError("non-finite state after exponential step", 0.0);
  return next;
}

/// Time-steps phi to cfg.t_final with the exponential stepper.
inline Trajectory solve(const SpectralField& phi, const SolverConfig& cfg, const EquationParams& params) {
  cfg.validate();
  params.validate();
  const std::size_t steps = cfg.steps();
  require(steps >= 1, "t_final must cover at least one step");
  ExponentialStepper stepper(phi.grid, cfg.dt, params.alpha, cfg.nonlinear, cfg.dealias);
  Trajectory traj;
  traj.params = params;
  traj.dt = cfg.dt;
  traj.times.push_back(0.0);
  traj.states.push_back(phi);
  SpectralField u = phi;
  for (std::size_t n = 1; n <= steps; ++n) {
    SpectralField next = stepper.step(u);
    if (!all_finite(next))
      throw BlowUpError("non-finite state in exponential stepper", static_cast<double>(n - 1) * cfg.dt);
    u = std::move(next);
    if (n % cfg.record_every == 0 || n == steps) {
      traj.times.push_back(static_cast<double>(n) * cfg.dt);
      traj.states.push_back(u);
    }
  }
  return traj;
}

/// (1/2) sum |u^|^2 dxi.
inline double energy(const SpectralField& u) {
  const double n0 = sobolev_norm(u, 0.0);
  return 0.5 * n0 * n0;
}

/// sum |xi|^(2 alpha) |u^|^2 dxi, i.e. || |D|^alpha u ||^2.
inline double dissipation_rate(const SpectralField& u, double alpha) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    acc += dissipation_symbol(u.grid.frequency(i), alpha) * std::norm(u[i]);
  return acc * u.grid.spacing();
}

/**
 * Energy-law rate defect at interior record n:
 * |(E_{n+1} - E_{n-1}) / (2h) + (D_{n-1} + 4 D_n + D_{n+1}) / 6| / ||u_0||^2.
 */
inline std::vector<double> energy_law_rates(const Trajectory& traj) {
  std::vector<double> out;
  if (traj.size() < 3) return out;
  const double alpha = traj.params.alpha;
  const double n0 = std::max(2.0 * energy(traj.states.front()), std::numeric_limits<double>::min());
  std::vector<double> E(traj.size()), D(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) {
    E[n] = energy(traj.states[n]);
    D[n] = dissipation_rate(traj.states[n], alpha);
  }
  for (std::size_t n = 1; n + 1 < traj.size(); ++n) {
    const double h = 0.5 * (traj.times[n + 1] - traj.times[n - 1]);
    const double dE = (E[n + 1] - E[n - 1]) / (2.0 * h);
    out.push_back(std::abs(dE + (D[n - 1] + 4.0 * D[n] + D[n + 1]) / 6.0) / n0);
  }
  return out;
}

/// Energy defect per step: the rate defect times the record spacing, i.e.
/// |E(t+h) - E(t) + int_t^{t+h} D| / ||u_0||^2 with Simpson's rule over two steps.
inline std::vector<double> energy_law_residuals(const Trajectory& traj) {
  std::vector<double> out = energy_law_rates(traj);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] *= 0.5 * (traj.times[n + 2] - traj.times[n]);
  return out;
}

struct PicardResult {
  Trajectory trajectory;
  /// distances[i] = sup_t ||u^(i+1)(t) - u^(i)(t)||_{H^s}.
  std::vector<double> distances;
};

/**
 * u^(0) = W(t) phi, u^(n+1)(t) = W(t) phi - int_0^t W(t - t') N(u^(n)(t')) dt'
 * with N = nonlinear_term, on the grid t_m = m dt. The integral is the
 * composite trapezoid rule with the kernel applied exactly; its running sums
 * S_m = W(dt) S_{m-1} + N_m give all t_m in one pass.
 */
inline PicardResult picard_iterate(const SpectralField& phi, double T, int k, const EquationParams& params,
                                   const SolverConfig& cfg = {}) {
  params.validate();
  require(k >= 0, "iteration count must be >= 0");
  require(T > 0 && cfg.dt > 0, "T and dt must be positive");
  const std::size_t steps = static_cast<std::size_t>(std::llround(T / cfg.dt));
  require(steps >= 1, "T must cover at least one step");
  const Grid1D& g = phi.grid;
  const std::size_t n = g.size();
  const double dt = cfg.dt;

  std::vector<cplx> step_factor(n);
  for (std::size_t i = 0; i < n; ++i) step_factor[i] = semigroup_factor(dt, g.frequency(i), params.alpha);

  std::vector<SpectralField> linear(steps + 1);
  for (std::size_t m = 0; m <= steps; ++m) linear[m] = semigroup_W(static_cast<double>(m) * dt, phi, params.alpha);

  PicardResult res;
  std::vector<SpectralField> cur = linear;
  const double floor = cfg.tolerance * std::max(1.0, sobolev_norm(phi, params.s));
  for (int it = 0; it < k; ++it) {
    std::vector<SpectralField> F(steps + 1);
    for (std::size_t m = 0; m <= steps; ++m) F[m] = nonlinear_term(cur[m], cfg.dealias);
    std::vector<SpectralField> next(steps + 1, SpectralField(g));
    std::vector<cplx> S(n, 0.0);
    double dist = 0.0;
    for (std::size_t m = 0; m <= steps; ++m) {
      const double t = static_cast<double>(m) * dt;
      SpectralField diff(g);
      for (std::size_t i = 0; i < n; ++i) {
        S[i] = step_factor[i] * S[i] + F[m][i];
        cplx integral = 0.0;
        if (m > 0) {
          const cplx w0 = semigroup_factor(t, g.frequency(i), params.alpha);
          integral = dt * (S[i] - 0.5 * F[m][i] - 0.5 * w0 * F[0][i]);
        }
        next[m][i] = linear[m][i] - integral;
        diff[i] = next[m][i] - cur[m][i];
      }
      if (!all_finite(next[m])) throw BlowUpError("non-finite Picard iterate", t - dt);
      dist = std::max(dist, sobolev_norm(diff, params.s));
    }
    res.distances.push_back(dist);
    const std::size_t d = res.distances.size();
    if (d >= 2 && dist > res.distances[d - 2] && dist > floor)
      throw DivergenceError("Picard iterates move apart at iteration " + std::to_string(it + 1));
    cur = std::move(next);
  }

  res.trajectory.params = params;
  res.trajectory.dt = dt;
  for (std::size_t m = 0; m <= steps; ++m) {
    if (m % cfg.record_every == 0 || m == steps) {
      res.trajectory.times.push_back(static_cast<double>(m) * dt);
      res.trajectory.states.push_back(std::move(cur[m]));
    }
  }
  return res;
}

/// Uniform samples of a function of tau: values[j] at tau0 + j * dtau.
struct SampledSpectrum {
  double tau0 = 0.0;
  double dtau = 1.0;
  std::vector<cplx> values;

  double tau(std::size_t j) const { return tau0 + static_cast<double>(j) * dtau; }
};

namespace detail {
inline cplx expm1(cplx w) {
  if (std::abs(w) < 1e-2) {
    // Taylor to w^7 is below 1e-19 relative here.
    cplx term = w, sum = w;
    for (int k = 2; k <= 8; ++k) {
      term *= w / double(k);
      sum += term;
    }
    return sum;
  }
  return std::exp(w) - 1.0;
}

inline void check_window(const SampledSpectrum& w, double edge_tol) {
  require(w.values.size() >= 2 && w.dtau > 0, "sampled spectrum needs >= 2 points and dtau > 0");
  double peak = 0.0;
  for (const auto& v : w.values) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(w.values.front()), std::abs(w.values.back()));
  if (peak > 0 && edge > edge_tol * peak)
    throw QuadratureError("omega^ is not negligible at the edge of its tau window", edge / peak);
}
}  // namespace detail

/// (exp(i t tau) - exp(-|t| d)) / (i tau + d), continuous through tau = d = 0.
inline cplx kernel_integrand(double t, double tau, double d) {
  const cplx den(d, tau);
  if (d == 0.0 && tau == 0.0) return t;
  const double at = std::abs(t);
  return std::exp(-at * d) * detail::expm1(cplx(at * d, t * tau)) / den;
}

/// K_xi(t) = psi(t) int (exp(i t tau) - exp(-|t| |xi|^(2a))) / (i tau + |xi|^(2a)) w(tau) dtau.
inline cplx duhamel_kernel_K(double xi, const SampledSpectrum& w, double t, double alpha,
                             double edge_tol = 1e-10) {
  check_alpha(alpha);
  detail::check_window(w, edge_tol);
  const double c = cutoff_psi(t, 1.0);
  if (c == 0.0) return 0.0;
  const double d = dissipation_symbol(xi, alpha);
  cplx acc = 0.0;
  const std::size_t m = w.values.size();
  for (std::size_t j = 0; j < m; ++j) {
    const double wt = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
    acc += wt * kernel_integrand(t, w.tau(j), d) * w.values[j];
  }
  return c * acc * w.dtau;
}

/// Both sides of || <i tau + d>^(1/2) F_t K_xi ||^2 <~ (int |w|/<.>)^2 + int |w|^2/<.>.
struct KernelInequality {
  double lhs = 0.0;
  double rhs = 0.0;
};

/**
 * Evaluates K_xi on t_j = -window/2 + j window/nt, transforms in t with
 * F_t K(tau) = (1/2pi) int exp(-i t tau) K dt, and forms both sides.
 */
inline KernelInequality kernel_inequality(double xi, const SampledSpectrum& w, double alpha, double window = 8.0,
                                          std::size_t nt = 2048) {
  check_alpha(alpha);
  detail::check_window(w, 1e-10);
  require(window >= 4.0 && is_power_of_two(nt), "time window must contain [-2,2]; nt a power of two");
  const double d = dissipation_symbol(xi, alpha);
  const std::size_t m = w.values.size();
  const double dt = window / static_cast<double>(nt);
  std::vector<cplx> K(nt, 0.0);
  if (d > 0.0) {
    // K = psi(t) [sum_j exp(i t tau_j) c_j - exp(-|t| d) sum_j c_j], c_j = w_j dtau / (i tau_j + d).
    std::vector<cplx> osc(nt, 0.0);
    cplx total = 0.0;
    const double t0 = -0.5 * window;
    for (std::size_t j = 0; j < m; ++j) {
      const double wt = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
      const double tau = w.tau(j);
      const cplx cj = wt * w.values[j] * w.dtau / cplx(d, tau);
      total += cj;
      cplx z = std::polar(1.0, t0 * tau) * cj;
      const cplx rot = std::polar(1.0, dt * tau);
      for (std::size_t l = 0; l < nt; ++l) {
        osc[l] += z;
        z *= rot;
      }
    }
    for (std::size_t l = 0; l < nt; ++l) {
      const double t = t0 + static_cast<double>(l) * dt;
      K[l] = cutoff_psi(t, 1.0) * (osc[l] - std::exp(-std::abs(t) * d) * total);
    }
  } else {
    for (std::size_t l = 0; l < nt; ++l) K[l] = duhamel_kernel_K(xi, w, -0.5 * window + l * dt, alpha);
  }
  fft_forward(K);
  const double dtau_t = 2.0 * pi / window;
  KernelInequality out;
  for (std::size_t l = 0; l < nt; ++l) {
    const long k = l < nt / 2 ? static_cast<long>(l) : static_cast<long>(l) - static_cast<long>(nt);
    const double tau = static_cast<double>(k) * dtau_t;
    const cplx Kh = K[l] * (dt / (2.0 * pi));
    out.lhs += bracket(cplx(d, tau)) * std::norm(Kh) * dtau_t;
  }
  double l1 = 0.0, l2 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double br = bracket(cplx(d, w.tau(j)));
    l1 += std::abs(w.values[j]) / br;
    l2 += std::norm(w.values[j]) / br;
  }
  out.rhs = l1 * w.dtau * l1 * w.dtau + l2 * w.dtau;
  return out;
}

struct SmoothingRow {
  double t = 0.0;
  std::vector<double> norms;  ///< ||u(t)||_{H^sigma} for sigma in s_list
  double tail_mass = 0.0;     ///< sum_{|xi| > cutoff} |u^|^2 dxi
  double tail_ratio = 0.0;    ///< max_{|xi| > cutoff} |u^(t)| / (exp(-t|xi|^(2a)) |u^(0)|)
};

struct SmoothingReport {
  std::vector<double> s_list;
  double tail_cutoff = 32.0;
  double tolerance = 2.0;
  std::vector<SmoothingRow> rows;
  bool all_finite = true;
  bool tail_decreasing = true;
  double max_tail_ratio = 0.0;
  bool within_envelope = true;
};

/**
 * Sobolev norms along a trajectory, and the spectral tail beyond tail_cutoff
 * against the linear damping envelope exp(-t |xi|^(2 alpha)) times the
 * initial tail.
 */
inline SmoothingReport smoothing_diagnostic(const Trajectory& traj, const std::vector<double>& s_list,
                                            double tail_cutoff = 32.0, double tolerance = 2.0) {
  SmoothingReport rep;
  rep.s_list = s_list;
  rep.tail_cutoff = tail_cutoff;
  rep.tolerance = tolerance;
  if (traj.size() == 0) return rep;
  const double alpha = traj.params.alpha;
  const SpectralField& u0 = traj.states.front();
  const Grid1D& g = u0.grid;
  for (std::size_t r = 0; r < traj.size(); ++r) {
    const SpectralField& u = traj.states[r];
    SmoothingRow row;
    row.t = traj.times[r];
    for (double s : s_list) {
      const double v = sobolev_norm(u, s);
      row.norms.push_back(v);
      if (!std::isfinite(v)) rep.all_finite = false;
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double xi = g.frequency(i);
      if (std::abs(xi) <= tail_cutoff) continue;
      row.tail_mass += std::norm(u[i]) * g.spacing();
      if (r == 0) continue;
      const double env = std::exp(-row.t * dissipation_symbol(xi, alpha)) * std::abs(u0[i]);
      const double a = std::abs(u[i]);
      if (a == 0.0) continue;
      const double ratio = env > 0 ? a / env : std::numeric_limits<double>::infinity();
      row.tail_ratio = std::max(row.tail_ratio, ratio);
    }
    if (!rep.rows.empty() && row.tail_mass > rep.rows.back().tail_mass) rep.tail_decreasing = false;
    rep.max_tail_ratio = std::max(rep.max_tail_ratio, row.tail_ratio);
    rep.rows.push_back(std::move(row));
  }
  rep.within_envelope = rep.max_tail_ratio <= tolerance;
  return rep;
}

}  // namespace kdvb
