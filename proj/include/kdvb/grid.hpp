#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "kdvb/errors.hpp"
#include "kdvb/fft.hpp"

namespace kdvb {

inline constexpr double pi = 3.14159265358979323846;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/**
 * Periodic truncation of the line: the torus [-pi*L, pi*L) with n points.
 *
 * Fourier coefficients are stored in FFT order; slot i carries the integer
 * wavenumber k = i for i < n/2 and k = i - n otherwise, at frequency k/L.
 * Coefficients sample the density (1/2pi) int exp(-ix xi) u(x) dx, so a
 * product in x is a Riemann-sum convolution in xi with weight 1/L.
 */
class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(std::size_t n, double half_width) : n_(n), half_width_(half_width) {
    require(is_power_of_two(n) && n >= 2, "grid size must be a power of two >= 2");
    require(half_width > 0 && std::isfinite(half_width), "half_width must be positive");
  }

  std::size_t size() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return 1.0 / half_width_; }
  double dx() const { return 2.0 * pi * half_width_ / static_cast<double>(n_); }

  long wavenumber(std::size_t i) const {
    return i < n_ / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n_);
  }
  double frequency(std::size_t i) const { return static_cast<double>(wavenumber(i)) / half_width_; }

  /// FFT slot of wavenumber k, for -n/2 <= k < n/2.
  std::size_t index_of(long k) const {
    const long n = static_cast<long>(n_);
    require(k >= -n / 2 && k < n / 2, "wavenumber outside grid");
    return static_cast<std::size_t>(k < 0 ? k + n : k);
  }

  /// Ascending frequencies -n/2/L, ..., (n/2-1)/L.
  std::vector<double> frequencies() const {
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j)
      out[j] = static_cast<double>(static_cast<long>(j) - static_cast<long>(n_ / 2)) / half_width_;
    return out;
  }

  double nyquist() const { return static_cast<double>(n_ / 2) / half_width_; }
  double x(std::size_t j) const { return -pi * half_width_ + static_cast<double>(j) * dx(); }

  bool operator==(const Grid1D& o) const { return n_ == o.n_ && half_width_ == o.half_width_; }
  bool operator!=(const Grid1D& o) const { return !(*this == o); }

 private:
  std::size_t n_ = 0;
  double half_width_ = 1.0;
};

inline Grid1D make_grid(std::size_t n, double half_width) { return Grid1D(n, half_width); }

/// Fourier coefficients on a grid, FFT order.
struct SpectralField {
  Grid1D grid;
  std::vector<cplx> coeffs;

  SpectralField() = default;
  explicit SpectralField(const Grid1D& g) : grid(g), coeffs(g.size()) {}
  SpectralField(const Grid1D& g, std::vector<cplx> c) : grid(g), coeffs(std::move(c)) {
    require(coeffs.size() == g.size(), "coefficient count does not match grid");
  }

  std::size_t size() const { return coeffs.size(); }
  cplx& operator[](std::size_t i) { return coeffs[i]; }
  const cplx& operator[](std::size_t i) const { return coeffs[i]; }
};

/// Samples u(x_j) -> coefficients.
inline SpectralField forward(const Grid1D& g, const std::vector<cplx>& samples) {
  require(samples.size() == g.size(), "sample count does not match grid");
  std::vector<cplx> c = samples;
  fft_forward(c);
  const double scale = g.half_width() / static_cast<double>(g.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= (i % 2 == 0 ? scale : -scale);
  return SpectralField(g, std::move(c));
}

inline SpectralField forward(const Grid1D& g, const std::vector<double>& samples) {
  return forward(g, std::vector<cplx>(samples.begin(), samples.end()));
}

/// Coefficients -> samples u(x_j).
inline std::vector<cplx> inverse(const SpectralField& f) {
  std::vector<cplx> c = f.coeffs;
  const double scale = 1.0 / f.grid.half_width();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= (i % 2 == 0 ? scale : -scale);
  fft_backward(c);
  return c;
}

/// max |c(-xi) - conj(c(xi))| over modes with a partner; Nyquist must be real.
inline double conjugate_symmetry_defect(const SpectralField& f) {
  const std::size_t n = f.size();
  double worst = std::abs(f[0].imag());
  for (std::size_t i = 1; i < n; ++i) worst = std::max(worst, std::abs(f[n - i] - std::conj(f[i])));
  return worst;
}

/// Replace coefficients by their conjugate-symmetric part.
inline void symmetrize(SpectralField& f) {
  const std::size_t n = f.size();
  std::vector<cplx> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = 0.5 * (f[i] + std::conj(f[(n - i) % n]));
  f.coeffs = std::move(c);
}

/// Dyadic number 2^exponent; `bottom` marks the floored modulation shell [0, 2).
struct DyadicValue {
  int exponent = 0;
  bool bottom = false;

  double value() const { return std::ldexp(1.0, exponent); }
  bool operator==(const DyadicValue& o) const { return exponent == o.exponent; }
  bool operator!=(const DyadicValue& o) const { return exponent != o.exponent; }
};

inline DyadicValue dyadic(int exponent) { return DyadicValue{exponent, false}; }

/// Shell 2^k with 2^k <= x < 2^(k+1). With floor_at_one every x < 2 lands in
/// the bottom shell 1.
inline DyadicValue dyadic_shell(double x, bool floor_at_one) {
  require(std::isfinite(x) && x >= 0, "dyadic_shell needs a finite x >= 0");
  if (floor_at_one && x <= 1.0) return DyadicValue{0, true};
  require(x > 0, "x = 0 has no frequency shell");
  const int e = std::ilogb(x);
  return DyadicValue{e, floor_at_one && e == 0};
}

/// Frequency shell with the zero mode assigned to the shell of the grid spacing.
inline DyadicValue frequency_shell(double xi, double spacing) {
  const double a = std::abs(xi);
  return dyadic_shell(a == 0 ? spacing : a, false);
}

}  // namespace kdvb
