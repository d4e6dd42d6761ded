#include <gtest/gtest.h>

#include "kdvb/illposedness.hpp"

using namespace kdvb;

namespace {

// Simpson on [a, b] with an even number of panels.
template <class F>
cplx simpson(F f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  cplx acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

// i xi N^-2s int_{K_xi} int_0^t exp((t-t') L(xi) + t' (L(xi1) + L(xi-xi1))) dt' dxi1.
cplx brute_spectrum(double N, double s, double alpha, double t, double xi) {
  auto L = [&](double x) { return cplx(-dissipation_symbol(x, alpha), x * x * x); };
  auto inner = [&](double x1) {
    return simpson([&](double tp) { return std::exp((t - tp) * L(xi) + tp * (L(x1) + L(xi - x1))); }, 0.0, t, 400);
  };
  cplx acc = 0;
  for (auto [a, b] : interaction_intervals(N, xi)) acc += simpson(inner, a, b, 800);
  return cplx(0, xi) * std::pow(N, -2 * s) * acc;
}

}  // namespace

TEST(PhiN, RealEvenAndNormalized) {
  const Grid1D g(4096, 8);
  const auto f = phi_N(16, 0, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(f[i].imag(), 0.0);
    const long k = g.wavenumber(i);
    if (k > -static_cast<long>(g.size() / 2)) EXPECT_EQ(f[i], f[g.index_of(-k)]);
  }
  // Whole-line norms: 2 for s = 0, N (2 (atan(N+2) - atan N))^(1/2) for s = -1.
  // Grid points sit on N and N+2, so the four edge cells hold 1/2 and add
  // dxi/4 each to the square instead of dxi/2: 4 - 1/Lambda.
  EXPECT_NEAR(sobolev_norm(f, 0), std::sqrt(4.0 - 1.0 / 8), 1e-12);
  const double exact = 16 * std::sqrt(2 * (std::atan(18.0) - std::atan(16.0)));
  EXPECT_NEAR(sobolev_norm(phi_N(16, -1, g), -1) / exact, 1.0, 0.02);
}

TEST(PhiN, RejectsCoarseOrShortGrids) {
  EXPECT_THROW(phi_N(16, 0, Grid1D(4096, 2)), InvalidArgument);
  EXPECT_THROW(phi_N(100, 0, Grid1D(1024, 8)), InvalidArgument);
  EXPECT_THROW(phi_N(0.5, 0, Grid1D(4096, 8)), InvalidArgument);
}

TEST(SecondIterate, ZeroAtStartAndAtOrigin) {
  EXPECT_EQ(second_iterate_spectrum(16, -2, 1, 0.0, 0.25), cplx(0.0));
  EXPECT_EQ(second_iterate_spectrum(16, -2, 1, 0.1, 0.0), cplx(0.0));
}

TEST(SecondIterate, MatchesBruteQuadrature) {
  for (double alpha : {0.5, 1.0})
    for (double xi : {0.1, 0.25, 0.5, 1.5}) {
      const cplx a = second_iterate_spectrum(8, -1, alpha, 0.1, xi);
      const cplx b = brute_spectrum(8, -1, alpha, 0.1, xi);
      EXPECT_LT(std::abs(a - b), 1e-6 * std::abs(b)) << alpha << " " << xi;
    }
}

TEST(SecondIterate, MatchesPicardIterateOnGrid) {
  const double N = 16, s = -2, t = 0.1, eps = 1e-4;
  const Grid1D g(2048, 16);
  SpectralField phi = phi_N(N, s, g);
  for (auto& c : phi.coeffs) c *= eps;
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.record_every = 1000;
  EquationParams p;
  p.alpha = 1;
  p.s = s;
  const auto res = picard_iterate(phi, t, 1, p, cfg);
  const auto& u = res.trajectory.states.back();
  ASSERT_NEAR(res.trajectory.times.back(), t, 1e-12);
  for (long k : {2L, 4L, 8L}) {
    const double xi = k * g.spacing();
    const cplx want = -0.5 * eps * eps * second_iterate_spectrum(N, s, 1, t, xi);
    EXPECT_LT(std::abs(u[g.index_of(k)] - want), 0.01 * std::abs(want)) << xi;
  }
}

TEST(Inflation, ClosedFormBound) {
  // 16^2 (exp(-0.025) - exp(-64.8)).
  EXPECT_NEAR(inflation_lower_bound(16, -2, 1, 0.1), 249.6787, 1e-3);
  EXPECT_THROW(inflation_lower_bound(0.5, -2, 1, 0.1), InvalidArgument);
  EXPECT_THROW(inflation_lower_bound(16, -2, 1, 0.0), InvalidArgument);
}

TEST(Inflation, InteractionSet) {
  for (double N : {1.0, 16.0, 300.0})
    for (double xi = -0.5; xi <= 0.5; xi += 0.05) EXPECT_GE(interaction_set_measure(N, xi), 1.0 - 1e-12);
  // Same-sign pairs only meet near 2N.
  EXPECT_NEAR(interaction_set_measure(16, 33), 1.0, 1e-12);
  EXPECT_EQ(interaction_set_measure(16, 10), 0.0);
}

TEST(Inflation, ResonanceMagnitudes) {
  const auto r = resonance_magnitudes(16, 0.25, 17, 1.0);
  const double x2 = 0.25 - 17;
  EXPECT_NEAR(r.cubic, -3 * 0.25 * 17 * x2, 1e-9);
  EXPECT_NEAR(r.dissipative, 17 * 17 + x2 * x2 - 0.0625, 1e-9);
  EXPECT_NEAR(r.cubic, 17 * 17 * 17 + x2 * x2 * x2 - 0.25 * 0.25 * 0.25, 1e-8);
  EXPECT_THROW(resonance_magnitudes(16, 0.75, 17, 1.0), InvalidArgument);
  EXPECT_THROW(resonance_magnitudes(16, 0.25, 5, 1.0), InvalidArgument);
}

TEST(Inflation, EmptyList) {
  const auto rep = inflation_experiment(-1.5, 1, 0.1, {});
  EXPECT_TRUE(rep.rows.empty());
  EXPECT_EQ(rep.slope, 0.0);
}

TEST(Inflation, SlopeFollowsRegularity) {
  const auto rep = inflation_experiment(-2, 1, 0.1, {16, 32, 64}, {8192, 4}, 0.05, 1);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_NEAR(rep.slope, -2 * -2 - 2, 0.1);
  for (const auto& r : rep.rows) EXPECT_GE(r.restricted_norm, r.intermediate_bound * 0.99);
  EXPECT_FALSE(rep.bounded_ratio);
}

TEST(Inflation, DegenerateRegularity) {
  // s = -1: the bound is flat in N.
  const auto rep = inflation_experiment(-1, 1, 0.1, {16, 64}, {8192, 4}, 0.05, 1);
  EXPECT_NEAR(rep.slope, 0.0, 0.1);
  EXPECT_NEAR(inflation_lower_bound(16, -1, 1, 0.1), inflation_lower_bound(64, -1, 1, 0.1), 1e-12);
}
