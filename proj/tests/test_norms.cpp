#include <gtest/gtest.h>

#include <random>

#include "kdvb/data.hpp"
#include "kdvb/norms.hpp"
#include "kdvb/symbols.hpp"

using namespace kdvb;

TEST(Sobolev, Examples) {
  const Grid1D g(1024, 64.0);
  EXPECT_EQ(sobolev_norm(SpectralField(g), 1.0), 0.0);
  SpectralField chi(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.frequency(i) >= 0 && g.frequency(i) < 1) chi[i] = 1.0;
  EXPECT_NEAR(sobolev_norm(chi, 0.0), 1.0, 1e-14);
}

TEST(Sobolev, MonotoneInIndex) {
  const Grid1D g(256, 2.0);
  const auto phi = rough_random(g, 0.6, 1);
  double prev = 0;
  for (double s : {-2.0, -1.0, -0.3, 0.0, 0.4, 1.0, 2.0}) {
    const double v = sobolev_norm(phi, s);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Psi, Examples) {
  EXPECT_EQ(cutoff_psi(0.5, 1), 1.0);
  EXPECT_EQ(cutoff_psi(3, 1), 0.0);
  const double v = cutoff_psi(2.5, 2);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_THROW(cutoff_psi(0.0, 0.0), InvalidArgument);
  EXPECT_THROW(cutoff_psi(0.0, -1.0), InvalidArgument);
}

TEST(Psi, PlateauSupportAndRange) {
  for (double T : {0.3, 1.0, 2.5})
    for (int i = -400; i <= 400; ++i) {
      const double t = i * 3.0 * T / 400;
      const double v = cutoff_psi(t, T);
      if (std::abs(t) <= T) EXPECT_EQ(v, 1.0);
      if (std::abs(t) >= 2 * T) EXPECT_EQ(v, 0.0);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_EQ(v, cutoff_psi(-t, T));
    }
}

TEST(Psi, MonotoneOnTransition) {
  double prev = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = cutoff_psi(1.0 + i / 1000.0, 1.0);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(Triangle, Examples) {
  EXPECT_TRUE(triangle_weight_check(0, 0, 0, -1));
  EXPECT_TRUE(triangle_weight_check(10, 10, -0.5, -1));
  EXPECT_THROW(triangle_weight_check(1, 1, -1, -0.5), InvalidArgument);
}

TEST(Triangle, RandomSweep) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x(-1e3, 1e3), sc(-1, -0.5), gap(0, 3);
  for (int i = 0; i < 20000; ++i) {
    const double c = sc(rng), s = c + gap(rng);
    EXPECT_TRUE(triangle_weight_check(x(rng), x(rng), s, c));
  }
}

TEST(Bourgain, ZeroField) {
  SpaceTimeGrid g;
  g.space = Grid1D(16, 1.0);
  g.nt = 32;
  SpaceTimeField u;
  u.grid = g;
  u.coeffs.assign(16 * 32, 0.0);
  EXPECT_EQ(bourgain_norm(u, 0.5, 1.0, 1.0), 0.0);
}

TEST(Bourgain, PlancherelAtZeroWeights) {
  SpaceTimeGrid g;
  g.space = Grid1D(32, 1.0);
  g.window = 8;
  g.nt = 64;
  const auto phi = smooth_random(g.space, 5, 1.0, 2);
  std::vector<SpectralField> samples;
  double acc = 0;
  for (std::size_t j = 0; j < g.nt; ++j) {
    samples.push_back(semigroup_W(g.t(j), phi, 1.0));
    acc += std::pow(sobolev_norm(samples.back(), 0.0), 2) * g.dt();
  }
  for (Frame fr : {Frame::lab, Frame::interaction}) {
    const auto u = space_time_transform(g, samples, fr);
    EXPECT_NEAR(bourgain_norm(u, 0.0, 0.0, 1.0), std::sqrt(acc / (2 * pi)), 1e-12);
  }
}

TEST(Bourgain, ZeroModulationWeightIsSobolevInXiL2InTau) {
  SpaceTimeGrid g;
  g.space = Grid1D(32, 1.0);
  g.nt = 64;
  const auto phi = smooth_random(g.space, 6, 1.0, 12);
  std::vector<SpectralField> samples;
  double acc = 0;
  for (std::size_t j = 0; j < g.nt; ++j) {
    samples.push_back(semigroup_W(g.t(j), phi, 0.5));
    acc += std::pow(sobolev_norm(samples.back(), 1.5), 2) * g.dt();
  }
  const auto u = space_time_transform(g, samples, Frame::lab);
  EXPECT_NEAR(bourgain_norm(u, 0.0, 1.5, 0.5), std::sqrt(acc / (2 * pi)), 1e-11);
}

TEST(Bourgain, FramesAgreeOnResolvedData) {
  // Low modes only, fine time sampling: both frames see the same weighted norm.
  SpaceTimeGrid g;
  g.space = Grid1D(16, 1.0);
  g.window = 8;
  g.nt = 1024;
  const auto phi = smooth_random(g.space, 2, 1.0, 6);
  const auto a = bourgain_norm(cutoff_linear_flow(phi, 1.0, 1.0, g), 0.5, 0.0, 1.0);
  std::vector<SpectralField> samples;
  for (std::size_t j = 0; j < g.nt; ++j) {
    const double t = g.t(j);
    auto f = semigroup_W(t, phi, 1.0);
    for (auto& c : f.coeffs) c *= cutoff_psi(t, 1.0);
    samples.push_back(f);
  }
  const auto b = bourgain_norm(space_time_transform(g, samples, Frame::lab), 0.5, 0.0, 1.0);
  EXPECT_NEAR(a, b, 1e-3 * a);
}

TEST(Bourgain, LinearEstimateConstantIsModerate) {
  SpaceTimeGrid g;
  g.space = Grid1D(64, 2.0);
  g.window = 8;
  g.nt = 256;
  double C = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto phi = rough_random(g.space, 1.0 + 0.1 * seed, seed);
    const double x = bourgain_norm(cutoff_linear_flow(phi, 1.0, 1.0, g), 0.5, 0.5, 1.0);
    C = std::max(C, x / sobolev_norm(phi, 0.5));
  }
  EXPECT_GT(C, 0.0);
  EXPECT_LE(C, 10.0);
}
