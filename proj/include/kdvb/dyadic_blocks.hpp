#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "kdvb/grid.hpp"
#include "kdvb/multiplier.hpp"
#include "kdvb/parallel.hpp"
#include "kdvb/stats.hpp"
#include "kdvb/symbols.hpp"

namespace kdvb {

/// Shells |xi_j| ~ N_j, |h(xi)| ~ H, |lambda_j| ~ L_j.
struct DyadicBlock {
  std::array<DyadicValue, 3> N;
  DyadicValue H;
  std::array<DyadicValue, 3> L;

  double n(int j) const { return N[j].value(); }
  double l(int j) const { return L[j].value(); }
  double h() const { return H.value(); }
};

/// Block from numeric shell values (each rounded down to its dyadic shell).
inline DyadicBlock make_block(std::array<double, 3> N, double H, std::array<double, 3> L) {
  DyadicBlock b;
  for (int j = 0; j < 3; ++j) {
    b.N[j] = dyadic_shell(N[j], false);
    b.L[j] = dyadic_shell(L[j], true);
  }
  b.H = dyadic_shell(H, true);
  return b;
}

inline bool in_frequency_shell(double xi, const DyadicValue& N) {
  const double a = std::abs(xi);
  return a > 0 && dyadic_shell(a, false) == N;
}
inline bool in_floor_shell(double x, const DyadicValue& L) { return dyadic_shell(x, true) == L; }

/// 1 iff every |xi_j|, |lambda_j| and |h| lies in its shell of the block.
inline int block_indicator(const Eta& e1, const Eta& e2, const Eta& e3, const DyadicBlock& blk, double alpha,
                           double tol = 1e-9) {
  check_alpha(alpha);
  const double sc = std::max({1.0, std::abs(e1.tau), std::abs(e2.tau), std::abs(e3.tau)});
  require(std::abs(e1.tau + e2.tau + e3.tau) <= tol * sc, "block_indicator: tau1 + tau2 + tau3 != 0");
  const Eta e[3] = {e1, e2, e3};
  for (int j = 0; j < 3; ++j) {
    if (!in_frequency_shell(e[j].xi, blk.N[j])) return 0;
    if (!in_floor_shell(std::abs(modulation_lambda(e[j].tau, e[j].xi, alpha)), blk.L[j])) return 0;
  }
  return in_floor_shell(std::abs(resonance_h(e1.xi, e2.xi, e3.xi, alpha)), blk.H) ? 1 : 0;
}

/// Sorted copies of the three shells.
struct Ordered {
  double max, med, min;
};
inline Ordered ordered(double a, double b, double c) {
  double v[3] = {a, b, c};
  std::sort(v, v + 3);
  return {v[2], v[1], v[0]};
}

/// max{N_max^2 N_min, N_max^(2 alpha)}.
inline double resonance_scale(const DyadicBlock& blk, double alpha) {
  const auto N = ordered(blk.n(0), blk.n(1), blk.n(2));
  return std::max(N.max * N.max * N.min, dissipation_symbol(N.max, alpha));
}

/**
 * Admissibility with constants forced by xi1 + xi2 + xi3 = 0 and
 * lambda1 + lambda2 + lambda3 = -h:
 *   N_max <= 2 N_med,
 *   X/2 < H < 36 X with X = max{N_max^2 N_min, N_max^(2 alpha)} (bottom H: X < 2),
 *   M/4 <= L_max <= 4 M with M = max{H, L_med}.
 * Every nonempty block satisfies all three.
 */
inline bool admissible(const DyadicBlock& blk, double alpha) {
  check_alpha(alpha);
  const auto N = ordered(blk.n(0), blk.n(1), blk.n(2));
  if (N.max > 2.0 * N.med) return false;
  const double X = resonance_scale(blk, alpha);
  const double H = blk.h();
  if (!(X < 2.0 * H)) return false;
  if (!blk.H.bottom && !(H < 36.0 * X)) return false;
  const auto L = ordered(blk.l(0), blk.l(1), blk.l(2));
  const double M = std::max(H, L.med);
  return L.max >= M / 4.0 && L.max <= 4.0 * M;
}

enum class BlockCase { high_modulation, low_2a, low_2b, low_2c };

inline const char* to_string(BlockCase c) {
  switch (c) {
    case BlockCase::high_modulation: return "high-mod";
    case BlockCase::low_2a: return "2a";
    case BlockCase::low_2b: return "2b";
    case BlockCase::low_2c: return "2c";
  }
  return "?";
}

inline std::optional<BlockCase> parse_block_case(const std::string& s) {
  if (s == "high-mod") return BlockCase::high_modulation;
  if (s == "2a") return BlockCase::low_2a;
  if (s == "2b") return BlockCase::low_2b;
  if (s == "2c") return BlockCase::low_2c;
  return std::nullopt;
}

inline int argmin_slot(const std::array<DyadicValue, 3>& v) {
  int j = 0;
  for (int k = 1; k < 3; ++k)
    if (v[k].exponent < v[j].exponent) j = k;
  return j;
}

/**
 * High modulation when L_med >= H. Otherwise 2a when N_min >= N_max/2, 2b when
 * N_min <= N_max/4 and the lowest-frequency slot carries L_max, else 2c.
 */
inline BlockCase classify_block(const DyadicBlock& blk) {
  const auto L = ordered(blk.l(0), blk.l(1), blk.l(2));
  if (L.med >= blk.h()) return BlockCase::high_modulation;
  const auto N = ordered(blk.n(0), blk.n(1), blk.n(2));
  if (N.min >= 0.5 * N.max) return BlockCase::low_2a;
  const int j = argmin_slot(blk.N);
  if (N.min <= 0.25 * N.max && blk.l(j) >= L.max) return BlockCase::low_2b;
  return BlockCase::low_2c;
}

/// Right-hand side of the case bound.
inline double lemma31_bound(const DyadicBlock& blk, double alpha, BlockCase c, double beta = 1.0) {
  check_alpha(alpha);
  require(classify_block(blk) == c, std::string("block does not satisfy the hypotheses of case ") + to_string(c));
  const auto N = ordered(blk.n(0), blk.n(1), blk.n(2));
  const auto L = ordered(blk.l(0), blk.l(1), blk.l(2));
  const double lmin = std::sqrt(L.min);
  if (c == BlockCase::high_modulation) return lmin * std::sqrt(N.min);
  require(alpha > 0, "low-modulation bounds need alpha > 0");
  const double disp = std::pow(L.med, 1.0 / (4.0 * alpha));
  switch (c) {
    case BlockCase::low_2a:
      return lmin * std::min(std::pow(N.max, -0.25) * std::pow(L.med, 0.25), disp);
    case BlockCase::low_2b: {
      require(beta > 0 && beta <= 2, "beta must lie in (0,2]");
      const double n1 = N.min, n2 = N.med;
      const double third =
          std::pow(n2, (beta - 2.0) / (2.0 * beta)) * std::pow(n1, -1.0 / (2.0 * beta)) * std::pow(L.med, 1.0 / (2.0 * beta));
      return lmin * std::min({std::sqrt(n1), disp, third});
    }
    default:
      return lmin * std::min({std::sqrt(L.med) / N.max, disp, std::sqrt(N.min)});
  }
}

// ---------------------------------------------------------------------------
// Lattice support of a block.

/// Lattice tau = a dtau, xi = b dxi.
struct BlockLattice {
  double dtau = 1.0;
  double dxi = 1.0;
};

/// dxi = N_min / r and dtau = 2 L_min / r: the smallest frequency shell and the
/// smallest modulation band each hold r lattice points.
inline BlockLattice block_lattice(const DyadicBlock& blk, int resolution) {
  require(resolution >= 2, "lattice resolution must be >= 2");
  const auto N = ordered(blk.n(0), blk.n(1), blk.n(2));
  const auto L = ordered(blk.l(0), blk.l(1), blk.l(2));
  return {2.0 * L.min / resolution, N.min / resolution};
}

/// Closed integer interval; empty when lo > hi.
struct IntRange {
  long lo = 0, hi = -1;
  bool empty() const { return lo > hi; }
  long size() const { return empty() ? 0 : hi - lo + 1; }
};

inline IntRange intersect(IntRange a, IntRange b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

namespace detail {

inline long long tri(long long k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

// #{(x, y) in [0,A] x [0,B] : x + y <= m}.
inline long long pairs_below(long long A, long long B, long long m) {
  return tri(m) - tri(m - A - 1) - tri(m - B - 1) + tri(m - A - B - 2);
}

}  // namespace detail

/// #{(x, y) in X x Y : p <= x + y <= q}.
inline long long pair_count(IntRange X, IntRange Y, long p, long q) {
  if (X.empty() || Y.empty() || p > q) return 0;
  const long long A = X.hi - X.lo, B = Y.hi - Y.lo, off = X.lo + Y.lo;
  return detail::pairs_below(A, B, q - off) - detail::pairs_below(A, B, p - 1 - off);
}

/// Integer a with |lambda(a dtau, xi)| in shell L: one or two ranges.
struct ModulationBand {
  IntRange r[2];
  int count = 0;
  long long size() const { return (count > 0 ? r[0].size() : 0) + (count > 1 ? r[1].size() : 0); }
};

inline bool in_band(long a, double dtau, double xi, double alpha, const DyadicValue& L) {
  return in_floor_shell(std::abs(modulation_lambda(a * dtau, xi, alpha)), L);
}

/// Ranges found from sigma^2 + d^2 in [L_lo^2, L_hi^2), endpoints settled by the exact predicate.
inline ModulationBand modulation_band(double xi, double dtau, double alpha, const DyadicValue& L) {
  ModulationBand out;
  const double d = dissipation_symbol(xi, alpha);
  const double lo = L.bottom ? 0.0 : L.value(), hi = 2.0 * L.value();
  if (d >= hi) return out;
  const double s_hi = std::sqrt(hi * hi - d * d);
  const double s_lo = lo > d ? std::sqrt(lo * lo - d * d) : 0.0;
  const double c = xi * xi * xi;
  auto settle = [&](double x0, double x1) {
    IntRange r{static_cast<long>(std::ceil((x0 + c) / dtau)), static_cast<long>(std::floor((x1 + c) / dtau))};
    while (r.lo <= r.hi && !in_band(r.lo, dtau, xi, alpha, L)) ++r.lo;
    while (in_band(r.lo - 1, dtau, xi, alpha, L) && r.lo - 1 >= static_cast<long>(std::floor((x0 + c) / dtau)) - 1) --r.lo;
    while (r.hi >= r.lo && !in_band(r.hi, dtau, xi, alpha, L)) --r.hi;
    while (in_band(r.hi + 1, dtau, xi, alpha, L) && r.hi + 1 <= static_cast<long>(std::ceil((x1 + c) / dtau)) + 1) ++r.hi;
    return r;
  };
  if (s_lo == 0.0) {
    out.r[0] = settle(-s_hi, s_hi);
    out.count = out.r[0].empty() ? 0 : 1;
  } else {
    IntRange a = settle(-s_hi, -s_lo), b = settle(s_lo, s_hi);
    if (!a.empty()) out.r[out.count++] = a;
    if (!b.empty()) out.r[out.count++] = b;
  }
  return out;
}

/// Integer b with |b dxi| in shell N, both signs.
inline std::vector<long> shell_indices(const DyadicValue& N, double dxi) {
  std::vector<long> out;
  const long lo = static_cast<long>(std::floor(N.value() / dxi)) - 1;
  const long hi = static_cast<long>(std::ceil(2.0 * N.value() / dxi)) + 1;
  for (long b = std::max(1L, lo); b <= hi; ++b)
    if (in_frequency_shell(b * dxi, N)) {
      out.push_back(b);
      out.push_back(-b);
    }
  std::sort(out.begin(), out.end());
  return out;
}

/// Free slots p, q (the two smallest N) and the determined slot r.
struct SlotOrder {
  int p, q, r;
};
inline SlotOrder slot_order(const DyadicBlock& blk) {
  int idx[3] = {0, 1, 2};
  std::stable_sort(idx, idx + 3, [&](int x, int y) { return blk.N[x].exponent < blk.N[y].exponent; });
  return {idx[0], idx[1], idx[2]};
}

/// A frequency triple of the block and its modulation bands.
struct XiPair {
  long b[3];
  ModulationBand band[3];
  long long count;  ///< tau pairs in the block at these frequencies
};

/// Number of (a_p, a_q) with a_p in P, a_q in Q and -(a_p + a_q) in R.
inline long long band_pair_count(const ModulationBand& P, const ModulationBand& Q, const ModulationBand& R) {
  long long c = 0;
  for (int i = 0; i < P.count; ++i)
    for (int j = 0; j < Q.count; ++j)
      for (int k = 0; k < R.count; ++k) c += pair_count(P.r[i], Q.r[j], -R.r[k].hi, -R.r[k].lo);
  return c;
}

/// All frequency triples of the block with nonzero tau count.
inline std::vector<XiPair> block_xi_pairs(const DyadicBlock& blk, double alpha, const BlockLattice& lat) {
  const SlotOrder o = slot_order(blk);
  const auto bp = shell_indices(blk.N[o.p], lat.dxi);
  const auto bq = shell_indices(blk.N[o.q], lat.dxi);
  std::vector<XiPair> out;
  std::vector<ModulationBand> band_q(bq.size());
  for (std::size_t j = 0; j < bq.size(); ++j) band_q[j] = modulation_band(bq[j] * lat.dxi, lat.dtau, alpha, blk.L[o.q]);
  for (long b1 : bp) {
    const ModulationBand band_p = modulation_band(b1 * lat.dxi, lat.dtau, alpha, blk.L[o.p]);
    if (band_p.count == 0) continue;
    for (std::size_t j = 0; j < bq.size(); ++j) {
      const long b2 = bq[j];
      if (band_q[j].count == 0) continue;
      const long b3 = -b1 - b2;
      const double x1 = b1 * lat.dxi, x2 = b2 * lat.dxi, x3 = b3 * lat.dxi;
      if (!in_frequency_shell(x3, blk.N[o.r])) continue;
      if (!in_floor_shell(std::abs(resonance_h(x1, x2, x3, alpha)), blk.H)) continue;
      const ModulationBand band_r = modulation_band(x3, lat.dtau, alpha, blk.L[o.r]);
      if (band_r.count == 0) continue;
      const long long c = band_pair_count(band_p, band_q[j], band_r);
      if (c == 0) continue;
      XiPair xp;
      xp.b[0] = b1;
      xp.b[1] = b2;
      xp.b[2] = b3;
      xp.band[0] = band_p;
      xp.band[1] = band_q[j];
      xp.band[2] = band_r;
      xp.count = c;
      out.push_back(xp);
    }
  }
  return out;
}

/// Exact number of lattice points of Gamma_3 in the block.
inline long long block_support_count(const DyadicBlock& blk, double alpha, const BlockLattice& lat) {
  long long c = 0;
  for (const auto& x : block_xi_pairs(blk, alpha, lat)) c += x.count;
  return c;
}

/**
 * Unfolding bound for the whole lattice block with the tau constraint of the
 * fibre relaxed: for eta_j fixed the partner taus form at most
 * min(|band_k|, |band_l|) points, so the row norm is at most the sum of that
 * over admissible partner frequencies.
 */
inline double block_upper_bound(const DyadicBlock& blk, double alpha, const BlockLattice& lat) {
  std::array<std::vector<long>, 3> b;
  std::array<std::map<long, long long>, 3> band;
  for (int j = 0; j < 3; ++j) {
    b[j] = shell_indices(blk.N[j], lat.dxi);
    for (long x : b[j]) band[j][x] = modulation_band(x * lat.dxi, lat.dtau, alpha, blk.L[j]).size();
  }
  double best = INFINITY;
  for (int j = 0; j < 3; ++j) {
    const int k = (j + 1) % 3, l = (j + 2) % 3;
    // Iterate partners over the smaller of the two other shells.
    const int it = b[k].size() <= b[l].size() ? k : l;
    const int other = it == k ? l : k;
    long long worst = 0;
    for (long bj : b[j]) {
      if (band[j][bj] == 0) continue;
      long long row = 0;
      for (long bi : b[it]) {
        const long bo = -bj - bi;
        auto f = band[other].find(bo);
        if (f == band[other].end() || f->second == 0 || band[it][bi] == 0) continue;
        double xi3[3];
        xi3[j] = bj * lat.dxi;
        xi3[it] = bi * lat.dxi;
        xi3[other] = bo * lat.dxi;
        if (!in_floor_shell(std::abs(resonance_h(xi3[0], xi3[1], xi3[2], alpha)), blk.H)) continue;
        row += std::min(band[it][bi], f->second);
      }
      worst = std::max(worst, row);
    }
    best = std::min(best, static_cast<double>(worst));
  }
  return std::sqrt(lat.dtau * lat.dxi * best);
}

/// Box of lattice points used when a block is too large to enumerate.
struct BlockWindow {
  IntRange b[2];  ///< frequency windows of the free slots p, q
  IntRange a[2];  ///< tau windows of the free slots p, q
};

inline long long window_count(const std::vector<XiPair>& pairs, const BlockWindow& w) {
  long long c = 0;
  for (const auto& x : pairs) {
    if (x.b[0] < w.b[0].lo || x.b[0] > w.b[0].hi || x.b[1] < w.b[1].lo || x.b[1] > w.b[1].hi) continue;
    ModulationBand P = x.band[0], Q = x.band[1];
    for (int i = 0; i < P.count; ++i) P.r[i] = intersect(P.r[i], w.a[0]);
    for (int i = 0; i < Q.count; ++i) Q.r[i] = intersect(Q.r[i], w.a[1]);
    c += band_pair_count(P, Q, x.band[2]);
  }
  return c;
}

/// Lattice indicator of the block, restricted to a window when given.
inline MultiplierGrid<double> block_multiplier(const std::vector<XiPair>& pairs, const BlockLattice& lat,
                                               const std::optional<BlockWindow>& w) {
  MultiplierGrid<double> m(lat.dtau, lat.dxi);
  for (const auto& x : pairs) {
    ModulationBand P = x.band[0], Q = x.band[1];
    if (w) {
      if (x.b[0] < w->b[0].lo || x.b[0] > w->b[0].hi || x.b[1] < w->b[1].lo || x.b[1] > w->b[1].hi) continue;
      for (int i = 0; i < P.count; ++i) P.r[i] = intersect(P.r[i], w->a[0]);
      for (int i = 0; i < Q.count; ++i) Q.r[i] = intersect(Q.r[i], w->a[1]);
    }
    for (int i = 0; i < P.count; ++i)
      for (long a1 = P.r[i].lo; a1 <= P.r[i].hi; ++a1)
        for (int j = 0; j < Q.count; ++j)
          for (int k = 0; k < x.band[2].count; ++k) {
            // -(a1 + a2) in R  <=>  a2 in [-R.hi - a1, -R.lo - a1].
            const IntRange a2 = intersect(Q.r[j], {-x.band[2].r[k].hi - a1, -x.band[2].r[k].lo - a1});
            for (long v = a2.lo; v <= a2.hi; ++v) m.add(a1, x.b[0], v, x.b[1], 1.0);
          }
  }
  return m;
}

/**
 * Window around the densest frequency pair: +-r/2 lattice points in each free
 * frequency, tau windows halved around a supported point until the count fits.
 */
inline BlockWindow choose_window(const std::vector<XiPair>& pairs, int resolution, long long budget) {
  const auto it = std::max_element(pairs.begin(), pairs.end(),
                                   [](const XiPair& x, const XiPair& y) { return x.count < y.count; });
  const XiPair& c = *it;
  BlockWindow w;
  const long half = std::max(1, resolution / 2);
  for (int s = 0; s < 2; ++s) w.b[s] = {c.b[s] - half, c.b[s] + half - 1};
  // A supported (a_p, a_q) at the centre pair.
  const IntRange P = c.band[0].r[0];
  const long ap = P.lo + (P.hi - P.lo) / 2;
  long aq = 0;
  bool found = false;
  for (int pass = 0; pass < 2 && !found; ++pass)
    for (long a1 = (pass == 0 ? ap : P.lo); a1 <= P.hi && !found; ++a1)
      for (int j = 0; j < c.band[1].count && !found; ++j)
        for (int k = 0; k < c.band[2].count && !found; ++k) {
          const IntRange a2 = intersect(c.band[1].r[j], {-c.band[2].r[k].hi - a1, -c.band[2].r[k].lo - a1});
          if (!a2.empty()) {
            aq = a2.lo + (a2.hi - a2.lo) / 2;
            w.a[0] = {a1, a1};
            found = true;
          }
        }
  const long cp = w.a[0].lo;
  long wide = 1;
  for (const auto& x : pairs)
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < x.band[s].count; ++i) wide = std::max(wide, x.band[s].r[i].size());
  for (long h = wide; h >= 1; h /= 2) {
    w.a[0] = {cp - h, cp + h};
    w.a[1] = {aq - h, aq + h};
    if (window_count(pairs, w) <= budget) break;
  }
  return w;
}

struct BlockEstimate {
  DyadicBlock block;
  BlockCase kind = BlockCase::high_modulation;
  long long support = 0;  ///< exact lattice support of the whole block
  long long used = 0;     ///< entries handed to the norm estimate
  bool windowed = false;
  double lower = 0, upper = 0;
  double bound = 0;
  double ratio = 0;  ///< lower / bound
};

struct Lemma31Options {
  int resolution = 32;
  long long entry_budget = 200000;
  NormOptions norm{4, 200, 1e-7, 1, false};
  double beta = 1.0;
};

inline BlockEstimate estimate_block(const DyadicBlock& blk, double alpha, const Lemma31Options& opt) {
  BlockEstimate r;
  r.block = blk;
  r.kind = classify_block(blk);
  r.bound = lemma31_bound(blk, alpha, r.kind, opt.beta);
  const BlockLattice lat = block_lattice(blk, opt.resolution);
  const auto pairs = block_xi_pairs(blk, alpha, lat);
  for (const auto& x : pairs) r.support += x.count;
  if (r.support == 0) return r;
  r.upper = block_upper_bound(blk, alpha, lat);
  std::optional<BlockWindow> w;
  if (r.support > opt.entry_budget) {
    w = choose_window(pairs, opt.resolution, opt.entry_budget);
    r.windowed = true;
  }
  const auto m = block_multiplier(pairs, lat, w);
  r.used = static_cast<long long>(m.size());
  const auto est = multiplier_norm_estimate(m, opt.norm);
  r.lower = est.lower;
  r.ratio = r.bound > 0 ? r.lower / r.bound : 0.0;
  return r;
}

/// Shell ranges of a sweep: N_j = 2^e for e in [n_lo, n_hi], L_j and H up to 2^l_hi.
struct ShellRanges {
  int n_lo = -2;
  int n_hi = 6;
  int l_hi = 10;
  int h_hi = 12;
  bool empty() const { return n_lo > n_hi || l_hi < 0 || h_hi < 0; }
};

/// All admissible blocks of the ranges (H and L start at the bottom shell 1).
inline std::vector<DyadicBlock> admissible_blocks(const ShellRanges& sr, double alpha) {
  std::vector<DyadicBlock> out;
  if (sr.empty()) return out;
  for (int e1 = sr.n_lo; e1 <= sr.n_hi; ++e1)
    for (int e2 = sr.n_lo; e2 <= sr.n_hi; ++e2)
      for (int e3 = sr.n_lo; e3 <= sr.n_hi; ++e3)
        for (int h = 0; h <= sr.h_hi; ++h)
          for (int l1 = 0; l1 <= sr.l_hi; ++l1)
            for (int l2 = 0; l2 <= sr.l_hi; ++l2)
              for (int l3 = 0; l3 <= sr.l_hi; ++l3) {
                DyadicBlock b;
                b.N = {dyadic(e1), dyadic(e2), dyadic(e3)};
                b.H = DyadicValue{h, h == 0};
                b.L = {DyadicValue{l1, l1 == 0}, DyadicValue{l2, l2 == 0}, DyadicValue{l3, l3 == 0}};
                if (admissible(b, alpha)) out.push_back(b);
              }
  return out;
}

struct Lemma31Report {
  double alpha = 1.0;
  ShellRanges ranges;
  int resolution = 32;
  std::size_t admissible_total = 0;
  std::vector<BlockEstimate> blocks;
  double fitted_C = 0;       ///< max lower/bound over the sweep
  std::vector<std::pair<double, double>> C_by_Nmax;  ///< (N_max, max ratio)
  std::vector<std::pair<double, double>> C_by_Lmax;  ///< (L_max, max ratio)
  double slope_N = 0;        ///< slope of log C vs log N_max
  double slope_L = 0;        ///< slope of log C vs log L_max
  std::size_t inadmissible_checked = 0;
  long long inadmissible_support = 0;  ///< total lattice support over sampled inadmissible blocks
};

struct Lemma31SweepOptions {
  Lemma31Options block;
  int per_stratum = 1;
  int max_draws = 64;  ///< candidates examined per stratum
  int inadmissible_samples = 200;
  std::uint64_t seed = 1;
  unsigned workers = 0;  ///< 0: hardware concurrency
};

namespace detail {
inline std::vector<std::pair<double, double>> max_by(const std::vector<BlockEstimate>& v, bool by_N) {
  std::map<int, double> m;
  for (const auto& b : v) {
    if (b.support == 0) continue;
    int e = INT32_MIN;
    for (int j = 0; j < 3; ++j) e = std::max(e, by_N ? b.block.N[j].exponent : b.block.L[j].exponent);
    m[e] = std::max(m.count(e) ? m[e] : 0.0, b.ratio);
  }
  std::vector<std::pair<double, double>> out;
  for (auto [e, c] : m) out.emplace_back(std::ldexp(1.0, e), c);
  return out;
}

inline double log_slope(const std::vector<std::pair<double, double>>& v) {
  std::vector<double> x, y;
  for (auto [a, c] : v)
    if (c > 0) {
      x.push_back(std::log(a));
      y.push_back(std::log(c));
    }
  return x.size() >= 2 ? fit_line(x, y).slope : 0.0;
}
}  // namespace detail

/**
 * Stratified sweep: per (N_max, L_max, case) stratum a seeded sample of admissible
 * blocks is estimated; inadmissible near-misses (one shell of an admissible
 * block moved) are checked for empty support.
 */
inline Lemma31Report verify_lemma31(double alpha, const ShellRanges& sr, const Lemma31SweepOptions& opt) {
  Lemma31Report rep;
  rep.alpha = alpha;
  rep.ranges = sr;
  rep.resolution = opt.block.resolution;
  const auto all = admissible_blocks(sr, alpha);
  rep.admissible_total = all.size();
  if (all.empty()) return rep;

  std::map<std::tuple<int, int, int>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& b = all[i];
    const int en = std::max({b.N[0].exponent, b.N[1].exponent, b.N[2].exponent});
    const int el = std::max({b.L[0].exponent, b.L[1].exponent, b.L[2].exponent});
    strata[{en, el, static_cast<int>(classify_block(b))}].push_back(i);
  }
  std::mt19937_64 rng(opt.seed);
  std::vector<DyadicBlock> chosen;
  for (auto& [key, idx] : strata) {
    std::shuffle(idx.begin(), idx.end(), rng);
    // Most admissible blocks have no lattice points; draw until the stratum is filled.
    const std::size_t tries = std::min(idx.size(), static_cast<std::size_t>(opt.max_draws));
    std::vector<DyadicBlock> cand;
    for (std::size_t i = 0; i < tries; ++i) cand.push_back(all[idx[i]]);
    const auto counts = parallel_map(
        cand, [&](const DyadicBlock& b) { return block_support_count(b, alpha, block_lattice(b, opt.block.resolution)); },
        opt.workers);
    int taken = 0;
    for (std::size_t i = 0; i < cand.size() && taken < opt.per_stratum; ++i)
      if (counts[i] > 0) {
        chosen.push_back(cand[i]);
        ++taken;
      }
  }
  rep.blocks = parallel_map(chosen, [&](const DyadicBlock& b) { return estimate_block(b, alpha, opt.block); },
                            opt.workers);

  for (const auto& b : rep.blocks) rep.fitted_C = std::max(rep.fitted_C, b.ratio);
  rep.C_by_Nmax = detail::max_by(rep.blocks, true);
  rep.C_by_Lmax = detail::max_by(rep.blocks, false);
  rep.slope_N = detail::log_slope(rep.C_by_Nmax);
  rep.slope_L = detail::log_slope(rep.C_by_Lmax);

  // Near misses: shift one shell of a random admissible block until inadmissible.
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  std::uniform_int_distribution<int> which(0, 6), step(0, 1);
  std::vector<DyadicBlock> bad;
  int guard = 0;
  while (static_cast<int>(bad.size()) < opt.inadmissible_samples && guard++ < 100 * opt.inadmissible_samples) {
    DyadicBlock b = all[pick(rng)];
    const int w = which(rng), dir = step(rng) ? 1 : -1;
    DyadicValue& v = w < 3 ? b.N[w] : (w == 3 ? b.H : b.L[w - 4]);
    v.exponent += dir;
    if (w >= 3) {
      if (v.exponent < 0) continue;
      v.bottom = v.exponent == 0;
    }
    if (!admissible(b, alpha)) bad.push_back(b);
  }
  const auto counts = parallel_map(
      bad, [&](const DyadicBlock& b) { return block_support_count(b, alpha, block_lattice(b, opt.block.resolution)); },
      opt.workers);
  rep.inadmissible_checked = bad.size();
  for (long long c : counts) rep.inadmissible_support += c;
  return rep;
}

}  // namespace kdvb
