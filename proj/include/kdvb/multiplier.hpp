#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <type_traits>
#include <vector>

#include "kdvb/errors.hpp"

namespace kdvb {

/// A point (tau, xi) of R x R.
struct Eta {
  double tau = 0.0;
  double xi = 0.0;
};

/**
 * Samples of a [3; R x R]-multiplier on a lattice slice of Gamma_3.
 *
 * Entry (a1, b1, a2, b2) stands for eta1 = (a1 dtau, b1 dxi),
 * eta2 = (a2 dtau, b2 dxi) and eta3 = -eta1 - eta2, so the constraint holds
 * exactly. Each lattice point of a slot carries the weight dtau dxi.
 */
template <class T = double>
struct MultiplierGrid {
  struct Entry {
    std::int32_t a1, b1, a2, b2;
    T value;
  };

  double dtau = 1.0;
  double dxi = 1.0;
  std::vector<Entry> entries;

  MultiplierGrid() = default;
  MultiplierGrid(double dt, double dx) : dtau(dt), dxi(dx) {
    require(dt > 0 && dx > 0, "lattice spacings must be positive");
  }

  double cell() const { return dtau * dxi; }
  void add(long a1, long b1, long a2, long b2, T v) {
    entries.push_back({static_cast<std::int32_t>(a1), static_cast<std::int32_t>(b1), static_cast<std::int32_t>(a2),
                       static_cast<std::int32_t>(b2), v});
  }
  std::size_t size() const { return entries.size(); }
};

/// A test function on one slot: values on lattice points (a, b).
template <class T>
struct TestFunction {
  std::vector<std::int32_t> a, b;
  std::vector<T> values;
};

template <class T = double>
struct NormEstimate {
  double lower = 0.0;  ///< |T(f1,f2,f3)| / prod ||f_j|| for the certificate
  double upper = 0.0;  ///< unfolding operator norm
  TestFunction<T> certificate[3];
  bool converged = true;
  int iterations = 0;
};

struct NormOptions {
  int restarts = 8;
  int max_iterations = 400;
  double tolerance = 1e-11;
  std::uint64_t seed = 1;
  bool keep_certificate = true;
};

namespace detail {

inline std::uint64_t pack(std::int32_t a, std::int32_t b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}
inline std::int32_t unpack_a(std::uint64_t k) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(k >> 32)); }
inline std::int32_t unpack_b(std::uint64_t k) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(k)); }

// Slot-local indices: point keys per slot and, per entry, its three indices.
struct SlotIndex {
  std::vector<std::uint64_t> keys[3];
  std::vector<std::uint32_t> idx[3];
};

template <class T>
SlotIndex index_slots(const MultiplierGrid<T>& m) {
  SlotIndex s;
  const std::size_t ne = m.entries.size();
  std::vector<std::uint64_t> raw[3];
  for (auto& r : raw) r.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& x = m.entries[e];
    raw[0][e] = pack(x.a1, x.b1);
    raw[1][e] = pack(x.a2, x.b2);
    raw[2][e] = pack(-x.a1 - x.a2, -x.b1 - x.b2);
  }
  for (int j = 0; j < 3; ++j) {
    s.keys[j] = raw[j];
    std::sort(s.keys[j].begin(), s.keys[j].end());
    s.keys[j].erase(std::unique(s.keys[j].begin(), s.keys[j].end()), s.keys[j].end());
    s.idx[j].resize(ne);
    for (std::size_t e = 0; e < ne; ++e)
      s.idx[j][e] = static_cast<std::uint32_t>(
          std::lower_bound(s.keys[j].begin(), s.keys[j].end(), raw[j][e]) - s.keys[j].begin());
  }
  return s;
}

template <class T>
T conj_if(T v) {
  if constexpr (std::is_same_v<T, std::complex<double>>)
    return std::conj(v);
  else
    return v;
}

template <class T>
double abs2(T v) {
  if constexpr (std::is_same_v<T, std::complex<double>>)
    return std::norm(v);
  else
    return v * v;
}

template <class T>
double normalize(std::vector<T>& f) {
  double s = 0;
  for (const auto& v : f) s += abs2(v);
  s = std::sqrt(s);
  if (s > 0)
    for (auto& v : f) v /= s;
  return s;
}

}  // namespace detail

/**
 * Unfolding bound: treating slot j as the output, the unfolded matrix has one
 * entry per column, so its operator norm is the largest row norm.
 */
template <class T>
double unfolding_upper_bound(const MultiplierGrid<T>& m) {
  if (m.entries.empty()) return 0.0;
  const auto s = detail::index_slots(m);
  // Repeated points add up before squaring; slots 0 and 1 fix the point.
  std::vector<std::pair<std::uint64_t, std::size_t>> order(m.entries.size());
  for (std::size_t e = 0; e < m.entries.size(); ++e)
    order[e] = {(static_cast<std::uint64_t>(s.idx[0][e]) << 32) | s.idx[1][e], e};
  std::sort(order.begin(), order.end());
  std::vector<std::size_t> rep;
  std::vector<T> value;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && order[k].first == order[k - 1].first) {
      value.back() += m.entries[order[k].second].value;
      continue;
    }
    rep.push_back(order[k].second);
    value.push_back(m.entries[order[k].second].value);
  }
  double best = INFINITY;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> row(s.keys[j].size(), 0.0);
    for (std::size_t k = 0; k < value.size(); ++k) row[s.idx[j][rep[k]]] += detail::abs2(value[k]);
    best = std::min(best, *std::max_element(row.begin(), row.end()));
  }
  return std::sqrt(m.cell() * best);
}

/**
 * Bounds on the [3; R x R] norm of a lattice multiplier.
 *
 * Lower: alternating maximization of |sum m f1 f2 f3| over unit vectors; the
 * optimal f_j given the other two is conj(g_j)/|g_j| with g_j the partial
 * contraction. The first start is the constant vector, the rest are seeded
 * Gaussian. Values carry the factor sqrt(dtau dxi) of the continuum scaling.
 */
template <class T>
NormEstimate<T> multiplier_norm_estimate(const MultiplierGrid<T>& m, const NormOptions& opt = {}) {
  NormEstimate<T> out;
  if (m.entries.empty()) return out;
  const auto s = detail::index_slots(m);
  const std::size_t ne = m.entries.size();
  const double scale = std::sqrt(m.cell());
  out.upper = unfolding_upper_bound(m);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<T> f[3], g(0);
  std::vector<T> best[3];
  double best_val = -1.0;
  bool all_converged = true;
  int total_iter = 0;

  const int starts = std::max(1, opt.restarts);
  for (int r = 0; r < starts; ++r) {
    for (int j = 0; j < 3; ++j) {
      f[j].assign(s.keys[j].size(), T(1.0));
      if (r > 0)
        for (auto& v : f[j]) {
          if constexpr (std::is_same_v<T, std::complex<double>>)
            v = T(gauss(rng), gauss(rng));
          else
            v = std::abs(gauss(rng)) + 0.1 * gauss(rng);
        }
      detail::normalize(f[j]);
    }
    double val = 0.0, prev = -1.0;
    bool conv = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
      for (int j : {2, 0, 1}) {
        const int k = (j + 1) % 3, l = (j + 2) % 3;
        g.assign(s.keys[j].size(), T(0.0));
        for (std::size_t e = 0; e < ne; ++e)
          g[s.idx[j][e]] += m.entries[e].value * f[k][s.idx[k][e]] * f[l][s.idx[l][e]];
        for (std::size_t i = 0; i < g.size(); ++i) f[j][i] = detail::conj_if(g[i]);
        val = detail::normalize(f[j]);
        if (val == 0.0) {
          // Orthogonal start; fall back to the constant vector.
          f[j].assign(s.keys[j].size(), T(1.0));
          detail::normalize(f[j]);
        }
      }
      if (prev >= 0 && std::abs(val - prev) <= opt.tolerance * std::max(val, 1e-300)) {
        conv = true;
        ++it;
        break;
      }
      prev = val;
    }
    total_iter += it;
    all_converged = all_converged && conv;
    if (val > best_val) {
      best_val = val;
      for (int j = 0; j < 3; ++j) best[j] = f[j];
    }
  }
  out.lower = best_val * scale;
  out.converged = all_converged;
  out.iterations = total_iter;
  if (opt.keep_certificate)
    for (int j = 0; j < 3; ++j) {
      auto& c = out.certificate[j];
      for (std::size_t i = 0; i < s.keys[j].size(); ++i) {
        c.a.push_back(detail::unpack_a(s.keys[j][i]));
        c.b.push_back(detail::unpack_b(s.keys[j][i]));
        c.values.push_back(best[j][i]);
      }
    }
  return out;
}

/// |sum m f1 f2 f3| cell^2 / prod ||f_j||_{L^2} for explicit test functions.
template <class T>
double trilinear_ratio(const MultiplierGrid<T>& m, const TestFunction<T>& f1, const TestFunction<T>& f2,
                       const TestFunction<T>& f3) {
  auto lookup = [](const TestFunction<T>& f) {
    std::vector<std::pair<std::uint64_t, T>> v;
    for (std::size_t i = 0; i < f.values.size(); ++i) v.emplace_back(detail::pack(f.a[i], f.b[i]), f.values[i]);
    std::sort(v.begin(), v.end(), [](auto& x, auto& y) { return x.first < y.first; });
    return v;
  };
  const auto l1 = lookup(f1), l2 = lookup(f2), l3 = lookup(f3);
  auto get = [](const std::vector<std::pair<std::uint64_t, T>>& v, std::uint64_t k) -> T {
    auto it = std::lower_bound(v.begin(), v.end(), k, [](auto& x, std::uint64_t key) { return x.first < key; });
    return (it != v.end() && it->first == k) ? it->second : T(0.0);
  };
  T acc = T(0.0);
  for (const auto& e : m.entries)
    acc += e.value * get(l1, detail::pack(e.a1, e.b1)) * get(l2, detail::pack(e.a2, e.b2)) *
           get(l3, detail::pack(-e.a1 - e.a2, -e.b1 - e.b2));
  auto norm = [](const TestFunction<T>& f) {
    double s = 0;
    for (const auto& v : f.values) s += detail::abs2(v);
    return std::sqrt(s);
  };
  const double den = norm(f1) * norm(f2) * norm(f3);
  return den > 0 ? std::abs(acc) * std::sqrt(m.cell()) / den : 0.0;
}

}  // namespace kdvb
