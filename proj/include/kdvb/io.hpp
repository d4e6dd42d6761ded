#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "kdvb/errors.hpp"
#include "kdvb/grid.hpp"

#ifndef KDVB_VERSION
#define KDVB_VERSION "0.1.0"
#endif

namespace kdvb {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Resolved configuration of a run as ordered key/value pairs.
struct RunInfo {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;

  std::string canonical() const {
    std::string s = command;
    for (const auto& [k, v] : config) s += "\n" + k + "=" + v;
    return s;
  }
  std::string hash() const { return hex64(fnv1a(canonical())); }

  nlohmann::ordered_json header() const {
    nlohmann::ordered_json h;
    h["artifact"] = "kdvb";
    h["version"] = KDVB_VERSION;
    h["command"] = command;
    h["config_hash"] = hash();
    h["seed"] = seed;
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) c[k] = v;
    h["config"] = c;
    return h;
  }

  std::string comment_header(const char* prefix = "# ") const {
    std::ostringstream os;
    os << prefix << "kdvb " << KDVB_VERSION << " " << command << "\n";
    os << prefix << "config_hash " << hash() << " seed " << seed << "\n";
    for (const auto& [k, v] : config) os << prefix << k << " = " << v << "\n";
    return os.str();
  }
};

/// Shortest representation that round-trips.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << body;
  if (!os) throw std::runtime_error("write failed: " + path);
}

/// CSV with the run header as '#' comments.
inline std::string csv_table(const RunInfo& info, const std::vector<std::string>& columns,
                             const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os << info.comment_header();
  for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << columns[j];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << fmt(r[j]);
    os << "\n";
  }
  return os.str();
}

/// Two columns (x, y) for gnuplot.
inline std::string plot_data(const RunInfo& info, const std::vector<std::pair<double, double>>& xy) {
  std::ostringstream os;
  os << info.comment_header();
  for (auto [x, y] : xy) os << fmt(x) << " " << fmt(y) << "\n";
  return os.str();
}

namespace detail {
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& out, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  put_u64(out, u);
}
inline std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
  require(pos + 8 <= in.size(), "truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 8;
  return v;
}
inline double get_f64(const std::string& in, std::size_t& pos) {
  const std::uint64_t u = get_u64(in, pos);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}
}  // namespace detail

/**
 * Little-endian spectral snapshot: uint64 n, f64 half_width, f64 t, then n
 * (re, im) f64 pairs in ascending frequency order. Snapshots are concatenated.
 */
inline std::string encode_snapshot(const SpectralField& f, double t) {
  const Grid1D& g = f.grid;
  std::string out;
  detail::put_u64(out, g.size());
  detail::put_f64(out, g.half_width());
  detail::put_f64(out, t);
  const long n = static_cast<long>(g.size());
  for (long k = -n / 2; k < n / 2; ++k) {
    const cplx c = f[g.index_of(k)];
    detail::put_f64(out, c.real());
    detail::put_f64(out, c.imag());
  }
  return out;
}

struct Snapshot {
  double t = 0.0;
  SpectralField field;
};

inline std::vector<Snapshot> decode_snapshots(const std::string& in) {
  std::vector<Snapshot> out;
  std::size_t pos = 0;
  while (pos < in.size()) {
    const std::uint64_t n = detail::get_u64(in, pos);
    const double hw = detail::get_f64(in, pos);
    const double t = detail::get_f64(in, pos);
    const Grid1D g(n, hw);
    SpectralField f(g);
    const long nn = static_cast<long>(n);
    for (long k = -nn / 2; k < nn / 2; ++k) {
      const double re = detail::get_f64(in, pos), im = detail::get_f64(in, pos);
      f[g.index_of(k)] = cplx(re, im);
    }
    out.push_back({t, std::move(f)});
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace kdvb
