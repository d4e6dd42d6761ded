#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kdvb/bilinear.hpp"
#include "kdvb/data.hpp"
#include "kdvb/dyadic_blocks.hpp"
#include "kdvb/illposedness.hpp"
#include "kdvb/io.hpp"
#include "kdvb/norms.hpp"
#include "kdvb/solver.hpp"

namespace kdvb {

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_invariant = 2, exit_blowup = 3 };

namespace cli {

using ojson = nlohmann::ordered_json;

/// Flags shared by every subcommand; zero sizes mean "command default".
struct Common {
  double alpha = 1.0;
  double s = NAN;  ///< unset: per-command default
  std::size_t grid_n = 0;
  double half_width = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  unsigned workers = 0;
};

struct DataOpts {
  std::string kind = "smooth";
  long kmax = 8;
  double amplitude = 1.0;
  double decay = 0.6;
};

inline void add_data_opts(CLI::App* c, DataOpts& d) {
  c->add_option("--data", d.kind, "initial data: zero, smooth, rough")
      ->check(CLI::IsMember({"zero", "smooth", "rough"}))
      ->capture_default_str();
  c->add_option("--kmax", d.kmax, "highest wavenumber of smooth data")->capture_default_str();
  c->add_option("--amplitude", d.amplitude, "L2 norm of smooth data")->capture_default_str();
  c->add_option("--decay", d.decay, "rough data spectrum <xi>^-decay")->capture_default_str();
}

inline SpectralField make_data(const Grid1D& g, const DataOpts& d, std::uint64_t seed) {
  if (d.kind == "zero") return SpectralField(g);
  if (d.kind == "rough") return rough_random(g, d.decay, seed);
  return smooth_random(g, d.kmax, d.amplitude, seed);
}

inline void data_config(RunInfo& info, const DataOpts& d) {
  info.config.emplace_back("data", d.kind);
  info.config.emplace_back("kmax", std::to_string(d.kmax));
  info.config.emplace_back("amplitude", fmt(d.amplitude));
  info.config.emplace_back("decay", fmt(d.decay));
}

inline RunInfo base_info(const std::string& cmd, const Common& c) {
  RunInfo info;
  info.command = cmd;
  info.seed = c.seed;
  info.config = {{"alpha", fmt(c.alpha)}};
  if (!std::isnan(c.s)) info.config.emplace_back("s", fmt(c.s));
  info.config.emplace_back("grid_n", std::to_string(c.grid_n));
  info.config.emplace_back("half_width", fmt(c.half_width));
  info.config.emplace_back("format", c.format);
  return info;
}

inline std::string out_prefix(const Common& c, const std::string& cmd) { return c.out.empty() ? cmd : c.out; }

/// Table as CSV, or as JSON together with the summary.
inline void write_report(const Common& c, const std::string& cmd, const RunInfo& info,
                         const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows,
                         const ojson& summary) {
  const std::string base = out_prefix(c, cmd);
  if (c.format == "json") {
    ojson j;
    j["header"] = info.header();
    j["summary"] = summary;
    ojson arr = ojson::array();
    for (const auto& r : rows) {
      ojson o;
      for (std::size_t k = 0; k < columns.size(); ++k) o[columns[k]] = r[k];
      arr.push_back(o);
    }
    j["rows"] = arr;
    write_text(base + ".json", j.dump(2) + "\n");
  } else {
    write_text(base + ".csv", csv_table(info, columns, rows));
  }
}

// solve ----------------------------------------------------------------------

struct SolveOpts {
  DataOpts data;
  double t_final = 1.0;
  double dt = 1e-3;
  std::size_t record_every = 10;
  bool linear = false;
  double energy_tol = 1e-6;
};

inline int cmd_solve(const Common& c0, const SolveOpts& o, std::ostream& out) {
  Common c = c0;
  if (std::isnan(c.s)) c.s = 0.0;
  if (c.grid_n == 0) c.grid_n = 256;
  if (c.half_width == 0) c.half_width = 1.0;
  EquationParams p;
  p.alpha = c.alpha;
  p.s = c.s;
  p.validate();
  SolverConfig cfg;
  cfg.dt = o.dt;
  cfg.t_final = o.t_final;
  cfg.nonlinear = !o.linear;
  cfg.record_every = 1;
  require(o.record_every >= 1, "record-every must be >= 1");
  const Grid1D g(c.grid_n, c.half_width);
  RunInfo info = base_info("solve", c);
  data_config(info, o.data);
  info.config.emplace_back("t_final", fmt(o.t_final));
  info.config.emplace_back("dt", fmt(o.dt));
  info.config.emplace_back("record_every", std::to_string(o.record_every));
  info.config.emplace_back("linear", o.linear ? "true" : "false");
  info.config.emplace_back("energy_tol", fmt(o.energy_tol));

  const SpectralField phi = make_data(g, o.data, c.seed);
  const Trajectory traj = solve(phi, cfg, p);
  const auto res = energy_law_residuals(traj);
  const double worst = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
  const auto rates = energy_law_rates(traj);
  const double worst_rate = rates.empty() ? 0.0 : *std::max_element(rates.begin(), rates.end());
  bool nonincreasing = true;
  for (std::size_t n = 1; n < traj.size(); ++n)
    if (energy(traj.states[n]) > energy(traj.states[n - 1]) * (1.0 + 1e-12) + 1e-300) nonincreasing = false;

  std::vector<std::vector<double>> rows;
  std::string snaps;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    if (n % o.record_every != 0 && n + 1 != traj.size()) continue;
    const auto& u = traj.states[n];
    rows.push_back({traj.times[n], energy(u), sobolev_norm(u, c.s), dissipation_rate(u, c.alpha)});
    snaps += encode_snapshot(u, traj.times[n]);
  }
  ojson summary;
  summary["max_energy_residual"] = worst;
  summary["max_energy_rate_defect"] = worst_rate;
  summary["energy_nonincreasing"] = nonincreasing;
  summary["energy_law_holds"] = worst <= o.energy_tol;
  write_report(c, "solve", info, {"t", "energy", "hs_norm", "dissipation"}, rows, summary);
  write_text(out_prefix(c, "solve") + "_snapshots.bin", snaps);
  out << "solve: " << rows.size() << " records, max energy-law residual per step " << fmt(worst) << " (tol "
      << fmt(o.energy_tol) << "), energy " << (nonincreasing ? "nonincreasing" : "INCREASING") << "\n";
  return worst <= o.energy_tol && (nonincreasing || c.alpha == 0) ? exit_ok : exit_invariant;
}

// picard ---------------------------------------------------------------------

struct PicardOpts {
  DataOpts data{"smooth", 3, 0.01, 0.6};
  double T = 1.0;
  int k = 6;
  double dt = 1e-3;
};

inline int cmd_picard(const Common& c0, const PicardOpts& o, std::ostream& out) {
  Common c = c0;
  if (std::isnan(c.s)) c.s = 0.0;
  if (c.grid_n == 0) c.grid_n = 64;
  if (c.half_width == 0) c.half_width = 1.0;
  EquationParams p;
  p.alpha = c.alpha;
  p.s = c.s;
  p.validate();
  SolverConfig cfg;
  cfg.dt = o.dt;
  cfg.t_final = o.T;
  const Grid1D g(c.grid_n, c.half_width);
  RunInfo info = base_info("picard", c);
  data_config(info, o.data);
  info.config.emplace_back("T", fmt(o.T));
  info.config.emplace_back("k", std::to_string(o.k));
  info.config.emplace_back("dt", fmt(o.dt));

  const SpectralField phi = make_data(g, o.data, c.seed);
  PicardResult pr;
  try {
    pr = picard_iterate(phi, o.T, o.k, p, cfg);
  } catch (const DivergenceError& e) {
    out << "picard: " << e.what() << "\n";
    return exit_invariant;
  }
  const Trajectory ref = solve(phi, cfg, p);
  double gap = 0.0;
  for (std::size_t m = 0; m < std::min(ref.size(), pr.trajectory.size()); ++m) {
    SpectralField d(g);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = pr.trajectory.states[m][i] - ref.states[m][i];
    gap = std::max(gap, sobolev_norm(d, c.s));
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pr.distances.size(); ++i) {
    const double ratio = i == 0 || pr.distances[i - 1] == 0 ? 0.0 : pr.distances[i] / pr.distances[i - 1];
    rows.push_back({static_cast<double>(i + 1), pr.distances[i], ratio});
  }
  ojson summary;
  summary["phi_norm"] = sobolev_norm(phi, c.s);
  summary["stepper_gap"] = gap;
  write_report(c, "picard", info, {"iteration", "distance", "ratio"}, rows, summary);
  out << "picard: " << o.k << " iterations, sup_t distance to exponential stepper " << fmt(gap) << "\n";
  return exit_ok;
}

// inflate --------------------------------------------------------------------

struct InflateOpts {
  double t = 0.1;
  std::vector<double> N = {16, 32, 64, 128, 256, 512};
};

inline int cmd_inflate(const Common& c0, const InflateOpts& o, std::ostream& out) {
  Common c = c0;
  if (std::isnan(c.s)) c.s = -1.5;
  if (c.grid_n == 0) c.grid_n = 8192;
  if (c.half_width == 0) c.half_width = 4.0;
  RunInfo info = base_info("inflate", c);
  info.config.emplace_back("t", fmt(o.t));
  std::string ns;
  for (double n : o.N) ns += (ns.empty() ? "" : ",") + fmt(n);
  info.config.emplace_back("N", ns);

  const auto rep = inflation_experiment(c.s, c.alpha, o.t, o.N, {c.grid_n, c.half_width}, 0.05, c.workers);
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<double, double>> plot;
  for (const auto& r : rep.rows) {
    rows.push_back({r.N, r.phi_norm, r.restricted_norm, r.full_norm, r.lower_bound, r.intermediate_bound, r.bound_ratio,
                    r.quadratic_ratio});
    plot.emplace_back(std::log(r.N), std::log(r.restricted_norm));
  }
  ojson summary;
  summary["slope"] = rep.slope;
  summary["ratio_slope"] = rep.ratio_slope;
  summary["bound_holds"] = rep.bound_holds;
  summary["intermediate_bound_holds"] = rep.intermediate_bound_holds;
  summary["bounded_ratio"] = rep.bounded_ratio;
  summary["quadratic_estimate_fails"] = rep.quadratic_estimate_fails;
  summary["alpha_in_theorem_range"] = rep.alpha_in_theorem_range;
  summary["min_bound_ratio"] = rep.rows.empty() ? 0.0 : rep.min_bound_ratio;
  write_report(c, "inflate", info,
               {"N", "phi_norm", "restricted_norm", "full_norm", "lower_bound", "intermediate_bound", "bound_ratio",
                "quadratic_ratio"},
               rows, summary);
  write_text(out_prefix(c, "inflate") + ".dat", plot_data(info, plot));
  out << "inflate: " << rep.rows.size() << " rows, slope " << fmt(rep.slope) << ", ratio slope " << fmt(rep.ratio_slope)
      << ", bounded ratio " << (rep.bounded_ratio ? "yes" : "no") << ", lower bound "
      << (rep.bound_holds ? "holds" : "VIOLATED") << "\n";
  if (!rep.alpha_in_theorem_range) out << "inflate: alpha outside [1/2, 1], the theorem does not apply\n";
  return rep.bound_holds ? exit_ok : exit_invariant;
}

// multiplier -----------------------------------------------------------------

struct MultiplierOpts {
  std::string mode = "lemma31";
  ShellRanges ranges;
  int resolution = 32;
  int restarts = 4;
  int per_stratum = 1;
  long long budget = 200000;
  double beta = 1.0;
  double c_max = 10.0;
  double rho = 0.75;
  double delta = 0.01;
  std::vector<long> sizes = {16, 32, 64};
  double dtau = 0.5;
  double dxi = 0.25;
  double ratio_limit = 1.2;
};

inline int cmd_multiplier(const Common& c, const MultiplierOpts& o, std::ostream& out) {
  RunInfo info = base_info("multiplier", c);
  info.config.emplace_back("mode", o.mode);
  if (o.mode == "lemma32") {
    check_weight_params(o.rho, o.delta, c.alpha);
    for (const auto& [k, v] : std::vector<std::pair<std::string, double>>{
             {"rho", o.rho}, {"delta", o.delta}, {"dtau", o.dtau}, {"dxi", o.dxi}, {"ratio_limit", o.ratio_limit}})
      info.config.emplace_back(k, fmt(v));
    std::string sz;
    for (long n : o.sizes) sz += (sz.empty() ? "" : ",") + std::to_string(n);
    info.config.emplace_back("sizes", sz);
    info.config.emplace_back("restarts", std::to_string(o.restarts));
    NormOptions nopt{o.restarts, 400, 1e-9, c.seed, false};
    const auto rep = verify_lemma32(c.alpha, o.rho, o.delta, o.sizes, {o.dtau, o.dxi}, nopt, o.ratio_limit, c.workers);
    std::vector<std::vector<double>> rows;
    for (const auto& r : rep.rows)
      rows.push_back({static_cast<double>(r.n), static_cast<double>(r.entries), r.lower, r.upper});
    ojson summary;
    summary["final_ratio"] = rep.final_ratio;
    summary["slope"] = rep.slope;
    summary["non_diverging"] = rep.non_diverging;
    write_report(c, "multiplier", info, {"n", "entries", "lower", "upper"}, rows, summary);
    out << "multiplier lemma32: " << rep.rows.size() << " truncations, final ratio " << fmt(rep.final_ratio)
        << (rep.non_diverging ? ", non-diverging" : ", DIVERGING") << "\n";
    return rep.non_diverging ? exit_ok : exit_invariant;
  }

  for (const auto& [k, v] : std::vector<std::pair<std::string, long long>>{{"n_lo", o.ranges.n_lo},
                                                                          {"n_hi", o.ranges.n_hi},
                                                                          {"l_hi", o.ranges.l_hi},
                                                                          {"h_hi", o.ranges.h_hi},
                                                                          {"resolution", o.resolution},
                                                                          {"restarts", o.restarts},
                                                                          {"per_stratum", o.per_stratum},
                                                                          {"budget", o.budget}})
    info.config.emplace_back(k, std::to_string(v));
  info.config.emplace_back("beta", fmt(o.beta));
  info.config.emplace_back("c_max", fmt(o.c_max));
  Lemma31SweepOptions sopt;
  sopt.block.resolution = o.resolution;
  sopt.block.entry_budget = o.budget;
  sopt.block.beta = o.beta;
  sopt.block.norm.restarts = o.restarts;
  sopt.block.norm.seed = c.seed;
  sopt.per_stratum = o.per_stratum;
  sopt.seed = c.seed;
  sopt.workers = c.workers;
  const auto rep = verify_lemma31(c.alpha, o.ranges, sopt);
  std::vector<std::vector<double>> rows;
  int violations = 0;
  for (const auto& b : rep.blocks) {
    std::vector<double> r;
    for (int j = 0; j < 3; ++j) r.push_back(b.block.n(j));
    r.push_back(b.block.h());
    for (int j = 0; j < 3; ++j) r.push_back(b.block.l(j));
    r.insert(r.end(), {static_cast<double>(static_cast<int>(b.kind)), static_cast<double>(b.support),
                       static_cast<double>(b.used), b.windowed ? 1.0 : 0.0, b.lower, b.upper, b.bound, b.ratio});
    rows.push_back(r);
    if (b.lower > o.c_max * b.bound) ++violations;
  }
  ojson summary;
  summary["admissible_total"] = rep.admissible_total;
  summary["blocks"] = rep.blocks.size();
  summary["fitted_C"] = rep.fitted_C;
  summary["slope_N"] = rep.slope_N;
  summary["slope_L"] = rep.slope_L;
  summary["violations"] = violations;
  summary["inadmissible_checked"] = rep.inadmissible_checked;
  summary["inadmissible_support"] = rep.inadmissible_support;
  summary["case_codes"] = "0 high-mod, 1 2a, 2 2b, 3 2c";
  write_report(c, "multiplier", info,
               {"N1", "N2", "N3", "H", "L1", "L2", "L3", "case", "support", "used", "windowed", "lower", "upper",
                "bound", "ratio"},
               rows, summary);
  out << "multiplier lemma31: " << rep.blocks.size() << " blocks, fitted C " << fmt(rep.fitted_C) << ", slope in N "
      << fmt(rep.slope_N) << ", slope in L " << fmt(rep.slope_L) << ", inadmissible support "
      << rep.inadmissible_support << "\n";
  return violations == 0 && rep.inadmissible_support == 0 ? exit_ok : exit_invariant;
}

// norms ----------------------------------------------------------------------

struct NormsOpts {
  DataOpts data;
  double b = 0.5;
  double T = 1.0;
  double window = 8.0;
  std::size_t nt = 256;
};

inline int cmd_norms(const Common& c0, const NormsOpts& o, std::ostream& out) {
  Common c = c0;
  if (std::isnan(c.s)) c.s = 0.0;
  if (c.grid_n == 0) c.grid_n = 128;
  if (c.half_width == 0) c.half_width = 1.0;
  check_alpha(c.alpha);
  const Grid1D g(c.grid_n, c.half_width);
  RunInfo info = base_info("norms", c);
  data_config(info, o.data);
  info.config.emplace_back("b", fmt(o.b));
  info.config.emplace_back("T", fmt(o.T));
  info.config.emplace_back("window", fmt(o.window));
  info.config.emplace_back("nt", std::to_string(o.nt));
  const SpectralField phi = make_data(g, o.data, c.seed);
  SpaceTimeGrid stg;
  stg.space = g;
  stg.window = o.window;
  stg.nt = o.nt;
  const auto u = cutoff_linear_flow(phi, c.alpha, o.T, stg);
  const double hs = sobolev_norm(phi, c.s);
  const double xb = bourgain_norm(u, o.b, c.s, c.alpha);
  const double ratio = hs > 0 ? xb / hs : 0.0;
  std::vector<std::vector<double>> rows = {{hs, xb, ratio}};
  write_report(c, "norms", info, {"sobolev_norm", "bourgain_norm", "ratio"}, rows, ojson::object());
  out << "norms: ||phi||_H^s " << fmt(hs) << ", ||psi_T W phi||_X^{b,s} " << fmt(xb) << ", ratio " << fmt(ratio)
      << "\n";
  return exit_ok;
}

}  // namespace cli

/// Entry point of the kdvb tool; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli;
  CLI::App app{"kdvb: numerical laboratory for u_t + u_xxx + u u_x + |D|^(2 alpha) u = 0"};
  app.set_version_flag("--version", KDVB_VERSION);
  app.set_config("--config", "", "key = value configuration file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--alpha", c.alpha, "dissipation exponent in [0,1]")->capture_default_str();
  app.add_option("--s", c.s, "Sobolev index (default -1.5 for inflate, 0 otherwise)");
  app.add_option("--grid-n", c.grid_n, "collocation points (power of two)");
  app.add_option("--half-width", c.half_width, "torus half-width Lambda");
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--out", c.out, "output path prefix");
  app.add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--workers", c.workers, "worker threads (0: all cores)");

  SolveOpts so;
  auto* solve_cmd = app.add_subcommand("solve", "time-step the equation with the exponential integrator");
  solve_cmd->configurable();
  add_data_opts(solve_cmd, so.data);
  solve_cmd->add_option("--t-final", so.t_final)->capture_default_str();
  solve_cmd->add_option("--dt", so.dt)->capture_default_str();
  solve_cmd->add_option("--record-every", so.record_every, "steps between written records")->capture_default_str();
  solve_cmd->add_flag("--linear", so.linear, "drop the nonlinearity");
  solve_cmd->add_option("--energy-tol", so.energy_tol)->capture_default_str();

  PicardOpts po;
  auto* picard_cmd = app.add_subcommand("picard", "Picard iterates of the Duhamel formula");
  picard_cmd->configurable();
  add_data_opts(picard_cmd, po.data);
  picard_cmd->add_option("--T", po.T)->capture_default_str();
  picard_cmd->add_option("--k", po.k, "number of iterations")->capture_default_str();
  picard_cmd->add_option("--dt", po.dt)->capture_default_str();

  InflateOpts io;
  auto* inflate_cmd = app.add_subcommand("inflate", "second-iterate norm inflation sweep");
  inflate_cmd->configurable();
  inflate_cmd->add_option("--t", io.t)->capture_default_str();
  inflate_cmd->add_option("--N", io.N, "frequencies N")->delimiter(',');

  MultiplierOpts mo;
  auto* mult_cmd = app.add_subcommand("multiplier", "trilinear multiplier verification");
  mult_cmd->configurable();
  mult_cmd->add_option("--mode", mo.mode)->check(CLI::IsMember({"lemma31", "lemma32"}))->capture_default_str();
  mult_cmd->add_option("--n-lo", mo.ranges.n_lo, "smallest log2 N")->capture_default_str();
  mult_cmd->add_option("--n-hi", mo.ranges.n_hi, "largest log2 N")->capture_default_str();
  mult_cmd->add_option("--l-hi", mo.ranges.l_hi, "largest log2 L")->capture_default_str();
  mult_cmd->add_option("--h-hi", mo.ranges.h_hi, "largest log2 H")->capture_default_str();
  mult_cmd->add_option("--resolution", mo.resolution, "lattice points per shell")->capture_default_str();
  mult_cmd->add_option("--restarts", mo.restarts)->capture_default_str();
  mult_cmd->add_option("--per-stratum", mo.per_stratum)->capture_default_str();
  mult_cmd->add_option("--budget", mo.budget, "largest block handed to the norm estimate")->capture_default_str();
  mult_cmd->add_option("--beta", mo.beta)->capture_default_str();
  mult_cmd->add_option("--c-max", mo.c_max)->capture_default_str();
  mult_cmd->add_option("--rho", mo.rho)->capture_default_str();
  mult_cmd->add_option("--delta", mo.delta)->capture_default_str();
  mult_cmd->add_option("--sizes", mo.sizes)->delimiter(',');
  mult_cmd->add_option("--dtau", mo.dtau)->capture_default_str();
  mult_cmd->add_option("--dxi", mo.dxi)->capture_default_str();
  mult_cmd->add_option("--ratio-limit", mo.ratio_limit)->capture_default_str();

  NormsOpts no;
  auto* norms_cmd = app.add_subcommand("norms", "Sobolev and Bourgain norms of the cut-off linear flow");
  norms_cmd->configurable();
  add_data_opts(norms_cmd, no.data);
  norms_cmd->add_option("--b", no.b)->capture_default_str();
  norms_cmd->add_option("--T", no.T)->capture_default_str();
  norms_cmd->add_option("--window", no.window)->capture_default_str();
  norms_cmd->add_option("--nt", no.nt)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }

  try {
    if (*solve_cmd) return cmd_solve(c, so, out);
    if (*picard_cmd) return cmd_picard(c, po, out);
    if (*inflate_cmd) return cmd_inflate(c, io, out);
    if (*mult_cmd) return cmd_multiplier(c, mo, out);
    if (*norms_cmd) return cmd_norms(c, no, out);
  } catch (const BlowUpError& e) {
    err << "blow-up: " << e.what() << " (last good t = " << e.last_good_time << ")\n";
    return exit_blowup;
  } catch (const InvalidArgument& e) {
    err << "configuration error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_invariant;
  }
  return exit_usage;
}

}  // namespace kdvb
