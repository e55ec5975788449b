#pragma once

// Command implementations behind the entrofv executable. Each returns a
// process exit code: 0 success, 1 solver failure, 2 usage error.

#include "entrofv/cli/presets.hpp"
#include "entrofv/mesh_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace entrofv::cli {

enum ExitCode : int
{
  Success = 0,
  SolverFailure = 1,
  UsageError = 2
};

// ---------------------------------------------------------------------------
// Output files

inline std::string trace_csv(const EntropyTrace& trace)
{
  std::ostringstream out;
  for (std::size_t i = 0; i < trace.columns.size(); ++i) out << (i ? "," : "") << trace.columns[i];
  out << '\n';
  for (const auto& row : trace.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << entrofv::detail::fmt_double(row[i]);
    out << '\n';
  }
  return out.str();
}

inline std::string snapshot(const Vector& f)
{
  std::ostringstream out;
  for (Index k = 0; k < f.size(); ++k) out << k << ' ' << entrofv::detail::fmt_double(f[k]) << '\n';
  return out.str();
}

inline std::string snapshot(const DdState& s)
{
  using entrofv::detail::fmt_double;
  std::ostringstream out;
  for (Index k = 0; k < s.n.size(); ++k)
    out << k << ' ' << fmt_double(s.n[k]) << ' ' << fmt_double(s.p[k]) << ' ' << fmt_double(s.v[k]) << '\n';
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline std::string run_label(const RunConfig& cfg, const Preset& p)
{
  std::string label = p.name;
  if (p.model != Model::PorousMedium) label += "_" + scheme_of(cfg).name();
  if (p.name == "pme-sweep") {
    std::ostringstream s;
    s << "_m" << cfg.m.value_or(2.0) << "_mD" << cfg.m_d.value_or(1.0);
    label += s.str();
  }
  return label;
}

inline int report_status(const TransientStatus& st, const std::string& label, std::ostream& log)
{
  log << label << ": " << st.accepted << " steps to t = " << st.time << " (" << st.rejected << " rejected)";
  if (st.reached_floor) log << ", entropy floor reached";
  log << '\n';
  if (st.aborted) {
    log << label << ": time step fell below dt_min, run aborted\n";
    return SolverFailure;
  }
  return Success;
}

// ---------------------------------------------------------------------------
// run

inline int run_fp_preset(const RunConfig& cfg, const Preset& p, std::ostream& log)
{
  const auto pb = make_fp_problem(cfg);
  const auto scheme = scheme_of(cfg);
  AssemblyOptions opts;
  opts.force = cfg.force_peclet;
  const auto res = run_fp(pb, scheme, stepper_of(cfg), opts);
  const std::string label = run_label(cfg, p);
  write_file(std::filesystem::path(cfg.out_dir) / (label + ".csv"), trace_csv(res.trace));
  write_file(std::filesystem::path(cfg.out_dir) / (label + "_steady.txt"), snapshot(res.steady));
  if (p.name == "fp-toy") {
    const Vector exact = center_values(pb.mesh, toy::steady);
    log << label << ": steady L1 error vs exp(x1) = " << lp_distance(pb.mesh, res.steady, exact, 1) << '\n';
  }
  return report_status(res.status, label, log);
}

inline int run_one_pme(const RunConfig& cfg, std::ostream& log)
{
  const auto& p = require_preset(cfg.preset);
  const auto pb = make_pme_problem(cfg);
  const auto res = run_pme(pb, stepper_of(cfg));
  const std::string label = run_label(cfg, p);
  write_file(std::filesystem::path(cfg.out_dir) / (label + ".csv"), trace_csv(res.trace));
  write_file(std::filesystem::path(cfg.out_dir) / (label + "_steady.txt"), snapshot(res.steady));
  std::ostringstream msg;
  const int code = report_status(res.status, label, msg);
  log << msg.str();
  return code;
}

/// Thread count for sweeps from ENTROFV_THREADS (default 1).
inline unsigned sweep_threads()
{
  if (const char* env = std::getenv("ENTROFV_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return 1;
}

inline int run_pme_preset(const RunConfig& cfg, const Preset& p, std::ostream& log)
{
  if (p.name != "pme-sweep" || (cfg.m && cfg.m_d)) return run_one_pme(cfg, log);
  std::vector<RunConfig> runs;
  for (const auto& [m, md] : sweep_parameters()) {
    if ((cfg.m && *cfg.m != m) || (cfg.m_d && *cfg.m_d != md)) continue;
    RunConfig c = cfg;
    c.m = m;
    c.m_d = md;
    runs.push_back(c);
  }
  std::vector<int> codes(runs.size(), Success);
  std::vector<std::string> logs(runs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < runs.size();) {
      std::ostringstream out;
      try {
        codes[i] = run_one_pme(runs[i], out);
      } catch (const std::exception& e) {
        out << "error: " << e.what() << '\n';
        codes[i] = SolverFailure;
      }
      logs[i] = out.str();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::min<std::size_t>(sweep_threads(), runs.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  int code = Success;
  for (std::size_t i = 0; i < runs.size(); ++i) log << logs[i], code = std::max(code, codes[i]);
  return code;
}

inline int run_dd_preset(const RunConfig& cfg, const Preset& p, std::ostream& log)
{
  const auto pb = make_dd_problem(cfg);
  const auto res = run_dd(pb, scheme_of(cfg), stepper_of(cfg));
  const std::string label = run_label(cfg, p);
  write_file(std::filesystem::path(cfg.out_dir) / (label + ".csv"), trace_csv(res.trace));
  write_file(std::filesystem::path(cfg.out_dir) / (label + "_steady.txt"), snapshot(res.steady));
  return report_status(res.status, label, log);
}

/// Runs a configured preset, writing <label>.csv and <label>_steady.txt into cfg.out_dir.
inline int run(const RunConfig& cfg, std::ostream& log = std::cerr)
{
  const Preset* p = find_preset(cfg.preset);
  if (!p) {
    log << "error: unknown preset '" << cfg.preset << "'\n";
    return UsageError;
  }
  try {
    if (p->model != Model::PorousMedium) (void)scheme_of(cfg);
    (void)stepper_of(cfg);
    if (cfg.level && (*cfg.level < 0 || *cfg.level > max_reference_level))
      throw DataError("level must be in [0, " + std::to_string(max_reference_level) + "]");
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return UsageError;
  }
  try {
    switch (p->model) {
      case Model::FokkerPlanck: return run_fp_preset(cfg, *p, log);
      case Model::PorousMedium: return run_pme_preset(cfg, *p, log);
      case Model::DriftDiffusion: return run_dd_preset(cfg, *p, log);
    }
  } catch (const PecletError& e) {
    log << "error: " << e.what() << " (use --force-peclet to run anyway)\n";
    return SolverFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return SolverFailure;
  }
  return Success;
}

// ---------------------------------------------------------------------------
// convergence

struct ConvergenceRow
{
  int level;
  double h;  // mesh size
  std::vector<double> errors;                 // one per scheme
  std::vector<std::optional<double>> orders;  // log2(e_{l-1}/e_l), none on the first level or for tiny errors
};

struct ConvergenceTable
{
  std::vector<std::string> schemes;
  std::vector<ConvergenceRow> rows;
};

/// Errors below this are treated as exact and get no order.
inline constexpr double exact_error_threshold = 1e-12;

inline ConvergenceTable convergence_study(const std::string& preset, int level_from, int level_to,
                                          const std::vector<std::string>& schemes)
{
  if (preset != "fp-toy") throw DataError("preset '" + preset + "' has no exact steady state to compare with");
  if (level_from < 0 || level_to < level_from || level_to > max_reference_level)
    throw DataError("bad level range");
  ConvergenceTable table{schemes, {}};
  for (int level = level_from; level <= level_to; ++level) {
    RunConfig cfg;
    cfg.preset = preset;
    cfg.level = level;
    const auto pb = make_fp_problem(cfg);
    const Vector exact = center_values(pb.mesh, toy::steady);
    ConvergenceRow row{level, std::ldexp(1.0, -(level + 2)), {}, {}};
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      const auto scheme = BScheme::from_name(schemes[s]);
      if (!scheme) throw DataError("unknown scheme '" + schemes[s] + "'");
      const double err = lp_distance(pb.mesh, solve_fp_steady(pb.mesh, pb.data, *scheme), exact, 1);
      row.errors.push_back(err);
      std::optional<double> order;
      if (!table.rows.empty()) {
        const double prev = table.rows.back().errors[s];
        if (prev > exact_error_threshold && err > exact_error_threshold) order = std::log2(prev / err);
      }
      row.orders.push_back(order);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string format_table(const ConvergenceTable& t)
{
  std::ostringstream out;
  out << std::left << std::setw(8) << "dx";
  for (const auto& s : t.schemes) out << std::setw(14) << (s + " L1") << std::setw(8) << "order";
  out << '\n';
  for (const auto& r : t.rows) {
    out << std::setw(8) << ("1/" + std::to_string(1 << (r.level + 2)));
    for (std::size_t s = 0; s < r.errors.size(); ++s) {
      std::ostringstream e;
      e << std::scientific << std::setprecision(2) << r.errors[s];
      out << std::setw(14) << e.str();
      std::ostringstream o;
      if (r.orders[s]) o << std::fixed << std::setprecision(2) << *r.orders[s];
      out << std::setw(8) << o.str();
    }
    out << '\n';
  }
  return out.str();
}

inline std::string table_csv(const ConvergenceTable& t)
{
  std::ostringstream out;
  out << "level,dx";
  for (const auto& s : t.schemes) out << ',' << s << "_L1," << s << "_order";
  out << '\n';
  for (const auto& r : t.rows) {
    out << r.level << ',' << entrofv::detail::fmt_double(r.h);
    for (std::size_t s = 0; s < r.errors.size(); ++s) {
      out << ',' << entrofv::detail::fmt_double(r.errors[s]) << ',';
      if (r.orders[s]) out << entrofv::detail::fmt_double(*r.orders[s]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace entrofv::cli
