// entrofv: command-line front end for the presets, convergence studies and mesh utilities.

#include "entrofv/cli/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace entrofv;
using namespace entrofv::cli;

namespace {

std::string read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

unsigned parse_sides(const std::string& list)
{
  unsigned sides = 0;
  std::stringstream in(list);
  for (std::string item; std::getline(in, item, ',');) {
    if (item == "left") sides |= BoundarySpec::Left;
    else if (item == "right") sides |= BoundarySpec::Right;
    else if (item == "bottom") sides |= BoundarySpec::Bottom;
    else if (item == "top") sides |= BoundarySpec::Top;
    else if (item == "all") sides |= 15;
    else throw DataError("unknown side '" + item + "'");
  }
  return sides;
}

std::pair<int, int> parse_levels(const std::string& range)
{
  const auto dots = range.find("..");
  try {
    if (dots == std::string::npos) {
      const int l = std::stoi(range);
      return {l, l};
    }
    return {std::stoi(range.substr(0, dots)), std::stoi(range.substr(dots + 2))};
  } catch (const std::exception&) {
    throw DataError("bad level range '" + range + "' (expected a..b)");
  }
}

void print_report(const AdmissibilityReport& report)
{
  if (report.ok()) {
    std::cout << "mesh is admissible\n";
    return;
  }
  for (const auto& v : report.violations) {
    std::cout << v.hypothesis << ": " << v.message;
    if (!v.edges.empty()) std::cout << " (" << v.edges.size() << " edge(s), first " << v.edges.front() << ")";
    if (!v.cells.empty()) std::cout << " (" << v.cells.size() << " cell(s), first " << v.cells.front() << ")";
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Structure-preserving finite volume solver for Fokker-Planck, porous medium and drift-diffusion problems"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "run a preset or a config file");
  std::string target;
  RunConfig overrides;
  std::string scheme, out_dir;
  int level = -1;
  double dt = 0, final_time = 0, m = 0, md = 0, lambda = 0, bias = 0;
  bool force = false;
  run_cmd->add_option("target", target, "preset name or config file")->required();
  run_cmd->add_option("--scheme", scheme, "upwind, centered or sg");
  run_cmd->add_option("--level", level, "reference mesh level");
  run_cmd->add_option("--dt", dt, "time step (fixes dt0 = dt_max)");
  run_cmd->add_option("-T,--final-time", final_time, "final time");
  run_cmd->add_option("--m", m, "porous medium exponent");
  run_cmd->add_option("--md", md, "porous medium Dirichlet level (pme-sweep)");
  run_cmd->add_option("--lambda", lambda, "Debye length");
  run_cmd->add_option("--bias", bias, "contact bias");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--force-peclet", force, "assemble even if the Peclet condition fails");

  // convergence
  auto* conv_cmd = app.add_subcommand("convergence", "L1 error and order of the steady state against the exact one");
  std::string conv_preset, levels = "0..4", schemes = "upwind,centered,sg", conv_out;
  conv_cmd->add_option("preset", conv_preset)->required();
  conv_cmd->add_option("--levels", levels, "level range a..b");
  conv_cmd->add_option("--schemes", schemes, "comma-separated B-functions");
  conv_cmd->add_option("--out", conv_out, "directory for convergence.csv");

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "reference mesh utilities");
  mesh_cmd->require_subcommand(1);
  auto* gen_cmd = mesh_cmd->add_subcommand("gen", "write a reference mesh");
  int gen_level = 0;
  std::string gen_sides = "all", gen_out;
  gen_cmd->add_option("--level", gen_level, "refinement level");
  gen_cmd->add_option("--dirichlet", gen_sides, "Dirichlet sides: left,right,bottom,top or all");
  gen_cmd->add_option("-o,--output", gen_out, "output file (default stdout)");
  auto* check_cmd = mesh_cmd->add_subcommand("check", "validate a mesh file");
  std::string check_in;
  check_cmd->add_option("file", check_in)->required();
  auto* refine_cmd = mesh_cmd->add_subcommand("refine", "refine a mesh file carrying geometry");
  std::string refine_in, refine_out;
  refine_cmd->add_option("file", refine_in)->required();
  refine_cmd->add_option("-o,--output", refine_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return UsageError;
  }

  try {
    if (*run_cmd) {
      RunConfig cfg;
      if (find_preset(target)) {
        cfg.preset = target;
      } else if (fs::is_regular_file(target)) {
        cfg = parse_config(read_file(target));
      } else {
        std::cerr << "error: '" << target << "' is neither a preset nor a config file\n";
        return UsageError;
      }
      if (!scheme.empty()) cfg.scheme = scheme;
      if (level >= 0) cfg.level = level;
      if (dt > 0) cfg.dt = dt;
      if (final_time > 0) cfg.final_time = final_time;
      if (m > 0) cfg.m = m;
      if (md > 0) cfg.m_d = md;
      if (lambda > 0) cfg.lambda = lambda;
      if (run_cmd->count("--bias")) cfg.bias = bias;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (force) cfg.force_peclet = true;
      return run(cfg);
    }

    if (*conv_cmd) {
      const auto [a, b] = parse_levels(levels);
      std::vector<std::string> list;
      std::stringstream in(schemes);
      for (std::string s; std::getline(in, s, ',');) list.push_back(s);
      ConvergenceTable table;
      try {
        table = convergence_study(conv_preset, a, b, list);
      } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return UsageError;
      }
      std::cout << format_table(table);
      if (!conv_out.empty()) write_file(fs::path(conv_out) / "convergence.csv", table_csv(table));
      return Success;
    }

    if (*gen_cmd) {
      const Mesh mesh = reference_mesh(gen_level, BoundarySpec::unit_square(parse_sides(gen_sides)));
      if (gen_out.empty()) std::cout << save_mesh(mesh);
      else write_file(gen_out, save_mesh(mesh));
      return Success;
    }
    if (*check_cmd) {
      const auto report = validate(load_mesh(read_file(check_in)));
      print_report(report);
      return report.ok() ? Success : SolverFailure;
    }
    if (*refine_cmd) {
      const Mesh mesh = refine(load_mesh(read_file(refine_in)));
      if (refine_out.empty()) std::cout << save_mesh(mesh);
      else write_file(refine_out, save_mesh(mesh));
      return Success;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return UsageError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return UsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return SolverFailure;
  }
  return Success;
}
