#pragma once

// The named experiments: problem data, default mesh level, scheme and
// time stepping for each preset.

#include "entrofv/cli/config.hpp"
#include "entrofv/runs.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace entrofv::cli {

enum class Model
{
  FokkerPlanck,
  PorousMedium,
  DriftDiffusion
};

inline const char* model_name(Model m)
{
  switch (m) {
    case Model::FokkerPlanck: return "fokker-planck";
    case Model::PorousMedium: return "pme";
    case Model::DriftDiffusion: return "drift-diffusion";
  }
  return "?";
}

struct Preset
{
  std::string name;
  Model model;
  std::string summary;
  int level;
  std::string scheme;       // default B-function ("" for the PME)
  double dt;                // fixed time step, or 0 for the adaptive policy
  double final_time;
};

inline const std::vector<Preset>& presets()
{
  static const std::vector<Preset> catalog{
    {"fp-toy", Model::FokkerPlanck, "U = grad x1, a = 1, f^D = 1 (left) / e (right), known exact solution", 0, "sg",
     1e-2, 5.0},
    {"fp-hetero", Model::FokkerPlanck, "drain (a = 3) and barrier (a = 0.01), U = (-1/2, 0), f^D = 1 (top) / 0.018 (bottom)",
     4, "upwind", 1e-2, 100.0},
    {"pme-fill", Model::PorousMedium, "m = 4, f^D = 2.5 on x2 in (0.3, 0.7) of the right edge and 1 elsewhere on it, f0 = 0",
     4, "", 0.0, 15.0},
    {"pme-sweep", Model::PorousMedium, "m in {2, 3, 4}, m_D in {0.1, 1, 5}, full Dirichlet f^D = m_D, f0 = 0", 3, "",
     0.0, 20.0},
    {"dd-pn", Model::DriftDiffusion, "PN junction at thermal equilibrium boundary data, lambda = 1", 3, "sg", 1e-2,
     20.0},
    {"dd-bias", Model::DriftDiffusion, "PN junction with contact bias +2.5 (bottom) / -2.5 (top)", 3, "sg", 1e-2,
     20.0},
  };
  return catalog;
}

inline const Preset* find_preset(std::string_view name)
{
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

inline const Preset& require_preset(std::string_view name)
{
  if (const auto* p = find_preset(name)) return *p;
  throw DataError("unknown preset '" + std::string(name) + "'");
}

inline int level_of(const RunConfig& cfg) { return cfg.level.value_or(require_preset(cfg.preset).level); }

inline BScheme scheme_of(const RunConfig& cfg)
{
  const auto& p = require_preset(cfg.preset);
  const std::string name = cfg.scheme.value_or(p.scheme);
  if (auto s = BScheme::from_name(name)) return *s;
  throw DataError("unknown scheme '" + name + "' (expected upwind, centered or sg)");
}

inline StepperConfig stepper_of(const RunConfig& cfg)
{
  const auto& p = require_preset(cfg.preset);
  StepperConfig s;
  if (p.dt > 0) s = StepperConfig::fixed(p.dt, p.final_time);
  s.final_time = cfg.final_time.value_or(p.final_time);
  if (cfg.dt) {
    s.dt0 = s.dt_max = *cfg.dt;
    s.dt_min = std::min(s.dt_min, *cfg.dt);
  }
  if (cfg.dt0) s.dt0 = *cfg.dt0;
  if (cfg.dt_min) s.dt_min = *cfg.dt_min;
  if (cfg.dt_max) s.dt_max = *cfg.dt_max;
  if (cfg.entropy_floor) s.entropy_floor = *cfg.entropy_floor;
  if (cfg.newton_tolerance) s.newton.tolerance = *cfg.newton_tolerance;
  if (cfg.newton_max_iterations) s.newton.max_iterations = *cfg.newton_max_iterations;
  s.check();
  return s;
}

// ---------------------------------------------------------------------------
// Fokker-Planck presets

namespace toy {

inline double potential(Point2 x) { return x.x; }
inline double steady(Point2 x) { return std::exp(x.x); }

/// Exact solution exp(x1) + exp(x1/2 - (pi^2 + 1/4) t) sin(pi x1).
inline double exact(double t, Point2 x)
{
  constexpr double pi = std::numbers::pi;
  return std::exp(x.x) + std::exp(x.x / 2 - (pi * pi + 0.25) * t) * std::sin(pi * x.x);
}

inline constexpr double decay_rate = std::numbers::pi * std::numbers::pi + 0.25;

}  // namespace toy

namespace hetero {

inline constexpr double drain = 3.0;
inline constexpr double barrier = 0.01;
inline constexpr double bottom_value = 0.018;

/// Barrier layout: two horizontal slabs leaving a gap on alternating sides.
inline bool in_barrier(Point2 x)
{
  return (x.x < 0.75 && x.y > 0.25 && x.y < 0.375) || (x.x > 0.25 && x.y > 0.625 && x.y < 0.75);
}

}  // namespace hetero

inline FpProblem make_fp_problem(const RunConfig& cfg)
{
  const auto& p = require_preset(cfg.preset);
  const int level = level_of(cfg);
  FpProblem pb;
  if (p.name == "fp-toy") {
    pb.mesh = reference_mesh(level, BoundarySpec::unit_square(BoundarySpec::Left | BoundarySpec::Right));
    pb.data.diffusion = Vector::Ones(static_cast<Index>(pb.mesh.num_edges()));
    pb.data.advection = advection_from_potential(pb.mesh, toy::potential);
    pb.data.dirichlet = dirichlet_values(pb.mesh, toy::steady);
    pb.initial = center_values(pb.mesh, [](Point2 x) { return toy::exact(0.0, x); });
  } else if (p.name == "fp-hetero") {
    pb.mesh = reference_mesh(level, BoundarySpec::unit_square(BoundarySpec::Bottom | BoundarySpec::Top));
    const Vector a = cell_values(pb.mesh, [](Point2 x) { return hetero::in_barrier(x) ? hetero::barrier : hetero::drain; });
    pb.data = discretize_coefficients(pb.mesh, a, [](Point2 x) { return x.y > 0.5 ? 1.0 : hetero::bottom_value; });
    pb.data.advection = advection_from_potential(pb.mesh, [](Point2 x) { return -0.5 * x.x; });
    pb.initial = Vector::Constant(static_cast<Index>(pb.mesh.num_cells()), hetero::bottom_value);
  } else {
    throw DataError("preset '" + p.name + "' is not a Fokker-Planck preset");
  }
  return pb;
}

// ---------------------------------------------------------------------------
// Porous medium presets

inline BoundarySpec right_edge_dirichlet()
{
  return BoundarySpec::unit_square(BoundarySpec::Right);
}

inline double fill_boundary(Point2 x) { return (x.y > 0.3 && x.y < 0.7) ? 2.5 : 1.0; }

inline PmeProblem make_pme_problem(const RunConfig& cfg)
{
  const auto& p = require_preset(cfg.preset);
  const int level = level_of(cfg);
  PmeProblem pb;
  if (p.name == "pme-fill") {
    pb.mesh = reference_mesh(level, right_edge_dirichlet());
    pb.m = cfg.m.value_or(4.0);
    pb.dirichlet = dirichlet_values(pb.mesh, fill_boundary);
  } else if (p.name == "pme-sweep") {
    pb.mesh = reference_mesh(level, BoundarySpec::unit_square(15));
    pb.m = cfg.m.value_or(2.0);
    const double md = cfg.m_d.value_or(1.0);
    pb.dirichlet = dirichlet_values(pb.mesh, [md](Point2) { return md; });
  } else {
    throw DataError("preset '" + p.name + "' is not a porous medium preset");
  }
  if (!(pb.m >= 1)) throw DataError("PME exponent must be >= 1");
  pb.initial = Vector::Zero(static_cast<Index>(pb.mesh.num_cells()));
  return pb;
}

/// (m, m_D) pairs of the sweep: m_D varies at m = 2, m varies at m_D = 1.
inline std::vector<std::pair<double, double>> sweep_parameters()
{
  return {{2, 0.1}, {2, 1}, {2, 5}, {3, 1}, {4, 1}};
}

// ---------------------------------------------------------------------------
// Drift-diffusion presets

inline BoundarySpec pn_junction_boundary()
{
  BoundarySpec b;
  b.pieces = {{{{0, 0}, {1, 0}}, EdgeTag::Dirichlet},
              {{{0, 1}, {0.25, 1}}, EdgeTag::Dirichlet},
              {{{0.25, 1}, {1, 1}}, EdgeTag::Neumann},
              {{{0, 0}, {0, 1}}, EdgeTag::Neumann},
              {{{1, 0}, {1, 1}}, EdgeTag::Neumann}};
  return b;
}

inline bool in_p_region(Point2 x) { return x.x < 0.5 && x.y > 0.5; }

inline DdProblem make_dd_problem(const RunConfig& cfg)
{
  const auto& p = require_preset(cfg.preset);
  if (p.model != Model::DriftDiffusion) throw DataError("preset '" + p.name + "' is not a drift-diffusion preset");
  const double bias = cfg.bias.value_or(p.name == "dd-bias" ? 2.5 : 0.0);
  const double cn = cfg.doping_n.value_or(1.0), cp = cfg.doping_p.value_or(-1.0);
  DdProblem pb;
  pb.mesh = reference_mesh(level_of(cfg), pn_junction_boundary());
  const auto ne = static_cast<Index>(pb.mesh.num_edges());
  const auto nc = static_cast<Index>(pb.mesh.num_cells());
  pb.data.lambda = cfg.lambda.value_or(1.0);
  pb.data.doping = cell_values(pb.mesh, [&](Point2 x) { return in_p_region(x) ? cp : cn; });
  pb.data.n_dirichlet = Vector::Ones(ne);
  pb.data.p_dirichlet = Vector::Ones(ne);
  pb.data.v_dirichlet = Vector::Zero(ne);
  const double e = std::numbers::e;
  for (Index ei = 0; ei < ne; ++ei) {
    if (pb.mesh.edge(ei).tag != EdgeTag::Dirichlet) continue;
    const bool bottom = pb.mesh.edge(ei).segment->midpoint().y < 0.5;
    const double nd = bottom ? e : 1.0, pd = bottom ? 1.0 / e : 1.0;
    pb.data.n_dirichlet[ei] = nd;
    pb.data.p_dirichlet[ei] = pd;
    pb.data.v_dirichlet[ei] = 0.5 * (std::log(nd) - std::log(pd)) + (bottom ? bias : -bias);
  }
  pb.n0 = Vector(nc);
  pb.p0 = Vector(nc);
  for (Index k = 0; k < nc; ++k) {
    const double s = 1.0 - std::sqrt(pb.mesh.centroid(k).y);
    pb.n0[k] = e + (1 - e) * s;
    pb.p0[k] = 1 / e + (1 - 1 / e) * s;
  }
  return pb;
}

}  // namespace entrofv::cli
