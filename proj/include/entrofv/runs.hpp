#pragma once

// Transient runs of the three models: steady state first, then the
// backward Euler loop with entropy diagnostics recorded at every step.

#include "entrofv/entropy.hpp"
#include "entrofv/solvers.hpp"

#include <functional>
#include <limits>
#include <optional>

namespace entrofv {

struct FpProblem
{
  Mesh mesh;
  TransportData data;
  Vector initial;
};

struct PmeProblem
{
  Mesh mesh;
  Vector dirichlet;  // f^D per edge
  double m = 2.0;
  Vector initial;
};

struct DdProblem
{
  Mesh mesh;
  DdData data;
  Vector n0;
  Vector p0;
};

template <class State>
struct RunResult
{
  State steady;
  State final_state;
  EntropyTrace trace;
  TransientStatus status;
};

template <class State>
using StepObserver = std::function<void(double t, double dt, const State&)>;

inline RunResult<Vector> run_fp(const FpProblem& pb, const BScheme& scheme, const StepperConfig& cfg,
                                const AssemblyOptions& opts = {}, const StepObserver<Vector>& observe = {})
{
  RunResult<Vector> out;
  FpStepper stepper(pb.mesh, pb.data, scheme, opts);
  const auto& op = stepper.fp_operator();
  out.steady = solve_linear(op.matrix, op.boundary);
  out.trace = EntropyTrace({"t", "dt", "H_phi1", "H_phi2", "D_phi2", "L1", "L2"});
  const auto phi1 = PhiFunction::boltzmann(), phi2 = PhiFunction::power(2.0);
  const auto& fi = out.steady;
  const auto record = [&](double t, double dt, const Vector& f) {
    const double h2 = relative_phi_entropy(pb.mesh, f, fi, phi2);
    out.trace.add({t, dt, relative_phi_entropy(pb.mesh, f, fi, phi1), h2,
                   phi_dissipation(pb.mesh, pb.data, scheme, f, fi, phi2), lp_distance(pb.mesh, f, fi, 1),
                   lp_distance(pb.mesh, f, fi, 2)});
    if (observe) observe(t, dt, f);
    return h2;
  };
  const auto step = [&](const Vector& f, double dt) { return std::optional<Vector>(stepper.step(f, dt)); };
  out.final_state = pb.initial;
  out.status = run_transient(out.final_state, step, record, cfg);
  return out;
}

inline RunResult<Vector> run_pme(const PmeProblem& pb, const StepperConfig& cfg,
                                 const StepObserver<Vector>& observe = {})
{
  RunResult<Vector> out;
  out.steady = solve_pme_steady(pb.mesh, pb.dirichlet, pb.m, pb.initial);
  out.trace = EntropyTrace({"t", "dt", "N_m", "D_m", "Lmp1"});
  const auto& fi = out.steady;
  const double m = pb.m;
  const auto record = [&](double t, double dt, const Vector& f) {
    const double nm = entrophy(pb.mesh, f, fi, m);
    const double lp = lp_distance(pb.mesh, f, fi, m + 1);
    out.trace.add({t, dt, nm, entrophy_dissipation(pb.mesh, f, fi, m), std::pow(lp, m + 1)});
    if (observe) observe(t, dt, f);
    return nm;
  };
  const auto step = [&](const Vector& f, double dt) { return step_pme(pb.mesh, f, m, dt, pb.dirichlet, cfg.newton); };
  out.final_state = pb.initial;
  out.status = run_transient(out.final_state, step, record, cfg);
  return out;
}

/// Potential of the initial densities: the Poisson equation with N0, P0.
inline DdState dd_initial_state(const DdProblem& pb)
{
  const auto op = assemble_poisson(pb.mesh, pb.data.lambda, pb.data.v_dirichlet);
  Vector rhs = op.boundary;
  for (Index k = 0; k < rhs.size(); ++k)
    rhs[k] += pb.mesh.cell(k).measure * (pb.p0[k] - pb.n0[k] + pb.data.doping[k]);
  return {pb.n0, pb.p0, solve_linear(op.matrix, rhs)};
}

struct DdRunResult : RunResult<DdState>
{
  std::optional<DdState> equilibrium;  // thermal equilibrium, when the data allow one
};

inline DdRunResult run_dd(const DdProblem& pb, const BScheme& scheme, const StepperConfig& cfg,
                          const StepObserver<DdState>& observe = {})
{
  DdRunResult out;
  out.steady = solve_dd_steady(pb.mesh, pb.data, scheme, cfg.newton);
  if (thermal_compatible(pb.mesh, pb.data)) {
    const auto [an, ap] = thermal_constants(pb.mesh, pb.data);
    out.equilibrium = solve_dd_thermal(pb.mesh, pb.data, an, ap, cfg.newton);
  }
  out.trace = EntropyTrace({"t", "dt", "E_inf", "E_eq"});
  const double lambda = pb.data.lambda;
  const auto record = [&](double t, double dt, const DdState& s) {
    const double e_inf = dd_entropy(pb.mesh, s, out.steady, lambda);
    const double e_eq = out.equilibrium ? dd_entropy(pb.mesh, s, *out.equilibrium, lambda)
                                        : std::numeric_limits<double>::quiet_NaN();
    out.trace.add({t, dt, e_inf, e_eq});
    if (observe) observe(t, dt, s);
    return e_inf;
  };
  const auto step = [&](const DdState& s, double dt) { return step_dd(pb.mesh, pb.data, scheme, s, dt, cfg.newton); };
  out.final_state = dd_initial_state(pb);
  out.status = run_transient(out.final_state, step, record, cfg);
  return out;
}

}  // namespace entrofv
