#pragma once

// Steady-state solvers, backward Euler steps and the adaptive time stepper.

#include "entrofv/dd_scheme.hpp"
#include "entrofv/fp_scheme.hpp"
#include "entrofv/pme_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace entrofv {

/// Steady Newton solve that did not converge; carries the last iterate.
class NonConvergenceError : public Error
{
public:
  NonConvergenceError(const std::string& what, Vector last) : Error(what), last_(std::move(last)) {}
  const Vector& last_iterate() const { return last_; }

private:
  Vector last_;
};

struct StepperConfig
{
  double dt0 = 1e-3;
  double dt_min = 1e-8;
  double dt_max = 1e-2;
  double grow = 2.0;
  double shrink = 2.0;
  double final_time = 1.0;
  double entropy_floor = 1e-14;  // stop once primary < floor * initial; 0 disables
  NewtonConfig newton{};

  void check() const
  {
    if (!(dt_min > 0 && dt_min <= dt0 && dt0 <= dt_max)) throw DataError("need 0 < dt_min <= dt0 <= dt_max");
    if (!(grow >= 1 && shrink > 1)) throw DataError("need grow >= 1 and shrink > 1");
    if (!(final_time > 0)) throw DataError("final time must be positive");
  }

  static StepperConfig fixed(double dt, double final_time)
  {
    StepperConfig c;
    c.dt0 = c.dt_max = dt;
    c.dt_min = std::min(c.dt_min, dt);
    c.final_time = final_time;
    return c;
  }
};

// ---------------------------------------------------------------------------
// Fokker-Planck

inline Vector solve_fp_steady(const Mesh& mesh, const TransportData& data, const BScheme& scheme,
                              const AssemblyOptions& opts = {})
{
  const auto op = assemble_fp_operator(mesh, data, scheme, opts);
  return solve_linear(op.matrix, op.boundary);
}

/// Implicit steps (diag(m) + dt M) f^{n+1} = diag(m) f^n + dt b^D, with the
/// factorization cached per time step.
class FpStepper
{
public:
  FpStepper(const Mesh& mesh, const TransportData& data, const BScheme& scheme, const AssemblyOptions& opts = {})
    : op_(assemble_fp_operator(mesh, data, scheme, opts)), measure_(static_cast<Index>(mesh.num_cells()))
  {
    for (Index k = 0; k < measure_.size(); ++k) measure_[k] = mesh.cell(k).measure;
  }

  const FpOperator& fp_operator() const { return op_; }

  Vector step(const Vector& f_prev, double dt)
  {
    if (!(dt > 0)) throw DataError("time step must be positive");
    if (f_prev.size() != measure_.size()) throw DataError("state needs one value per cell");
    auto [it, fresh] = solvers_.try_emplace(dt);
    if (fresh) {
      SparseMatrix a = dt * op_.matrix;
      for (Index k = 0; k < measure_.size(); ++k) a.coeffRef(k, k) += measure_[k];
      try {
        it->second.factorize(a);
      } catch (...) {
        solvers_.erase(it);
        throw;
      }
    }
    return it->second.solve(measure_.cwiseProduct(f_prev) + dt * op_.boundary);
  }

private:
  FpOperator op_;
  Vector measure_;
  std::map<double, DirectSolver> solvers_;
};

inline Vector step_fp(const Mesh& mesh, const TransportData& data, const BScheme& scheme, const Vector& f_prev,
                      double dt, const AssemblyOptions& opts = {})
{
  return FpStepper(mesh, data, scheme, opts).step(f_prev, dt);
}

// ---------------------------------------------------------------------------
// Porous medium

/// Steady state: Laplace problem in u = f^m with u^D = (f^D)^m. Without
/// Dirichlet edges the steady state is the mass average of `initial`.
inline Vector solve_pme_steady(const Mesh& mesh, const Vector& f_dirichlet, double m,
                               const std::optional<Vector>& initial = std::nullopt)
{
  if (!(m >= 1)) throw DataError("PME exponent must be >= 1");
  const auto n = static_cast<Index>(mesh.num_cells());
  if (mesh.count(EdgeTag::Dirichlet) == 0) {
    if (!initial) throw DataError("all-Neumann PME steady state needs initial data");
    double mass = 0, area = 0;
    for (Index k = 0; k < n; ++k) mass += mesh.cell(k).measure * (*initial)[k], area += mesh.cell(k).measure;
    return Vector::Constant(n, mass / area);
  }
  std::vector<Triplet> t;
  Vector b = Vector::Zero(n);
  for (Index ei = 0; ei < static_cast<Index>(mesh.num_edges()); ++ei) {
    const Edge& e = mesh.edge(ei);
    if (e.tag == EdgeTag::Neumann) continue;
    const Index k = e.cells[0];
    t.emplace_back(k, k, e.transmissibility);
    if (e.interior()) {
      const Index l = e.cells[1];
      t.emplace_back(l, l, e.transmissibility);
      t.emplace_back(k, l, -e.transmissibility);
      t.emplace_back(l, k, -e.transmissibility);
    } else {
      if (!(f_dirichlet[ei] > 0)) throw DataError("Dirichlet value must be positive on edge " + std::to_string(ei));
      b[k] += e.transmissibility * std::pow(f_dirichlet[ei], m);
    }
  }
  const Vector u = solve_linear(assemble(n, t), b);
  Vector f(n);
  for (Index k = 0; k < n; ++k) f[k] = std::pow(std::max(u[k], 0.0), 1.0 / m);
  return f;
}

/// Newton solve of one implicit step started at f_prev. Returns nullopt on
/// non-convergence or a converged state with negative entries beyond roundoff.
inline std::optional<Vector> step_pme(const Mesh& mesh, const Vector& f_prev, double m, double dt,
                                      const Vector& f_dirichlet, const NewtonConfig& newton = {})
{
  auto system = [&](const Vector& f) { return assemble_pme_residual(mesh, f_prev, f, m, dt, f_dirichlet); };
  auto res = newton_solve(system, f_prev, newton);
  if (!res.converged) return std::nullopt;
  double min_measure = mesh.cell(0).measure;
  for (const auto& c : mesh.cells()) min_measure = std::min(min_measure, c.measure);
  const double slack = 10 * newton.tolerance * dt / min_measure;
  for (Index k = 0; k < res.solution.size(); ++k) {
    if (res.solution[k] < -slack) return std::nullopt;
    res.solution[k] = std::max(res.solution[k], 0.0);
  }
  return res.solution;
}

// ---------------------------------------------------------------------------
// Drift-diffusion

/// Largest violation of log N^D - V^D = alpha_n, log P^D + V^D = alpha_p over Dirichlet edges.
inline double thermal_mismatch(const Mesh& mesh, const DdData& dd, double alpha_n, double alpha_p)
{
  double worst = 0;
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e) {
    if (mesh.edge(e).tag != EdgeTag::Dirichlet) continue;
    worst = std::max(worst, std::abs(std::log(dd.n_dirichlet[e]) - dd.v_dirichlet[e] - alpha_n));
    worst = std::max(worst, std::abs(std::log(dd.p_dirichlet[e]) + dd.v_dirichlet[e] - alpha_p));
  }
  return worst;
}

/// Thermal constants (alpha_n, alpha_p) read off the first Dirichlet edge.
inline std::pair<double, double> thermal_constants(const Mesh& mesh, const DdData& dd)
{
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e)
    if (mesh.edge(e).tag == EdgeTag::Dirichlet)
      return {std::log(dd.n_dirichlet[e]) - dd.v_dirichlet[e], std::log(dd.p_dirichlet[e]) + dd.v_dirichlet[e]};
  throw DataError("no Dirichlet edge");
}

inline bool thermal_compatible(const Mesh& mesh, const DdData& dd, double tol = 1e-12)
{
  const auto [an, ap] = thermal_constants(mesh, dd);
  return thermal_mismatch(mesh, dd, an, ap) <= tol;
}

inline DdState solve_dd_thermal(const Mesh& mesh, const DdData& dd, double alpha_n, double alpha_p,
                                const NewtonConfig& newton = {})
{
  check_dd_data(mesh, dd);
  if (thermal_mismatch(mesh, dd, alpha_n, alpha_p) > 1e-12)
    throw DataError("boundary data are not compatible with thermal equilibrium");
  const auto system = [&](const Vector& v) { return assemble_thermal_residual(mesh, dd, alpha_n, alpha_p, v); };
  const auto n = static_cast<Index>(mesh.num_cells());
  // Linear Poisson with C only, then V = 0 if that start fails.
  const auto op = assemble_poisson(mesh, dd.lambda, dd.v_dirichlet);
  Vector rhs = op.boundary;
  for (Index k = 0; k < n; ++k) rhs[k] += mesh.cell(k).measure * dd.doping[k];
  auto res = newton_solve(system, solve_linear(op.matrix, rhs), newton);
  if (!res.converged) res = newton_solve(system, Vector::Zero(n), newton);
  if (!res.converged) throw NonConvergenceError("thermal equilibrium Newton did not converge", res.solution);
  DdState s{Vector(n), Vector(n), res.solution};
  for (Index k = 0; k < n; ++k) s.n[k] = std::exp(alpha_n + s.v[k]), s.p[k] = std::exp(alpha_p - s.v[k]);
  return s;
}

/// Implicit step of the coupled system; nullopt on non-convergence or
/// non-positive densities.
inline std::optional<DdState> step_dd(const Mesh& mesh, const DdData& dd, const BScheme& scheme,
                                      const DdState& prev, double dt, const NewtonConfig& newton = {})
{
  const auto system = [&](const Vector& x) {
    return assemble_dd_residual(mesh, dd, scheme, &prev, dt, DdState::unstack(x));
  };
  const auto res = newton_solve(system, prev.stacked(), newton);
  if (!res.converged) return std::nullopt;
  DdState s = DdState::unstack(res.solution);
  if (!(s.n.minCoeff() > 0 && s.p.minCoeff() > 0)) return std::nullopt;
  return s;
}

namespace detail {

/// Start for the biased steady Newton: V from the Poisson problem with
/// charge C, densities from harmonic quasi-Fermi levels.
inline DdState dd_initial_guess(const Mesh& mesh, const DdData& dd)
{
  const auto n = static_cast<Index>(mesh.num_cells());
  const auto op = assemble_poisson(mesh, dd.lambda, dd.v_dirichlet);
  const auto lap = assemble_poisson(mesh, 1.0, Vector::Zero(static_cast<Index>(mesh.num_edges())));
  const DirectSolver lap_solver(lap.matrix);
  const auto harmonic = [&](const Vector& edge_values) {
    const auto bnd = assemble_poisson(mesh, 1.0, edge_values);
    return lap_solver.solve(bnd.boundary);
  };
  Vector rhs = op.boundary;
  for (Index k = 0; k < n; ++k) rhs[k] += mesh.cell(k).measure * dd.doping[k];
  DdState s{Vector(n), Vector(n), solve_linear(op.matrix, rhs)};
  const auto ne = static_cast<Index>(mesh.num_edges());
  Vector phin(ne), phip(ne);
  for (Index e = 0; e < ne; ++e) {
    phin[e] = mesh.edge(e).tag == EdgeTag::Dirichlet ? std::log(dd.n_dirichlet[e]) - dd.v_dirichlet[e] : 0.0;
    phip[e] = mesh.edge(e).tag == EdgeTag::Dirichlet ? std::log(dd.p_dirichlet[e]) + dd.v_dirichlet[e] : 0.0;
  }
  const Vector qn = harmonic(phin), qp = harmonic(phip);
  for (Index k = 0; k < n; ++k) s.n[k] = std::exp(qn[k] + s.v[k]), s.p[k] = std::exp(qp[k] - s.v[k]);
  return s;
}

}  // namespace detail

/// Coupled steady Newton on (N, P, V). Starts from thermal equilibrium when
/// the boundary data allow it, else from a quasi-Fermi-level guess; if that
/// fails, pseudo-time stepping with growing steps brings the state close
/// enough for a final Newton solve.
inline DdState solve_dd_steady(const Mesh& mesh, const DdData& dd, const BScheme& scheme,
                               const NewtonConfig& newton = {})
{
  check_dd_data(mesh, dd);
  const auto system = [&](const Vector& x) {
    return assemble_dd_residual(mesh, dd, scheme, nullptr, std::nullopt, DdState::unstack(x));
  };
  DdState guess;
  if (thermal_compatible(mesh, dd)) {
    const auto [an, ap] = thermal_constants(mesh, dd);
    guess = solve_dd_thermal(mesh, dd, an, ap, newton);
  } else {
    guess = detail::dd_initial_guess(mesh, dd);
  }
  auto res = newton_solve(system, guess.stacked(), newton);
  if (res.converged && DdState::unstack(res.solution).n.minCoeff() > 0) return DdState::unstack(res.solution);

  DdState s = guess;
  double dt = 1e-3;
  for (int i = 0; i < 200; ++i) {
    auto next = step_dd(mesh, dd, scheme, s, dt, newton);
    if (!next) {
      dt /= 2;
      if (dt < 1e-10) break;
      continue;
    }
    s = *next;
    dt = std::min(dt * 2, 1e6);
    if (dt >= 1e2) {
      res = newton_solve(system, s.stacked(), newton);
      if (res.converged && DdState::unstack(res.solution).n.minCoeff() > 0) return DdState::unstack(res.solution);
    }
  }
  throw NonConvergenceError("drift-diffusion steady Newton did not converge", res.solution);
}

// ---------------------------------------------------------------------------
// Adaptive time stepping

struct TransientStatus
{
  double time = 0.0;
  int accepted = 0;
  int rejected = 0;
  bool aborted = false;      // dt fell below dt_min
  bool reached_floor = false;
};

/// Backward Euler driver. `step(state, dt)` returns the next state or
/// nullopt (non-convergence); `record(t, dt, state)` is called at t = 0
/// with dt = 0 and after every accepted step, and returns the primary
/// entropy used by the floor criterion.
template <class State, class Step, class Record>
TransientStatus run_transient(State& state, Step&& step, Record&& record, const StepperConfig& cfg)
{
  cfg.check();
  TransientStatus st;
  const double h0 = record(0.0, 0.0, state);
  double dt_prev = cfg.dt0 / cfg.grow;
  while (st.time < cfg.final_time * (1 - 1e-12)) {
    double dt = std::clamp(cfg.grow * dt_prev, cfg.dt_min, cfg.dt_max);
    dt = std::min(dt, cfg.final_time - st.time);
    std::optional<State> next;
    while (!(next = step(state, dt))) {
      ++st.rejected;
      dt /= cfg.shrink;
      if (dt < cfg.dt_min) {
        st.aborted = true;
        return st;
      }
    }
    state = std::move(*next);
    st.time += dt;
    ++st.accepted;
    dt_prev = dt;
    const double h = record(st.time, dt, state);
    if (cfg.entropy_floor > 0 && h < cfg.entropy_floor * h0) {
      st.reached_floor = true;
      break;
    }
  }
  return st;
}

}  // namespace entrofv
