#pragma once

// Van Roosbroeck drift-diffusion system with unit mobilities:
//   d_t N - div(grad N - N grad V) = 0
//   d_t P - div(grad P + P grad V) = 0
//   -lambda^2 Laplace V = P - N + C
// discretized with B-scheme fluxes
//   F = tau (B(-DV) N_K - B(DV) N_{K,sigma}),  G = tau (B(DV) P_K - B(-DV) P_{K,sigma}).
// Unknowns are stacked as [N; P; V], each block one value per cell.

#include "entrofv/bscheme.hpp"
#include "entrofv/linalg.hpp"
#include "entrofv/mesh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace entrofv {

struct DdData
{
  Vector doping;       // C_K
  double lambda = 1.0; // Debye length
  Vector n_dirichlet;  // per edge, used on Dirichlet edges
  Vector p_dirichlet;
  Vector v_dirichlet;
};

struct DdState
{
  Vector n;
  Vector p;
  Vector v;

  Vector stacked() const
  {
    Vector x(n.size() + p.size() + v.size());
    x << n, p, v;
    return x;
  }
  static DdState unstack(const Vector& x)
  {
    const Index c = x.size() / 3;
    return {x.segment(0, c), x.segment(c, c), x.segment(2 * c, c)};
  }
};

inline void check_dd_data(const Mesh& mesh, const DdData& dd)
{
  const auto nc = static_cast<Index>(mesh.num_cells()), ne = static_cast<Index>(mesh.num_edges());
  if (dd.doping.size() != nc) throw DataError("doping needs one value per cell");
  if (!(dd.lambda > 0)) throw DataError("Debye length must be positive");
  if (dd.n_dirichlet.size() != ne || dd.p_dirichlet.size() != ne || dd.v_dirichlet.size() != ne)
    throw DataError("drift-diffusion Dirichlet data needs one value per edge");
  for (Index e = 0; e < ne; ++e)
    if (mesh.edge(e).tag == EdgeTag::Dirichlet && !(dd.n_dirichlet[e] > 0 && dd.p_dirichlet[e] > 0))
      throw DataError("Dirichlet densities must be positive on edge " + std::to_string(e));
}

/// lambda^2-scaled TPFA Laplacian A and boundary vector b so that the
/// Poisson equation reads A V = b + m(K)(P - N + C).
struct PoissonOperator
{
  SparseMatrix matrix;
  Vector boundary;
};

inline PoissonOperator assemble_poisson(const Mesh& mesh, double lambda, const Vector& v_dirichlet)
{
  if (!(lambda > 0)) throw DataError("Debye length must be positive");
  const auto n = static_cast<Index>(mesh.num_cells());
  const double l2 = lambda * lambda;
  PoissonOperator op{{}, Vector::Zero(n)};
  std::vector<Triplet> t;
  for (Index ei = 0; ei < static_cast<Index>(mesh.num_edges()); ++ei) {
    const Edge& e = mesh.edge(ei);
    if (e.tag == EdgeTag::Neumann) continue;
    const double w = l2 * e.transmissibility;
    const Index k = e.cells[0];
    t.emplace_back(k, k, w);
    if (e.interior()) {
      const Index l = e.cells[1];
      t.emplace_back(l, l, w);
      t.emplace_back(k, l, -w);
      t.emplace_back(l, k, -w);
    } else {
      op.boundary[k] += w * v_dirichlet[ei];
    }
  }
  op.matrix = assemble(n, t);
  return op;
}

/// Electron flux F_{K,sigma} (`electrons`) or hole flux G_{K,sigma}, with the
/// neighbor convention of the scheme. Zero on Neumann edges.
inline double dd_flux(const Mesh& mesh, const DdData& dd, const BScheme& scheme, const DdState& s, Index cell,
                      Index ei, bool electrons)
{
  const Edge& e = mesh.edge(ei);
  if (e.tag == EdgeTag::Neumann) return 0.0;
  const Vector& u = electrons ? s.n : s.p;
  double dv, u_nb;
  if (e.interior()) {
    const Index l = e.cells[0] == cell ? e.cells[1] : e.cells[0];
    dv = s.v[l] - s.v[cell];
    u_nb = u[l];
  } else {
    dv = dd.v_dirichlet[ei] - s.v[cell];
    u_nb = electrons ? dd.n_dirichlet[ei] : dd.p_dirichlet[ei];
  }
  const double sgn = electrons ? 1.0 : -1.0;
  return e.transmissibility * (scheme(-sgn * dv) * u[cell] - scheme(sgn * dv) * u_nb);
}

/// Stacked residual and exact Jacobian at `s`. With `prev` and `dt` the
/// backward Euler step from `prev`; without, the steady scheme.
inline Linearization assemble_dd_residual(const Mesh& mesh, const DdData& dd, const BScheme& scheme,
                                          const DdState* prev, std::optional<double> dt, const DdState& s)
{
  const auto c = static_cast<Index>(mesh.num_cells());
  if (s.n.size() != c || s.p.size() != c || s.v.size() != c) throw DataError("DD state needs one value per cell");
  if (dt.has_value() != (prev != nullptr)) throw DataError("transient DD residual needs both a previous state and dt");
  if (dt && !(*dt > 0)) throw DataError("time step must be positive");
  const double l2 = dd.lambda * dd.lambda;

  Linearization lin;
  lin.residual = Vector::Zero(3 * c);
  std::vector<Triplet> t;
  t.reserve(6 * c + 20 * mesh.num_edges());
  const Index N = 0, P = c, V = 2 * c;

  for (Index k = 0; k < c; ++k) {
    const double mk = mesh.cell(k).measure;
    if (dt) {
      lin.residual[N + k] = mk * (s.n[k] - prev->n[k]) / *dt;
      lin.residual[P + k] = mk * (s.p[k] - prev->p[k]) / *dt;
      t.emplace_back(N + k, N + k, mk / *dt);
      t.emplace_back(P + k, P + k, mk / *dt);
    }
    lin.residual[V + k] = -mk * (s.p[k] - s.n[k] + dd.doping[k]);
    t.emplace_back(V + k, N + k, mk);
    t.emplace_back(V + k, P + k, -mk);
  }

  for (Index ei = 0; ei < static_cast<Index>(mesh.num_edges()); ++ei) {
    const Edge& e = mesh.edge(ei);
    if (e.tag == EdgeTag::Neumann) continue;
    const double tau = e.transmissibility;
    const Index k = e.cells[0];
    const bool inner = e.interior();
    const Index l = inner ? e.cells[1] : -1;
    const double dv = (inner ? s.v[l] : dd.v_dirichlet[ei]) - s.v[k];
    const double nl = inner ? s.n[l] : dd.n_dirichlet[ei];
    const double pl = inner ? s.p[l] : dd.p_dirichlet[ei];
    const double bm = scheme(-dv), bp = scheme(dv);
    const double dbm = scheme.derivative(-dv), dbp = scheme.derivative(dv);

    // Fluxes seen from K; from L they change sign (conservativity).
    const double f = tau * (bm * s.n[k] - bp * nl);
    const double g = tau * (bp * s.p[k] - bm * pl);
    const double df_ddv = tau * (-dbm * s.n[k] - dbp * nl);
    const double dg_ddv = tau * (dbp * s.p[k] + dbm * pl);

    lin.residual[N + k] += f;
    lin.residual[P + k] += g;
    lin.residual[V + k] -= l2 * tau * dv;
    t.emplace_back(N + k, N + k, tau * bm);
    t.emplace_back(N + k, V + k, -df_ddv);
    t.emplace_back(P + k, P + k, tau * bp);
    t.emplace_back(P + k, V + k, -dg_ddv);
    t.emplace_back(V + k, V + k, l2 * tau);
    if (inner) {
      lin.residual[N + l] -= f;
      lin.residual[P + l] -= g;
      lin.residual[V + l] += l2 * tau * dv;
      t.emplace_back(N + k, N + l, -tau * bp);
      t.emplace_back(N + k, V + l, df_ddv);
      t.emplace_back(P + k, P + l, -tau * bm);
      t.emplace_back(P + k, V + l, dg_ddv);
      t.emplace_back(N + l, N + k, -tau * bm);
      t.emplace_back(N + l, N + l, tau * bp);
      t.emplace_back(N + l, V + k, df_ddv);
      t.emplace_back(N + l, V + l, -df_ddv);
      t.emplace_back(P + l, P + k, -tau * bp);
      t.emplace_back(P + l, P + l, tau * bm);
      t.emplace_back(P + l, V + k, dg_ddv);
      t.emplace_back(P + l, V + l, -dg_ddv);
      t.emplace_back(V + k, V + l, -l2 * tau);
      t.emplace_back(V + l, V + l, l2 * tau);
      t.emplace_back(V + l, V + k, -l2 * tau);
    }
  }
  lin.jacobian = assemble(3 * c, t);
  return lin;
}

/// Residual and Jacobian of the nonlinear Poisson equation for the thermal
/// equilibrium potential, N = exp(alpha_n + V), P = exp(alpha_p - V).
inline Linearization assemble_thermal_residual(const Mesh& mesh, const DdData& dd, double alpha_n, double alpha_p,
                                               const Vector& v)
{
  const auto op = assemble_poisson(mesh, dd.lambda, dd.v_dirichlet);
  Linearization lin;
  lin.residual = op.matrix * v - op.boundary;
  std::vector<Triplet> t;
  for (Index k = 0; k < v.size(); ++k) {
    const double mk = mesh.cell(k).measure;
    const double en = std::exp(alpha_n + v[k]), ep = std::exp(alpha_p - v[k]);
    lin.residual[k] -= mk * (ep - en + dd.doping[k]);
    t.emplace_back(k, k, mk * (ep + en));
  }
  SparseMatrix diag(v.size(), v.size());
  diag.setFromTriplets(t.begin(), t.end());
  lin.jacobian = op.matrix + diag;
  return lin;
}

}  // namespace entrofv
