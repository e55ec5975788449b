#pragma once

// Backward Euler TPFA scheme for the porous medium equation
//   d_t f - Laplace(f^m) = 0,
//   m(K) (f_K - f_K^prev) / dt - sum_sigma tau_sigma D_{K,sigma}(f^m) = 0,
// with (f^D)^m on Dirichlet edges.

#include "entrofv/linalg.hpp"
#include "entrofv/mesh.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace entrofv {

/// sign(x) |x|^m, so Newton iterates may leave the positive cone.
inline double signed_pow(double x, double m) { return std::copysign(std::pow(std::abs(x), m), x); }

/// m |x|^(m-1), the derivative of signed_pow.
inline double signed_pow_derivative(double x, double m)
{
  if (m == 1.0) return 1.0;
  return m * std::pow(std::abs(x), m - 1);
}

/// Residual and exact Jacobian of the scheme at `f`. Without `dt` the
/// time derivative is dropped (steady scheme).
inline Linearization assemble_pme_residual(const Mesh& mesh, const Vector& f_prev, const Vector& f, double m,
                                           std::optional<double> dt, const Vector& f_dirichlet)
{
  const auto n = static_cast<Index>(mesh.num_cells());
  if (f.size() != n || f_prev.size() != n) throw DataError("PME state needs one value per cell");
  if (f_dirichlet.size() != static_cast<Index>(mesh.num_edges()))
    throw DataError("PME Dirichlet data needs one value per edge");
  if (!(m >= 1)) throw DataError("PME exponent must be >= 1");
  if (dt && !(*dt > 0)) throw DataError("time step must be positive");

  Linearization lin;
  lin.residual = Vector::Zero(n);
  std::vector<Triplet> t;
  t.reserve(n + 4 * mesh.num_edges());
  if (dt) {
    for (Index k = 0; k < n; ++k) {
      const double w = mesh.cell(k).measure / *dt;
      lin.residual[k] = w * (f[k] - f_prev[k]);
      t.emplace_back(k, k, w);
    }
  }
  for (Index ei = 0; ei < static_cast<Index>(mesh.num_edges()); ++ei) {
    const Edge& e = mesh.edge(ei);
    if (e.tag == EdgeTag::Neumann) continue;
    const Index k = e.cells[0];
    const double tau = e.transmissibility;
    const double uk = signed_pow(f[k], m), dk = tau * signed_pow_derivative(f[k], m);
    if (e.interior()) {
      const Index l = e.cells[1];
      const double ul = signed_pow(f[l], m), dl = tau * signed_pow_derivative(f[l], m);
      lin.residual[k] -= tau * (ul - uk);
      lin.residual[l] -= tau * (uk - ul);
      t.emplace_back(k, k, dk);
      t.emplace_back(k, l, -dl);
      t.emplace_back(l, l, dl);
      t.emplace_back(l, k, -dk);
    } else {
      lin.residual[k] -= tau * (std::pow(f_dirichlet[ei], m) - uk);
      t.emplace_back(k, k, dk);
    }
  }
  lin.jacobian = assemble(n, t);
  return lin;
}

}  // namespace entrofv
