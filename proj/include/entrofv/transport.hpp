#pragma once

// Discrete problem data living on the mesh graph: edge diffusion a_sigma,
// oriented advection U_{K,sigma} and Dirichlet values f^D_sigma.

#include "entrofv/bscheme.hpp"
#include "entrofv/mesh.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace entrofv {

using ScalarField = std::function<double(Point2)>;

struct TransportData
{
  Vector diffusion;  // a_sigma, one per edge
  Vector advection;  // U_{K,sigma} for K = edge.cells[0]; antisymmetric on interior edges
  Vector dirichlet;  // f^D_sigma on Dirichlet edges, unused elsewhere

  /// U_{K,sigma} seen from side `side` (0 or 1) of edge `e`.
  double advection_from(Index e, int side) const { return side == 0 ? advection[e] : -advection[e]; }
};

/// Mean of `fn` over the segment of edge `e` (composite 3-point Gauss).
inline double edge_mean(const Mesh& mesh, Index e, const ScalarField& fn)
{
  const auto& seg = mesh.edge(e).segment;
  if (!seg) throw GeometryError("edge " + std::to_string(e) + " has no geometry");
  constexpr int panels = 16;
  static const std::array<double, 3> node{-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const std::array<double, 3> weight{5.0 / 9, 8.0 / 9, 5.0 / 9};
  double sum = 0;
  for (int p = 0; p < panels; ++p) {
    for (int q = 0; q < 3; ++q) {
      const double s = (p + 0.5 * (1 + node[q])) / panels;
      sum += weight[q] * fn(seg->a + s * (seg->b - seg->a));
    }
  }
  return sum / (2.0 * panels);
}

/// Edge means of `fn` on Dirichlet edges, zero elsewhere.
inline Vector dirichlet_values(const Mesh& mesh, const ScalarField& fn)
{
  Vector out = Vector::Zero(static_cast<Index>(mesh.num_edges()));
  for (Index e = 0; e < out.size(); ++e)
    if (mesh.edge(e).tag == EdgeTag::Dirichlet) out[e] = edge_mean(mesh, e, fn);
  return out;
}

/// Cell averages approximated by the value at the centroid.
inline Vector cell_values(const Mesh& mesh, const ScalarField& fn)
{
  Vector out(static_cast<Index>(mesh.num_cells()));
  for (Index k = 0; k < out.size(); ++k) out[k] = fn(mesh.centroid(k));
  return out;
}

/// Values of `fn` at the cell centers x_K.
inline Vector center_values(const Mesh& mesh, const ScalarField& fn)
{
  Vector out(static_cast<Index>(mesh.num_cells()));
  for (Index k = 0; k < out.size(); ++k) out[k] = fn(mesh.cell(k).center);
  return out;
}

/// Harmonic edge diffusion for cellwise coefficients: d a_K a_L / (d_L a_K + d_K a_L)
/// on interior edges, a_K on exterior ones.
inline Vector edge_diffusion(const Mesh& mesh, const Vector& a_cells)
{
  if (a_cells.size() != static_cast<Index>(mesh.num_cells())) throw DataError("diffusion needs one value per cell");
  for (Index k = 0; k < a_cells.size(); ++k)
    if (!(a_cells[k] > 0)) throw DataError("diffusion must be positive (cell " + std::to_string(k) + ")");
  Vector a(static_cast<Index>(mesh.num_edges()));
  for (Index ei = 0; ei < a.size(); ++ei) {
    const Edge& e = mesh.edge(ei);
    const double ak = a_cells[e.cells[0]];
    if (!e.interior()) {
      a[ei] = ak;
      continue;
    }
    const double al = a_cells[e.cells[1]];
    a[ei] = e.dist * ak * al / (e.cell_dist[1] * ak + e.cell_dist[0] * al);
  }
  return a;
}

/// TransportData without advection from cellwise diffusion and a Dirichlet function.
inline TransportData discretize_coefficients(const Mesh& mesh, const Vector& a_cells, const ScalarField& f_dirichlet)
{
  TransportData data;
  data.diffusion = edge_diffusion(mesh, a_cells);
  data.advection = Vector::Zero(static_cast<Index>(mesh.num_edges()));
  data.dirichlet = dirichlet_values(mesh, f_dirichlet);
  return data;
}

/// U_{K,sigma} d_sigma = phi_{K,sigma} - phi_K. `phi_edges` holds phi at the
/// projection of the cell center on each Dirichlet edge (NaN = missing).
inline Vector advection_from_potential(const Mesh& mesh, const Vector& phi_cells, const Vector& phi_edges)
{
  Vector u = Vector::Zero(static_cast<Index>(mesh.num_edges()));
  for (Index ei = 0; ei < u.size(); ++ei) {
    const Edge& e = mesh.edge(ei);
    const double phik = phi_cells[e.cells[0]];
    if (e.interior()) {
      u[ei] = (phi_cells[e.cells[1]] - phik) / e.dist;
    } else if (e.tag == EdgeTag::Dirichlet) {
      if (ei >= phi_edges.size() || !std::isfinite(phi_edges[ei]))
        throw DataError("potential missing on Dirichlet edge " + std::to_string(ei));
      u[ei] = (phi_edges[ei] - phik) / e.dist;
    }
  }
  return u;
}

inline Vector advection_from_potential(const Mesh& mesh, const ScalarField& phi)
{
  Vector edges = Vector::Constant(static_cast<Index>(mesh.num_edges()), std::numeric_limits<double>::quiet_NaN());
  for (Index ei = 0; ei < edges.size(); ++ei)
    if (mesh.edge(ei).tag == EdgeTag::Dirichlet) edges[ei] = phi(mesh.projection(mesh.edge(ei).cells[0], ei));
  return advection_from_potential(mesh, center_values(mesh, phi), edges);
}

/// Throws DataError unless sizes match, a_sigma > 0 and f^D_sigma > 0.
inline void check_transport(const Mesh& mesh, const TransportData& data)
{
  const auto ne = static_cast<Index>(mesh.num_edges());
  if (data.diffusion.size() != ne || data.advection.size() != ne || data.dirichlet.size() != ne)
    throw DataError("transport data needs one value per edge");
  for (Index e = 0; e < ne; ++e) {
    if (!(data.diffusion[e] > 0)) throw DataError("diffusion must be positive on edge " + std::to_string(e));
    if (!std::isfinite(data.advection[e])) throw DataError("non-finite advection on edge " + std::to_string(e));
    if (mesh.edge(e).tag == EdgeTag::Dirichlet && !(data.dirichlet[e] > 0))
      throw DataError("Dirichlet value must be positive on edge " + std::to_string(e));
  }
}

struct PecletViolation
{
  Index cell;
  Index edge;
  double b_value;  // B(|U| d / a)
};

/// Incidences where B(|U_{K,sigma}| d_sigma / a_sigma) < beta.
inline std::vector<PecletViolation> peclet_guard(const Mesh& mesh, const TransportData& data, const BScheme& scheme,
                                                 double beta)
{
  std::vector<PecletViolation> out;
  for (Index ei = 0; ei < static_cast<Index>(mesh.num_edges()); ++ei) {
    const Edge& e = mesh.edge(ei);
    if (e.tag == EdgeTag::Neumann) continue;
    const double value = scheme(std::abs(data.advection[ei]) * e.dist / data.diffusion[ei]);
    if (!(value >= beta))
      for (int s = 0; s < e.cell_count(); ++s) out.push_back({e.cells[s], ei, value});
  }
  return out;
}

}  // namespace entrofv
