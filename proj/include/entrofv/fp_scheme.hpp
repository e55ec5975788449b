#pragma once

// B-scheme discretization of the linear Fokker-Planck equation
//   d_t f + div(U f - a grad f) = 0
// with Dirichlet and no-flux boundary edges.

#include "entrofv/linalg.hpp"
#include "entrofv/transport.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace entrofv {

class PecletError : public Error
{
public:
  explicit PecletError(std::vector<PecletViolation> violations)
    : Error("Peclet condition violated on " + std::to_string(violations.size()) + " incidence(s)"),
      violations_(std::move(violations))
  {}
  const std::vector<PecletViolation>& violations() const { return violations_; }

private:
  std::vector<PecletViolation> violations_;
};

struct AssemblyOptions
{
  double beta = 0.05;  // positivity floor for B(|U| d / a)
  bool force = false;  // assemble even when the floor is violated
};

/// Coefficients B^-_{K,sigma} = B(-U d/a) and B^+_{K,sigma} = B(U d/a), zero on Neumann edges.
struct FluxCoefficients
{
  double minus = 0.0;
  double plus = 0.0;
};

inline FluxCoefficients flux_coefficients(const Mesh& mesh, const TransportData& data, const BScheme& scheme,
                                          Index cell, Index ei)
{
  const Edge& e = mesh.edge(ei);
  if (e.tag == EdgeTag::Neumann) return {};
  const int side = e.side_of(cell);
  if (side < 0) throw DataError("cell " + std::to_string(cell) + " is not incident to edge " + std::to_string(ei));
  const double x = data.advection_from(ei, side) * e.dist / data.diffusion[ei];
  return {scheme(-x), scheme(x)};
}

/// Neighbor value f_{K,sigma}: f_L, f^D_sigma or f_K by edge tag.
inline double neighbor_value(const Mesh& mesh, const Vector& f, const Vector& f_dirichlet, Index cell, Index ei)
{
  const Edge& e = mesh.edge(ei);
  switch (e.tag) {
    case EdgeTag::Interior: return f[e.cells[0] == cell ? e.cells[1] : e.cells[0]];
    case EdgeTag::Dirichlet: return f_dirichlet[ei];
    case EdgeTag::Neumann: return f[cell];
  }
  return 0.0;
}

/// Steady operator M and boundary vector b^D with M f = b^D the steady scheme.
struct FpOperator
{
  SparseMatrix matrix;
  Vector boundary;
  std::set<Index> dirichlet_cells;
};

inline FpOperator assemble_fp_operator(const Mesh& mesh, const TransportData& data, const BScheme& scheme,
                                       const AssemblyOptions& opts = {})
{
  check_transport(mesh, data);
  if (!opts.force) {
    auto violations = peclet_guard(mesh, data, scheme, opts.beta);
    if (!violations.empty()) throw PecletError(std::move(violations));
  }
  const auto n = static_cast<Index>(mesh.num_cells());
  FpOperator op;
  op.boundary = Vector::Zero(n);
  std::vector<Triplet> t;
  t.reserve(4 * mesh.num_edges());
  for (Index ei = 0; ei < static_cast<Index>(mesh.num_edges()); ++ei) {
    const Edge& e = mesh.edge(ei);
    if (e.tag == EdgeTag::Neumann) continue;
    const double w = e.transmissibility * data.diffusion[ei];
    const double x = data.advection[ei] * e.dist / data.diffusion[ei];
    const double bm = scheme(-x), bp = scheme(x);
    const Index k = e.cells[0];
    t.emplace_back(k, k, w * bm);
    if (e.interior()) {
      const Index l = e.cells[1];
      t.emplace_back(k, l, -w * bp);
      t.emplace_back(l, l, w * bp);
      t.emplace_back(l, k, -w * bm);
    } else {
      op.boundary[k] += w * bp * data.dirichlet[ei];
      op.dirichlet_cells.insert(k);
    }
  }
  op.matrix = assemble(n, t);
  return op;
}

/// F_{K,sigma} = tau a (B^- f_K - B^+ f_{K,sigma}); zero on Neumann edges.
inline double flux_fp(const Mesh& mesh, const TransportData& data, const BScheme& scheme, const Vector& f,
                      Index cell, Index ei)
{
  const Edge& e = mesh.edge(ei);
  if (e.tag == EdgeTag::Neumann) return 0.0;
  const auto c = flux_coefficients(mesh, data, scheme, cell, ei);
  return e.transmissibility * data.diffusion[ei] *
         (c.minus * f[cell] - c.plus * neighbor_value(mesh, f, data.dirichlet, cell, ei));
}

/// Edge steady weight f^inf_{B,sigma} = min(B^- f_K, B^+ f_{K,sigma}); does
/// not depend on which incident cell is used, zero on Neumann edges.
inline double edge_steady_weight(const Mesh& mesh, const TransportData& data, const BScheme& scheme,
                                 const Vector& f_inf, Index ei, std::optional<Index> cell = std::nullopt)
{
  const Edge& e = mesh.edge(ei);
  if (e.tag == EdgeTag::Neumann) return 0.0;
  const Index k = cell.value_or(e.cells[0]);
  const auto c = flux_coefficients(mesh, data, scheme, k, ei);
  return std::min(c.minus * f_inf[k], c.plus * neighbor_value(mesh, f_inf, data.dirichlet, k, ei));
}

/// Sum over edges of each cell of the flux, i.e. M f - b^D.
inline Vector fp_divergence(const Mesh& mesh, const TransportData& data, const BScheme& scheme, const Vector& f)
{
  Vector out = Vector::Zero(static_cast<Index>(mesh.num_cells()));
  for (Index k = 0; k < out.size(); ++k)
    for (Index ei : mesh.cell(k).edges) out[k] += flux_fp(mesh, data, scheme, f, k, ei);
  return out;
}

}  // namespace entrofv
