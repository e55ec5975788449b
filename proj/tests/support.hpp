#pragma once

// Small meshes and random fields shared by the unit tests.

#include "entrofv.hpp"

#include <random>

namespace testing_support {

using namespace entrofv;

/// Unit square split at x1 = 0.5 into two rectangles with centers
/// (0.25, 0.5) and (0.75, 0.5). Left and right sides are Dirichlet, top and
/// bottom Neumann: interior tau = 2, Dirichlet tau = 4.
inline Mesh two_cell_mesh(unsigned dirichlet = BoundarySpec::Left | BoundarySpec::Right)
{
  std::vector<std::vector<Point2>> polys{{{0, 0}, {0.5, 0}, {0.5, 1}, {0, 1}}, {{0.5, 0}, {1, 0}, {1, 1}, {0.5, 1}}};
  return Mesh::from_polygons(polys, {{0.25, 0.5}, {0.75, 0.5}}, BoundarySpec::unit_square(dirichlet), 1.0);
}

/// n x n grid of squares with cell-centered points.
inline Mesh square_grid(int n, unsigned dirichlet = 15)
{
  std::vector<std::vector<Point2>> polys;
  std::vector<Point2> centers;
  const double h = 1.0 / n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      polys.push_back({{i * h, j * h}, {(i + 1) * h, j * h}, {(i + 1) * h, (j + 1) * h}, {i * h, (j + 1) * h}});
      centers.push_back({(i + 0.5) * h, (j + 0.5) * h});
    }
  return Mesh::from_polygons(polys, centers, BoundarySpec::unit_square(dirichlet), 1.0);
}

inline Index interior_edge(const Mesh& mesh)
{
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e)
    if (mesh.edge(e).interior()) return e;
  return -1;
}

inline Index edge_on_side(const Mesh& mesh, double x_mid, double tol = 1e-12)
{
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e)
    if (!mesh.edge(e).interior() && std::abs(mesh.edge(e).segment->midpoint().x - x_mid) < tol) return e;
  return -1;
}

class Random
{
public:
  explicit Random(unsigned seed = 12345) : gen_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }

  Vector vector(Index n, double a, double b)
  {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform(a, b);
    return v;
  }

  std::mt19937& engine() { return gen_; }

private:
  std::mt19937 gen_;
};

/// Transport data with random positive diffusion, random antisymmetric
/// advection and random positive Dirichlet values.
inline TransportData random_transport(const Mesh& mesh, Random& rng, double umax = 1.0)
{
  const auto ne = static_cast<Index>(mesh.num_edges());
  TransportData d;
  d.diffusion = rng.vector(ne, 0.5, 2.0);
  d.advection = rng.vector(ne, -umax, umax);
  d.dirichlet = rng.vector(ne, 0.5, 2.0);
  return d;
}

/// Max-norm relative mismatch between a Jacobian-vector product and central
/// differences of `residual` along random directions.
template <class Residual>
double jacobian_mismatch(Residual&& residual, const SparseMatrix& jac, const Vector& x, Random& rng, int directions = 5,
                         double h = 1e-7)
{
  double worst = 0;
  for (int i = 0; i < directions; ++i) {
    const Vector v = rng.vector(x.size(), -1.0, 1.0);
    const Vector fd = (residual(Vector(x + h * v)) - residual(Vector(x - h * v))) / (2 * h);
    const Vector jv = jac * v;
    worst = std::max(worst, (fd - jv).cwiseAbs().maxCoeff() / std::max(1.0, jv.cwiseAbs().maxCoeff()));
  }
  return worst;
}

}  // namespace testing_support
