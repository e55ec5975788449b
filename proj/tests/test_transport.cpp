#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace entrofv;
using testing_support::edge_on_side;
using testing_support::interior_edge;
using testing_support::two_cell_mesh;

TEST(EdgeMean, IntegratesPolynomialsExactly)
{
  const Mesh mesh = reference_mesh(0, BoundarySpec::unit_square(15));
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e) {
    const Segment s = *mesh.edge(e).segment;
    // Mean of x^2 along a segment: (a^2 + a b + b^2) / 3.
    const double expect = (s.a.x * s.a.x + s.a.x * s.b.x + s.b.x * s.b.x) / 3;
    EXPECT_NEAR(edge_mean(mesh, e, [](Point2 p) { return p.x * p.x; }), expect, 1e-15);
  }
}

TEST(EdgeMean, ExponentialOnSlantedEdge)
{
  const Mesh mesh = reference_mesh(0, BoundarySpec::unit_square(15));
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e) {
    const Segment s = *mesh.edge(e).segment;
    if (std::abs(s.a.x - s.b.x) < 1e-12) continue;
    const double expect = (std::exp(s.b.x) - std::exp(s.a.x)) / (s.b.x - s.a.x);
    EXPECT_NEAR(edge_mean(mesh, e, [](Point2 p) { return std::exp(p.x); }), expect, 1e-14);
  }
}

TEST(DirichletValues, ZeroOffDirichletEdges)
{
  const Mesh mesh = two_cell_mesh();
  const Vector v = dirichlet_values(mesh, [](Point2 p) { return 1 + p.x; });
  EXPECT_DOUBLE_EQ(v[edge_on_side(mesh, 0.0)], 1.0);
  EXPECT_DOUBLE_EQ(v[edge_on_side(mesh, 1.0)], 2.0);
  EXPECT_DOUBLE_EQ(v[interior_edge(mesh)], 0.0);
}

TEST(Advection, FromLinearPotentialOnTwoCells)
{
  const Mesh mesh = two_cell_mesh();
  const Vector u = advection_from_potential(mesh, [](Point2 p) { return p.x; });
  const Index mid = interior_edge(mesh);
  const int side0 = mesh.edge(mid).side_of(0);
  EXPECT_DOUBLE_EQ(side0 == 0 ? u[mid] : -u[mid], 1.0);
  EXPECT_DOUBLE_EQ(u[edge_on_side(mesh, 0.0)], -1.0);
  EXPECT_DOUBLE_EQ(u[edge_on_side(mesh, 1.0)], 1.0);
  for (Index e = 0; e < u.size(); ++e) {
    if (mesh.edge(e).tag == EdgeTag::Neumann) {
      EXPECT_EQ(u[e], 0.0);
    }
  }
}

TEST(Advection, ConstantPotentialGivesZero)
{
  const Mesh mesh = reference_mesh(1, BoundarySpec::unit_square(15));
  EXPECT_EQ(max_norm(advection_from_potential(mesh, [](Point2) { return 3.7; })), 0.0);
}

TEST(Advection, LinearPotentialGivesNormalComponent)
{
  // U_{K,sigma} = grad(phi) . n_{K,sigma} exactly for linear phi on an orthogonal mesh.
  const Mesh mesh = reference_mesh(1, BoundarySpec::unit_square(15));
  const Point2 g{0.3, -1.1};
  const Vector u = advection_from_potential(mesh, [g](Point2 p) { return dot(g, p); });
  for (Index ei = 0; ei < u.size(); ++ei) {
    const Edge& e = mesh.edge(ei);
    const Point2 xk = mesh.cell(e.cells[0]).center;
    const Point2 target = e.interior() ? mesh.cell(e.cells[1]).center : mesh.projection(e.cells[0], ei);
    const Point2 n = (1.0 / distance(xk, target)) * (target - xk);
    EXPECT_NEAR(u[ei], dot(g, n), 1e-12);
  }
  EXPECT_LE(max_norm(advection_from_potential(mesh, [](Point2 p) { return p.x; })), 1.0 + 1e-12);
}

TEST(Advection, MissingDirichletPotentialThrows)
{
  const Mesh mesh = two_cell_mesh();
  Vector edges = Vector::Constant(static_cast<Index>(mesh.num_edges()), std::nan(""));
  EXPECT_THROW(advection_from_potential(mesh, Vector::Zero(2), edges), DataError);
}

TEST(EdgeDiffusion, HarmonicMeanOnInteriorEdge)
{
  const Mesh mesh = two_cell_mesh();
  Vector a(2);
  a << 1.0, 0.01;
  const Vector edge = edge_diffusion(mesh, a);
  // Equal half-distances: 2 a_K a_L / (a_K + a_L).
  EXPECT_NEAR(edge[interior_edge(mesh)], 2 * 0.01 / 1.01, 1e-16);
  EXPECT_DOUBLE_EQ(edge[edge_on_side(mesh, 0.0)], 1.0);
  EXPECT_DOUBLE_EQ(edge[edge_on_side(mesh, 1.0)], 0.01);
}

TEST(EdgeDiffusion, RejectsNonPositive)
{
  const Mesh mesh = two_cell_mesh();
  EXPECT_THROW(edge_diffusion(mesh, Vector::Zero(2)), DataError);
  EXPECT_THROW(edge_diffusion(mesh, Vector::Ones(3)), DataError);
}

TEST(CheckTransport, Preconditions)
{
  const Mesh mesh = two_cell_mesh();
  TransportData d = discretize_coefficients(mesh, Vector::Ones(2), [](Point2) { return 1.0; });
  EXPECT_NO_THROW(check_transport(mesh, d));
  TransportData bad = d;
  bad.dirichlet[edge_on_side(mesh, 0.0)] = 0.0;
  EXPECT_THROW(check_transport(mesh, bad), DataError);
  bad = d;
  bad.diffusion[0] = -1;
  EXPECT_THROW(check_transport(mesh, bad), DataError);
  bad = d;
  bad.advection.resize(1);
  EXPECT_THROW(check_transport(mesh, bad), DataError);
}

TEST(PecletGuard, CenteredFailsBeyondTheThreshold)
{
  const Mesh mesh = two_cell_mesh();
  TransportData d = discretize_coefficients(mesh, Vector::Ones(2), [](Point2) { return 1.0; });
  const Index mid = interior_edge(mesh);
  const double dist = mesh.edge(mid).dist;
  // B(x) = 1 - x/2 >= 0.05 iff x <= 1.9.
  d.advection[mid] = 1.89 / dist;
  EXPECT_TRUE(peclet_guard(mesh, d, BScheme::centered(), 0.05).empty());
  d.advection[mid] = -2.1 / dist;
  const auto v = peclet_guard(mesh, d, BScheme::centered(), 0.05);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].edge, mid);
  EXPECT_NEAR(v[0].b_value, -0.05, 1e-12);
  EXPECT_TRUE(peclet_guard(mesh, d, BScheme::upwind(), 1.0).empty());
  EXPECT_TRUE(peclet_guard(mesh, d, BScheme::scharfetter_gummel(), 0.05).empty());
}
