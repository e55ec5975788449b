#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace entrofv;
using testing_support::Random;
using testing_support::two_cell_mesh;

namespace {

const PhiFunction phis[] = {PhiFunction::boltzmann(), PhiFunction::power(2.0), PhiFunction::power(1.5)};

FpProblem drift_problem(int level)
{
  FpProblem pb;
  pb.mesh = reference_mesh(level, BoundarySpec::unit_square(BoundarySpec::Left | BoundarySpec::Bottom));
  pb.data = discretize_coefficients(pb.mesh, Vector::Ones(static_cast<Index>(pb.mesh.num_cells())),
                                    [](Point2 p) { return 1 + p.x * p.y; });
  pb.data.advection = advection_from_potential(pb.mesh, [](Point2 p) { return 2 * p.x - p.y * p.y; });
  pb.initial = center_values(pb.mesh, [](Point2 p) { return p.x > 0.5 ? 3.0 : 0.01; });
  return pb;
}

}  // namespace

TEST(Phi, ClosedFormValues)
{
  EXPECT_NEAR(PhiFunction::boltzmann()(2.0), 2 * std::log(2.0) - 1, 1e-15);
  EXPECT_DOUBLE_EQ(PhiFunction::boltzmann()(0.0), 1.0);
  EXPECT_DOUBLE_EQ(PhiFunction::power(2.0)(2.0), 1.0);
  EXPECT_DOUBLE_EQ(PhiFunction::power(2.0)(0.0), 1.0);
  // (x^p - p x)/(p - 1) + 1 at x = 4, p = 3/2: (8 - 6)/0.5 + 1.
  EXPECT_NEAR(PhiFunction::power(1.5)(4.0), 5.0, 1e-14);
  EXPECT_THROW(PhiFunction::power(2.5), DataError);
  EXPECT_THROW(PhiFunction::power(1.0), DataError);
}

TEST(Phi, NormalizedAndConvex)
{
  for (const auto& phi : phis) {
    EXPECT_EQ(phi(1.0), 0.0);
    EXPECT_NEAR(phi.derivative(1.0), 0.0, 1e-15);
    for (double x = 0.05; x < 5; x += 0.05) {
      EXPECT_GE(phi(x), 0);
      EXPECT_GT(phi.second_derivative(x), 0);
      EXPECT_NEAR(phi.derivative(x), (phi(x + 1e-6) - phi(x - 1e-6)) / 2e-6, 1e-7);
    }
  }
}

TEST(Phi, SmallDeviationsKeepRelativeAccuracy)
{
  for (const auto& phi : phis) {
    const double d = 1e-9;
    // phi(1 + d) = phi''(1) d^2 / 2 + O(d^3), phi''(1) = p (or 1 for Boltzmann).
    const double curvature = phi.is_boltzmann() ? 1.0 : phi.p();
    EXPECT_NEAR(phi.of_deviation(d) / (0.5 * curvature * d * d), 1.0, 1e-6);
  }
}

TEST(PhiMean, KnownMeansAndBounds)
{
  EXPECT_NEAR(phi_mean(PhiFunction::power(2.0), 1.0, 3.0), 2.0, 1e-14);
  EXPECT_NEAR(phi_mean(PhiFunction::boltzmann(), 1.0, std::exp(1.0)), std::exp(1.0) - 1.0, 1e-14);
  EXPECT_EQ(phi_mean(PhiFunction::boltzmann(), 2.0, 2.0), 2.0);
  Random rng(1);
  for (int i = 0; i < 100; ++i) {
    const double s = rng.uniform(0.01, 5), t = rng.uniform(0.01, 5);
    for (const auto& phi : phis) {
      const double m = phi_mean(phi, s, t);
      EXPECT_GE(m, std::min(s, t) * (1 - 1e-12));
      EXPECT_LE(m, std::max(s, t) * (1 + 1e-12));
    }
  }
}

TEST(RelativeEntropy, TwoCellValues)
{
  const Mesh mesh = two_cell_mesh();
  Vector f(2), g(2);
  f << 2, 1;
  g << 1, 1;
  EXPECT_NEAR(relative_phi_entropy(mesh, f, g, PhiFunction::power(2.0)), 0.5, 1e-15);
  EXPECT_NEAR(relative_phi_entropy(mesh, f, g, PhiFunction::boltzmann()), 0.5 * (2 * std::log(2.0) - 1), 1e-15);
  g << 2, 0.5;
  // f_inf phi(f / f_inf): cell 1 carries 0.5 phi2(2) = 0.5.
  EXPECT_NEAR(relative_phi_entropy(mesh, f, g, PhiFunction::power(2.0)), 0.25, 1e-15);
  g << 0, 1;
  EXPECT_THROW(relative_phi_entropy(mesh, f, g, PhiFunction::power(2.0)), DataError);
}

TEST(Dissipation, TwoCellHandValue)
{
  const Mesh mesh = two_cell_mesh();
  const auto d = discretize_coefficients(mesh, Vector::Ones(2), [](Point2) { return 1.0; });
  Vector f(2);
  f << 2, 1;
  const Vector g = Vector::Ones(2);
  // Interior: 2 (1)(2) = 4; left Dirichlet: 4 (1)(2) = 8; right edge has no jump.
  EXPECT_NEAR(phi_dissipation(mesh, d, BScheme::upwind(), f, g, PhiFunction::power(2.0)), 12.0, 1e-13);
  EXPECT_NEAR(phi_dissipation(mesh, d, BScheme::upwind(), g, g, PhiFunction::boltzmann()), 0.0, 0.0);
}

TEST(Dissipation, NonNegativeOnRandomData)
{
  const Mesh mesh = reference_mesh(0, BoundarySpec::unit_square(BoundarySpec::Top));
  Random rng(2);
  const auto n = static_cast<Index>(mesh.num_cells());
  for (int i = 0; i < 20; ++i) {
    const TransportData d = testing_support::random_transport(mesh, rng, 3);
    const Vector f = rng.vector(n, 0.01, 3), g = rng.vector(n, 0.1, 3);
    for (const auto& phi : phis)
      for (const auto& b : {BScheme::upwind(), BScheme::scharfetter_gummel()})
        EXPECT_GE(phi_dissipation(mesh, d, b, f, g, phi), 0.0);
  }
}

TEST(Dissipation, BoundsEntropyDecreaseOfImplicitSteps)
{
  const auto pb = drift_problem(1);
  for (const auto& b : {BScheme::upwind(), BScheme::centered(), BScheme::scharfetter_gummel()}) {
    FpStepper stepper(pb.mesh, pb.data, b);
    const Vector fi = solve_fp_steady(pb.mesh, pb.data, b);
    Vector f = pb.initial;
    const double dt = 0.01;
    for (int n = 0; n < 30; ++n) {
      const Vector next = stepper.step(f, dt);
      for (const auto& phi : phis) {
        const double lhs = relative_phi_entropy(pb.mesh, next, fi, phi) - relative_phi_entropy(pb.mesh, f, fi, phi);
        const double rhs = -dt * phi_dissipation(pb.mesh, pb.data, b, next, fi, phi);
        EXPECT_LE(lhs, rhs + 1e-12 * relative_phi_entropy(pb.mesh, f, fi, phi)) << b.name() << " step " << n;
      }
      f = next;
    }
  }
}

TEST(Entrophy, ClosedFormValue)
{
  const Mesh mesh = two_cell_mesh();
  const Vector f = Vector::Constant(2, 2.0), g = Vector::Ones(2);
  EXPECT_NEAR(entrophy(mesh, f, g, 2.0), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(entrophy(mesh, Vector::Zero(2), Vector::Ones(2), 3.0), 0.75, 1e-15);
  EXPECT_EQ(entrophy(mesh, g, g, 4.0), 0.0);
}

TEST(Entrophy, DecreaseBoundedByDissipation)
{
  const Mesh mesh = reference_mesh(1, BoundarySpec::unit_square(BoundarySpec::Right));
  const Vector fd = dirichlet_values(mesh, [](Point2 p) { return 1 + p.y; });
  const double m = 3, dt = 0.01;
  const Vector fi = solve_pme_steady(mesh, fd, m);
  Vector f = Vector::Zero(static_cast<Index>(mesh.num_cells()));
  for (int n = 0; n < 30; ++n) {
    const auto next = step_pme(mesh, f, m, dt, fd);
    ASSERT_TRUE(next);
    const double lhs = entrophy(mesh, *next, fi, m) - entrophy(mesh, f, fi, m);
    EXPECT_LE(lhs, -dt * entrophy_dissipation(mesh, *next, fi, m) + 1e-12 * entrophy(mesh, f, fi, m));
    // The unrooted L^{m+1} distance is controlled by the entrophy.
    EXPECT_LE(std::pow(lp_distance(mesh, *next, fi, m + 1), m + 1), (m + 1) * entrophy(mesh, *next, fi, m) * (1 + 1e-12));
    f = *next;
  }
}

TEST(DdEntropy, ClosedFormValue)
{
  const Mesh mesh = two_cell_mesh();
  const DdState ref{Vector::Ones(2), Vector::Ones(2), Vector::Zero(2)};
  const DdState s{Vector::Constant(2, 2.0), Vector::Ones(2), Vector::Zero(2)};
  EXPECT_NEAR(dd_entropy(mesh, s, ref, 1.0), 2 * std::log(2.0) - 1, 1e-15);
  // Potential part: lambda^2/2 sum tau (D W)^2 with W = (1, 0): interior 2, left Dirichlet 4.
  const DdState w{Vector::Ones(2), Vector::Ones(2), (Vector(2) << 1, 0).finished()};
  EXPECT_NEAR(dd_entropy(mesh, w, ref, 0.5), 0.125 * (2 + 4), 1e-15);
  Vector delta = Vector::Zero(static_cast<Index>(mesh.num_edges()));
  delta[testing_support::edge_on_side(mesh, 1.0)] = 1;
  EXPECT_NEAR(dd_entropy(mesh, ref, ref, 1.0, delta), 0.5 * 4, 1e-15);
  const DdState bad{Vector::Zero(2), Vector::Ones(2), Vector::Zero(2)};
  EXPECT_THROW(dd_entropy(mesh, bad, ref, 1.0), DataError);
}

TEST(Lp, DistancesAndCauchySchwarz)
{
  const Mesh mesh = two_cell_mesh();
  Vector f(2);
  f << 1, 3;
  EXPECT_NEAR(lp_distance(mesh, f, Vector::Zero(2), 2), std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(lp_distance(mesh, f, Vector::Zero(2), 1), 2.0, 1e-15);
  EXPECT_THROW(lp_distance(mesh, f, f, 0.5), DataError);
  const Mesh fine = reference_mesh(1, BoundarySpec::unit_square(15));
  Random rng(3);
  const auto n = static_cast<Index>(fine.num_cells());
  for (int i = 0; i < 20; ++i) {
    const Vector a = rng.vector(n, 0, 2), b = rng.vector(n, 0.1, 2);
    // On a unit-measure domain ||.||_1 <= ||.||_2, and H_phi2 = ||(f-g)/sqrt(g)||_2^2 >= ||f-g||_1^2 / ||g||_1.
    EXPECT_LE(lp_distance(fine, a, b, 1), lp_distance(fine, a, b, 2) * (1 + 1e-12));
    const double h2 = relative_phi_entropy(fine, a, b, PhiFunction::power(2.0));
    EXPECT_GE(h2 * lp_distance(fine, b, Vector::Zero(n), 1), std::pow(lp_distance(fine, a, b, 1), 2) * (1 - 1e-12));
  }
}

TEST(Trace, ColumnsAndOrdering)
{
  EntropyTrace trace({"t", "dt", "E"});
  trace.add({0, 0, 1});
  trace.add({0.1, 0.1, 0.5});
  EXPECT_EQ(trace.values("E"), (std::vector<double>{1, 0.5}));
  EXPECT_EQ(trace.times(), (std::vector<double>{0, 0.1}));
  EXPECT_THROW(trace.add({0.1, 0.0, 0.2}), Error);
  EXPECT_THROW(trace.add({0.2, 0.1}), Error);
  EXPECT_THROW(trace.column("X"), DataError);
}

TEST(Fit, RecoversExactRate)
{
  std::vector<double> t, v;
  for (int i = 0; i <= 50; ++i) t.push_back(0.02 * i), v.push_back(7 * std::exp(-3.0 * 0.02 * i));
  const auto fit = fit_decay_rate(t, v, 0.1, 0.9);
  EXPECT_NEAR(fit.rate, 3.0, 1e-12);
  EXPECT_NEAR(std::exp(fit.intercept), 7.0, 1e-11);
  EXPECT_LT(fit.residual, 1e-12);
  EXPECT_EQ(fit.samples, 41u);
  EXPECT_THROW(fit_decay_rate(t, v, 0.1, 0.15), DataError);
  v[10] = 0;
  EXPECT_THROW(fit_decay_rate(t, v, 0.1, 0.9), DataError);
}

TEST(TheoreticalRates, LimitsAndMonotonicity)
{
  EXPECT_NEAR(theoretical_rate_fp(1, 2, 4, 0.5, 0.3, 0.1, 1e-12), 0.3 * 0.5 * 1 * 2 / (0.1 * 4), 1e-9);
  EXPECT_LT(theoretical_rate_fp(1, 2, 4, 0.5, 0.3, 0.1, 0.1), theoretical_rate_fp(1, 2, 4, 0.5, 0.3, 0.1, 0.01));
  EXPECT_NEAR(theoretical_rate_pme(2, 3, 0.3, unit_square_poincare, 1e-12), 0.3 * 4 * std::numbers::pi * std::numbers::pi, 1e-6);
  EXPECT_LT(theoretical_rate_pme(1, 2, 0.3, unit_square_poincare, 1e-2), theoretical_rate_pme(5, 2, 0.3, unit_square_poincare, 1e-2));
  EXPECT_NEAR(unit_square_poincare, 1 / (std::numbers::pi * std::numbers::pi), 1e-17);
}
