#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace entrofv;
using testing_support::two_cell_mesh;

namespace {

SparseMatrix dense_to_sparse(const Eigen::MatrixXd& d)
{
  std::vector<Triplet> t;
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = 0; j < d.cols(); ++j)
      if (d(i, j) != 0) t.emplace_back(i, j, d(i, j));
  return assemble(d.rows(), t);
}

}  // namespace

TEST(DirectSolver, IdentitySolveReturnsRightHandSide)
{
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(5, 5);
  Vector b(5);
  b << 1, -2, 3, -4, 5;
  EXPECT_EQ(solve_linear(dense_to_sparse(id), b), b);
}

TEST(DirectSolver, SmallSystem)
{
  Eigen::MatrixXd a(2, 2);
  a << 3, -1, -1, 3;
  Vector b(2);
  b << 2, 4;
  const Vector x = solve_linear(dense_to_sparse(a), b);
  EXPECT_NEAR(x[0], 1.25, 1e-15);
  EXPECT_NEAR(x[1], 1.75, 1e-15);
}

TEST(DirectSolver, ZeroRowIsSingularWithPivot)
{
  Eigen::MatrixXd a(3, 3);
  a << 2, 1, 0, 0, 0, 0, 1, 0, 3;
  try {
    DirectSolver s(dense_to_sparse(a));
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_EQ(e.pivot(), 1);
  }
}

TEST(DirectSolver, RankDeficientMatrixIsSingular)
{
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 2, 4;
  EXPECT_THROW(DirectSolver(dense_to_sparse(a)), SingularMatrixError);
}

TEST(DirectSolver, RejectsWrongRightHandSide)
{
  DirectSolver s(dense_to_sparse(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_THROW(s.solve(Vector::Ones(2)), Error);
}

TEST(DirectSolver, AgreesWithDenseSolveOnRandomDominantMatrix)
{
  testing_support::Random rng(7);
  const int n = 40;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && rng.uniform(0, 1) < 0.1) a(i, j) = rng.uniform(-1, 1);
  for (int i = 0; i < n; ++i) a(i, i) = a.row(i).cwiseAbs().sum() + 1;
  const Vector b = rng.vector(n, -1, 1);
  const Vector dense = a.partialPivLu().solve(b);
  EXPECT_LT((solve_linear(dense_to_sparse(a), b) - dense).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(MMatrix, DominantZMatrixPasses)
{
  Eigen::MatrixXd a(3, 3);
  a << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  EXPECT_TRUE(check_m_matrix_structure(dense_to_sparse(a), {0, 2}).ok());
}

TEST(MMatrix, PositiveOffDiagonalIsReported)
{
  Eigen::MatrixXd a(2, 2);
  a << 3, 0.5, -1, 3;
  const auto report = check_m_matrix_structure(dense_to_sparse(a), {0, 1});
  ASSERT_EQ(report.count(MatrixViolation::Kind::PositiveOffDiagonal), 1u);
  EXPECT_EQ(report.violations.front().row, 0);
  EXPECT_EQ(report.violations.front().col, 1);
}

TEST(MMatrix, MissingStrictColumnIsReported)
{
  // Pure Neumann Laplacian: every column sums to zero.
  Eigen::MatrixXd a(2, 2);
  a << 1, -1, -1, 1;
  const auto report = check_m_matrix_structure(dense_to_sparse(a), {});
  EXPECT_EQ(report.count(MatrixViolation::Kind::NoChainToStrictColumn), 2u);
  EXPECT_FALSE(check_m_matrix_structure(dense_to_sparse(a), {0}).ok());
}

TEST(MMatrix, ColumnDominanceFailureIsReported)
{
  Eigen::MatrixXd a(2, 2);
  a << 1, -1, -2, 3;
  const auto report = check_m_matrix_structure(dense_to_sparse(a), {1});
  EXPECT_EQ(report.count(MatrixViolation::Kind::ColumnNotDominant), 1u);
}

TEST(Newton, LinearSystemConvergesInOneIteration)
{
  Eigen::MatrixXd a(2, 2);
  a << 3, -1, -1, 3;
  const SparseMatrix s = dense_to_sparse(a);
  Vector b(2);
  b << 2, 4;
  const auto res = newton_solve([&](const Vector& x) { return Linearization{s * x - b, s}; }, Vector::Zero(2), {});
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_NEAR(res.solution[0], 1.25, 1e-14);
}

TEST(Newton, CubeRootMatchesBisection)
{
  const auto residual = [](const Vector& x) { return Vector(x.array().cube() - 8.0); };
  const auto jacobian = [](const Vector& x) { return dense_to_sparse(Eigen::MatrixXd::Constant(1, 1, 3 * x[0] * x[0])); };
  const auto res = newton_solve(residual, jacobian, Vector::Constant(1, 3.0), {1e-13, 50});
  double lo = 0, hi = 10;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * mid > 8 ? hi : lo) = mid;
  }
  ASSERT_TRUE(res.converged);
  EXPECT_NEAR(res.solution[0], lo, 1e-14);
  EXPECT_LE(res.iterations, 8);
}

TEST(Newton, IterationCapReportsNonConvergence)
{
  const auto residual = [](const Vector& x) { return Vector(x.array().cube() - 8.0); };
  const auto jacobian = [](const Vector& x) { return dense_to_sparse(Eigen::MatrixXd::Constant(1, 1, 3 * x[0] * x[0])); };
  const auto res = newton_solve(residual, jacobian, Vector::Constant(1, 3.0), {1e-13, 1});
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_GT(res.residual_norm, 1e-13);
}

TEST(Newton, SingularJacobianIsNotThrown)
{
  const auto residual = [](const Vector& x) { return Vector(x.array().square() + 1.0); };
  const auto jacobian = [](const Vector&) { return dense_to_sparse(Eigen::MatrixXd::Zero(1, 1)); };
  const auto res = newton_solve(residual, jacobian, Vector::Zero(1), {});
  EXPECT_FALSE(res.converged);
}

TEST(Newton, InvalidConfigurationThrows)
{
  const auto sys = [](const Vector& x) { return Linearization{x, SparseMatrix()}; };
  EXPECT_THROW(newton_solve(sys, Vector::Zero(1), {0.0, 5}), DataError);
  EXPECT_THROW(newton_solve(sys, Vector::Zero(1), {1e-10, 0}), DataError);
}

TEST(Newton, IsDeterministic)
{
  const auto sys = [](const Vector& x) {
    Eigen::MatrixXd j(2, 2);
    j << 2 * x[0], 1, 1, 3 * x[1] * x[1];
    Vector r(2);
    r << x[0] * x[0] + x[1] - 3, x[0] + x[1] * x[1] * x[1] - 9;
    return Linearization{r, dense_to_sparse(j)};
  };
  Vector x0(2);
  x0 << 1.3, 1.7;
  const auto a = newton_solve(sys, x0, {});
  const auto b = newton_solve(sys, x0, {});
  ASSERT_TRUE(a.converged);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.solution, b.solution);
}
