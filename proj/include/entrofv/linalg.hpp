#pragma once

#include "entrofv/core.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <functional>
#include <optional>
#include <queue>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace entrofv {

/// Factorization of a singular matrix. `pivot()` is the offending row or
/// column index, -1 when the factorization did not report one.
class SingularMatrixError : public Error
{
public:
  SingularMatrixError(Index pivot, const std::string& what)
    : Error("singular matrix (pivot " + std::to_string(pivot) + "): " + what), pivot_(pivot)
  {}
  Index pivot() const { return pivot_; }

private:
  Index pivot_;
};

/// Assembles an n x n matrix; duplicate coordinates are summed.
inline SparseMatrix assemble(Index n, const std::vector<Triplet>& entries)
{
  SparseMatrix a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return a;
}

namespace detail {

inline Index first_empty_row_or_column(const SparseMatrix& a)
{
  std::vector<char> row_nz(a.rows(), 0), col_nz(a.cols(), 0);
  for (Index j = 0; j < a.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(a, j); it; ++it)
      if (it.value() != 0.0) row_nz[it.row()] = 1, col_nz[it.col()] = 1;
  for (Index i = 0; i < a.rows(); ++i)
    if (!row_nz[i] || !col_nz[i]) return i;
  return -1;
}

inline Index pivot_from_message(const std::string& msg)
{
  std::smatch m;
  if (std::regex_search(msg, m, std::regex("([0-9]+)"))) return std::stol(m[1]);
  return -1;
}

}  // namespace detail

/// LU factorization held for repeated solves with the same matrix.
class DirectSolver
{
public:
  DirectSolver() = default;
  explicit DirectSolver(const SparseMatrix& a) { factorize(a); }

  void factorize(const SparseMatrix& a)
  {
    if (a.rows() != a.cols()) throw Error("matrix is not square");
    if (const Index i = detail::first_empty_row_or_column(a); i >= 0)
      throw SingularMatrixError(i, "empty row or column");
    lu_.analyzePattern(a);
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success) {
      const std::string msg = lu_.lastErrorMessage();
      throw SingularMatrixError(detail::pivot_from_message(msg), msg);
    }
    n_ = a.rows();
  }

  Vector solve(const Vector& b) const
  {
    if (b.size() != n_) throw Error("right-hand side has wrong size");
    Vector x = lu_.solve(b);
    if (!x.allFinite()) throw SingularMatrixError(-1, "non-finite solution");
    return x;
  }

private:
  // SparseLU::solve is logically const but not marked so.
  mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  Index n_ = 0;
};

inline Vector solve_linear(const SparseMatrix& a, const Vector& b) { return DirectSolver(a).solve(b); }

// ---------------------------------------------------------------------------
// M-matrix structure

struct MatrixViolation
{
  enum class Kind
  {
    PositiveOffDiagonal,
    NonPositiveDiagonal,
    ColumnNotDominant,
    DirichletColumnNotStrict,
    NoChainToStrictColumn
  };
  Kind kind;
  Index row;
  Index col;
  double value;
};

struct MatrixReport
{
  std::vector<MatrixViolation> violations;
  bool ok() const { return violations.empty(); }
  std::size_t count(MatrixViolation::Kind k) const
  {
    return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [k](const auto& v) { return v.kind == k; }));
  }
};

/// Checks the sign and column-dominance structure that makes a TPFA
/// operator a non-singular M-matrix: off-diagonals <= 0, diagonal > 0,
/// diagonal >= sum of |off-diagonals| in its column, strict dominance on
/// columns of Dirichlet-touched cells, and a chain of non-zero entries
/// from every column to a strictly dominant one.
inline MatrixReport check_m_matrix_structure(const SparseMatrix& a,
                                             const std::set<Index>& dirichlet_touched,
                                             double rel_tol = 1e-12)
{
  using Kind = MatrixViolation::Kind;
  MatrixReport report;
  const Index n = a.cols();
  std::vector<double> diag(n, 0.0), offsum(n, 0.0);
  std::vector<std::vector<Index>> column_links(n);
  for (Index j = 0; j < a.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
      const Index r = it.row(), c = it.col();
      const double v = it.value();
      if (r == c) {
        diag[c] = v;
        continue;
      }
      if (v > 0) report.violations.push_back({Kind::PositiveOffDiagonal, r, c, v});
      offsum[c] += std::abs(v);
      if (v != 0.0) column_links[c].push_back(r);
    }
  }
  std::vector<char> strict(n, 0);
  for (Index c = 0; c < n; ++c) {
    const double scale = std::max(std::abs(diag[c]), offsum[c]);
    const double excess = diag[c] - offsum[c];
    if (!(diag[c] > 0)) report.violations.push_back({Kind::NonPositiveDiagonal, c, c, diag[c]});
    if (excess < -rel_tol * scale) report.violations.push_back({Kind::ColumnNotDominant, c, c, excess});
    strict[c] = excess > rel_tol * scale;
    if (dirichlet_touched.count(c) && !strict[c])
      report.violations.push_back({Kind::DirichletColumnNotStrict, c, c, excess});
  }
  // Reverse reachability: a column is fine if it links (through non-zero
  // off-diagonals, in either direction of the symmetric pattern) to a strict one.
  std::vector<std::vector<Index>> adj(n);
  for (Index c = 0; c < n; ++c)
    for (Index r : column_links[c]) adj[c].push_back(r), adj[r].push_back(c);
  std::vector<char> reach(n, 0);
  std::queue<Index> todo;
  for (Index c = 0; c < n; ++c)
    if (strict[c]) reach[c] = 1, todo.push(c);
  while (!todo.empty()) {
    const Index c = todo.front();
    todo.pop();
    for (Index r : adj[c])
      if (!reach[r]) reach[r] = 1, todo.push(r);
  }
  for (Index c = 0; c < n; ++c)
    if (!reach[c]) report.violations.push_back({Kind::NoChainToStrictColumn, c, c, 0.0});
  return report;
}

// ---------------------------------------------------------------------------
// Newton

struct NewtonConfig
{
  double tolerance = 1e-11;  // on the residual max-norm
  int max_iterations = 50;
};

struct Linearization
{
  Vector residual;
  SparseMatrix jacobian;
};

struct NewtonResult
{
  Vector solution;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
};

/// Undamped Newton iteration on `system(x) -> Linearization`. Failure to
/// reach the tolerance, a singular Jacobian or a non-finite iterate are
/// reported through `converged == false`, never thrown.
template <class System>
NewtonResult newton_solve(System&& system, Vector x, const NewtonConfig& cfg)
{
  if (!(cfg.tolerance > 0) || cfg.max_iterations < 1) throw DataError("invalid Newton configuration");
  NewtonResult result;
  Linearization lin = system(x);
  result.residual_norm = max_norm(lin.residual);
  for (int it = 1; it <= cfg.max_iterations && !(result.residual_norm <= cfg.tolerance); ++it) {
    if (!lin.residual.allFinite()) break;
    Vector dx;
    try {
      dx = solve_linear(lin.jacobian, -lin.residual);
    } catch (const SingularMatrixError&) {
      break;
    }
    x += dx;
    result.iterations = it;
    lin = system(x);
    result.residual_norm = max_norm(lin.residual);
  }
  result.converged = result.residual_norm <= cfg.tolerance;
  result.solution = std::move(x);
  return result;
}

/// Same as above with residual and Jacobian given separately.
template <class Residual, class Jacobian>
NewtonResult newton_solve(Residual&& residual, Jacobian&& jacobian, Vector x0, const NewtonConfig& cfg)
{
  return newton_solve([&](const Vector& x) { return Linearization{residual(x), jacobian(x)}; }, std::move(x0), cfg);
}

}  // namespace entrofv
