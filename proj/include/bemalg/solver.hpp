#pragma once

#include <vector>

#include "bemalg/blocked_operator.hpp"
#include "bemalg/boundary_operator.hpp"
#include "bemalg/discrete_operator.hpp"
#include "bemalg/grid_function.hpp"

namespace bemalg {

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  /// Relative residual norms, starting with 1 for the zero initial guess.
  std::vector<double> residual_history;
  double wall_time = 0.0;
};

struct GmresOptions {
  double tol = 1e-5;
  int max_iter = 1000;
  /// Restart length; 0 means full GMRES.
  int restart = 0;
  /// Solve strong_form x = coefficients(b) instead of weak_form x = projections(b).
  bool use_strong_form = false;
};

/// GMRES on a matrix-free operator with zero initial guess; the tolerance is
/// on ||b - A x|| / ||b||.
Vector gmres(const DiscreteOperator& a, const Vector& b, const GmresOptions& opts, SolveReport& report);

struct GmresResult {
  GridFunction solution;
  SolveReport report;
};

struct BlockedGmresResult {
  std::vector<GridFunction> solution;
  SolveReport report;
};

GmresResult gmres(const BoundaryOperator& a, const GridFunction& b, const GmresOptions& opts = {});
BlockedGmresResult gmres(const BlockedOperator& a, const std::vector<GridFunction>& b,
                         const GmresOptions& opts = {});

/// Cholesky factor L with m = L L^H; throws FactorizationError unless m is
/// Hermitian positive definite.
Matrix cholesky(const Matrix& m);
/// All eigenvalues, unordered. Throws NumericalError for non-finite input.
Eigen::VectorXcd dense_eig(const Matrix& m);
/// Singular values in descending order.
Eigen::VectorXd dense_svd(const Matrix& m);

}  // namespace bemalg
