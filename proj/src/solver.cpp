#include "bemalg/solver.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "bemalg/errors.hpp"

namespace bemalg {

namespace {

// Rotation zeroing b in (a, b).
void givens(Complex a, Complex b, double& c, Complex& s) {
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
  } else {
    const double r = std::hypot(na, nb);
    c = na / r;
    s = (a / na) * std::conj(b) / r;
  }
}

}  // namespace

Vector gmres(const DiscreteOperator& a, const Vector& b, const GmresOptions& opts, SolveReport& report) {
  if (!(opts.tol > 0.0)) throw ArgumentError("GMRES tolerance must be positive");
  if (opts.max_iter < 1) throw ArgumentError("GMRES needs at least one iteration");
  if (a.rows() != a.cols()) throw ArgumentError("GMRES needs a square operator");
  if (b.size() != a.rows()) throw ArgumentError("right-hand side length does not match the operator");
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index n = b.size();
  report = SolveReport{};
  report.residual_history.push_back(1.0);

  Vector x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    report.converged = true;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return x;
  }
  const int m = opts.restart > 0 ? opts.restart : opts.max_iter;

  while (report.iterations < opts.max_iter) {
    const Vector r = b - (x.isZero() ? Vector::Zero(n) : Vector(a.matvec(x)));
    const double beta = r.norm();
    if (beta / bnorm <= opts.tol) {
      report.converged = true;
      break;
    }
    const int steps = std::min<int>(m, opts.max_iter - report.iterations);
    Matrix v(n, steps + 1);
    Matrix h = Matrix::Zero(steps + 1, steps);
    std::vector<double> cs(steps);
    std::vector<Complex> sn(steps);
    Vector g = Vector::Zero(steps + 1);
    g[0] = beta;
    v.col(0) = r / beta;
    int k = 0;
    bool done = false;
    for (; k < steps; ++k) {
      Vector w = a.matvec(v.col(k));
      // Modified Gram-Schmidt, applied twice for robustness.
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) {
          const Complex hij = v.col(i).dot(w);
          h(i, k) += hij;
          w -= hij * v.col(i);
        }
      const double hn = w.norm();
      h(k + 1, k) = hn;
      if (hn > 0.0) v.col(k + 1) = w / hn;
      for (int i = 0; i < k; ++i) {
        const Complex t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -std::conj(sn[i]) * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      givens(h(k, k), h(k + 1, k), cs[k], sn[k]);
      h(k, k) = cs[k] * h(k, k) + sn[k] * h(k + 1, k);
      h(k + 1, k) = 0.0;
      g[k + 1] = -std::conj(sn[k]) * g[k];
      g[k] = cs[k] * g[k];
      ++report.iterations;
      const double rel = std::abs(g[k + 1]) / bnorm;
      report.residual_history.push_back(rel);
      if (rel <= opts.tol || hn == 0.0) {
        ++k;
        done = true;
        break;
      }
    }
    // Solve the triangular system and update x.
    const Vector y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    x += v.leftCols(k) * y;
    if (done) {
      report.converged = report.residual_history.back() <= opts.tol;
      if (!report.converged) {
        // Breakdown: confirm with the true residual.
        report.converged = (b - a.matvec(x)).norm() / bnorm <= opts.tol;
      }
      break;
    }
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return x;
}

GmresResult gmres(const BoundaryOperator& a, const GridFunction& b, const GmresOptions& opts) {
  if (!b.space()->same_as(*a.range()))
    throw SpaceMismatchError("right-hand side lives in " + b.space()->name() + ", operator range is " +
                             a.range()->name());
  GmresResult out;
  Vector x;
  if (opts.use_strong_form) {
    const Vector rhs = b.coefficients();
    x = gmres(*a.strong_form(), rhs, opts, out.report);
  } else {
    const Vector rhs = b.projections(a.dual_to_range());
    x = gmres(*a.weak_form(), rhs, opts, out.report);
  }
  out.solution = GridFunction::from_coefficients(a.domain(), std::move(x));
  return out;
}

BlockedGmresResult gmres(const BlockedOperator& a, const std::vector<GridFunction>& b, const GmresOptions& opts) {
  a.validate();
  if (static_cast<int>(b.size()) != a.row_count())
    throw BlockStructureError("blocked system with " + std::to_string(a.row_count()) + " rows given " +
                              std::to_string(b.size()) + " right-hand sides");
  std::vector<FunctionSpacePtr> duals;
  for (int i = 0; i < a.row_count(); ++i) {
    if (!b[i].space()->same_as(*a.row_range(i)))
      throw SpaceMismatchError("right-hand side " + std::to_string(i) + " lives in " + b[i].space()->name() +
                               ", row range is " + a.row_range(i)->name());
    duals.push_back(a.row_dual(i));
  }
  BlockedGmresResult out;
  Vector x;
  if (opts.use_strong_form)
    x = gmres(*a.strong_form(), concatenate_coefficients(b), opts, out.report);
  else
    x = gmres(*a.weak_form(), concatenate_projections(b, duals), opts, out.report);
  Eigen::Index o = 0;
  for (int j = 0; j < a.column_count(); ++j) {
    const auto n = a.column_domain(j)->dof_count();
    out.solution.push_back(GridFunction::from_coefficients(a.column_domain(j), x.segment(o, n)));
    o += n;
  }
  return out;
}

Matrix cholesky(const Matrix& m) {
  if (m.rows() != m.cols()) throw FactorizationError("Cholesky needs a square matrix");
  if (!m.allFinite()) throw NumericalError("matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw FactorizationError("Cholesky needs a Hermitian matrix");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw FactorizationError("matrix is not positive definite");
  return llt.matrixL();
}

Eigen::VectorXcd dense_eig(const Matrix& m) {
  if (m.rows() != m.cols()) throw ArgumentError("eigenvalues need a square matrix");
  if (!m.allFinite()) throw NumericalError("matrix has non-finite entries");
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue iteration did not converge");
  return es.eigenvalues();
}

Eigen::VectorXd dense_svd(const Matrix& m) {
  if (!m.allFinite()) throw NumericalError("matrix has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

}  // namespace bemalg
