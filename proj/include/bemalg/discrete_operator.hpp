#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "bemalg/types.hpp"

namespace bemalg {

class DiscreteOperator;
using DiscreteOperatorPtr = std::shared_ptr<const DiscreteOperator>;

/// Linear map given by its action. Composite nodes are lazy: nothing is
/// materialised until to_dense() is called.
class DiscreteOperator {
 public:
  virtual ~DiscreteOperator() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;

  /// Applies the operator to every column of x.
  virtual Matrix apply(const Matrix& x) const = 0;
  /// Applies the conjugate transpose to every column of x.
  virtual Matrix apply_adjoint(const Matrix& x) const = 0;

  Vector matvec(const Vector& x) const;
  Vector rmatvec(const Vector& x) const;

  /// Dense matrix of the operator.
  virtual Matrix to_dense() const;
};

/// Solver for a square matrix.
class Factorization {
 public:
  virtual ~Factorization() = default;
  virtual Eigen::Index size() const = 0;
  virtual Matrix solve(const Matrix& b) const = 0;
  virtual Matrix solve_adjoint(const Matrix& b) const = 0;
};
using FactorizationPtr = std::shared_ptr<const Factorization>;

/// Sparse LU with fill-reducing ordering. Throws FactorizationError when
/// the matrix is singular.
FactorizationPtr sparse_lu(const SparseMatrix& m);
/// Dense LU with partial pivoting; rejects matrices whose reciprocal
/// condition estimate is below rcond_min.
FactorizationPtr dense_lu(const Matrix& m, double rcond_min = 1e-14);

/// Number of factorizations performed so far.
long factorization_count();

DiscreteOperatorPtr dense_operator(Matrix m);
DiscreteOperatorPtr dense_operator(std::shared_ptr<const Matrix> m);
DiscreteOperatorPtr sparse_operator(SparseMatrix m);
DiscreteOperatorPtr inverse_operator(FactorizationPtr f);
DiscreteOperatorPtr zero_operator(Eigen::Index rows, Eigen::Index cols);
/// Product of factors applied right to left: ops[0] * ops[1] * ... .
DiscreteOperatorPtr product_operator(std::vector<DiscreteOperatorPtr> ops);
DiscreteOperatorPtr sum_operator(DiscreteOperatorPtr a, DiscreteOperatorPtr b);
DiscreteOperatorPtr scaled_operator(Complex alpha, DiscreteOperatorPtr a);
DiscreteOperatorPtr adjoint_operator(DiscreteOperatorPtr a);
/// alpha * u * v^T (no conjugation).
DiscreteOperatorPtr rank_one_operator(Vector u, Vector v, Complex alpha);
/// Block operator; null entries are zero blocks. Row heights and column
/// widths are given explicitly so empty blocks are well defined.
DiscreteOperatorPtr block_operator(std::vector<std::vector<DiscreteOperatorPtr>> blocks,
                                   std::vector<Eigen::Index> row_sizes,
                                   std::vector<Eigen::Index> col_sizes);
DiscreteOperatorPtr block_diagonal_operator(std::vector<DiscreteOperatorPtr> blocks);

}  // namespace bemalg
