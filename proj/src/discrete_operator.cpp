#include "bemalg/discrete_operator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "bemalg/errors.hpp"

namespace bemalg {

namespace {

std::atomic<long> g_factorization_count{0};

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_input(const DiscreteOperator& op, const Matrix& x, bool adjoint) {
  const Eigen::Index expected = adjoint ? op.rows() : op.cols();
  if (x.rows() != expected)
    throw ArgumentError("operator of shape " + shape(op.rows(), op.cols()) + " applied to " +
                        std::to_string(x.rows()) + " rows");
}

class DenseOp final : public DiscreteOperator {
 public:
  explicit DenseOp(std::shared_ptr<const Matrix> m) : m_(std::move(m)) {}
  Eigen::Index rows() const override { return m_->rows(); }
  Eigen::Index cols() const override { return m_->cols(); }
  Matrix apply(const Matrix& x) const override {
    check_input(*this, x, false);
    return *m_ * x;
  }
  Matrix apply_adjoint(const Matrix& x) const override {
    check_input(*this, x, true);
    return m_->adjoint() * x;
  }
  Matrix to_dense() const override { return *m_; }

 private:
  std::shared_ptr<const Matrix> m_;
};

class SparseOp final : public DiscreteOperator {
 public:
  explicit SparseOp(SparseMatrix m) : m_(std::move(m)) { m_.makeCompressed(); }
  Eigen::Index rows() const override { return m_.rows(); }
  Eigen::Index cols() const override { return m_.cols(); }
  Matrix apply(const Matrix& x) const override {
    check_input(*this, x, false);
    return m_ * x;
  }
  Matrix apply_adjoint(const Matrix& x) const override {
    check_input(*this, x, true);
    return m_.adjoint() * x;
  }
  Matrix to_dense() const override { return Matrix(m_); }

 private:
  SparseMatrix m_;
};

class InverseOp final : public DiscreteOperator {
 public:
  explicit InverseOp(FactorizationPtr f) : f_(std::move(f)) {}
  Eigen::Index rows() const override { return f_->size(); }
  Eigen::Index cols() const override { return f_->size(); }
  Matrix apply(const Matrix& x) const override {
    check_input(*this, x, false);
    return f_->solve(x);
  }
  Matrix apply_adjoint(const Matrix& x) const override {
    check_input(*this, x, true);
    return f_->solve_adjoint(x);
  }

 private:
  FactorizationPtr f_;
};

class ZeroOp final : public DiscreteOperator {
 public:
  ZeroOp(Eigen::Index r, Eigen::Index c) : r_(r), c_(c) {}
  Eigen::Index rows() const override { return r_; }
  Eigen::Index cols() const override { return c_; }
  Matrix apply(const Matrix& x) const override {
    check_input(*this, x, false);
    return Matrix::Zero(r_, x.cols());
  }
  Matrix apply_adjoint(const Matrix& x) const override {
    check_input(*this, x, true);
    return Matrix::Zero(c_, x.cols());
  }
  Matrix to_dense() const override { return Matrix::Zero(r_, c_); }

 private:
  Eigen::Index r_, c_;
};

class ProductOp final : public DiscreteOperator {
 public:
  explicit ProductOp(std::vector<DiscreteOperatorPtr> ops) : ops_(std::move(ops)) {}
  Eigen::Index rows() const override { return ops_.front()->rows(); }
  Eigen::Index cols() const override { return ops_.back()->cols(); }
  Matrix apply(const Matrix& x) const override {
    check_input(*this, x, false);
    Matrix y = x;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) y = (*it)->apply(y);
    return y;
  }
  Matrix apply_adjoint(const Matrix& x) const override {
    check_input(*this, x, true);
    Matrix y = x;
    for (const auto& op : ops_) y = op->apply_adjoint(y);
    return y;
  }

 private:
  std::vector<DiscreteOperatorPtr> ops_;
};

class SumOp final : public DiscreteOperator {
 public:
  SumOp(DiscreteOperatorPtr a, DiscreteOperatorPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Eigen::Index rows() const override { return a_->rows(); }
  Eigen::Index cols() const override { return a_->cols(); }
  Matrix apply(const Matrix& x) const override { return a_->apply(x) + b_->apply(x); }
  Matrix apply_adjoint(const Matrix& x) const override {
    return a_->apply_adjoint(x) + b_->apply_adjoint(x);
  }
  Matrix to_dense() const override { return a_->to_dense() + b_->to_dense(); }

 private:
  DiscreteOperatorPtr a_, b_;
};

class ScaledOp final : public DiscreteOperator {
 public:
  ScaledOp(Complex alpha, DiscreteOperatorPtr a) : alpha_(alpha), a_(std::move(a)) {}
  Eigen::Index rows() const override { return a_->rows(); }
  Eigen::Index cols() const override { return a_->cols(); }
  Matrix apply(const Matrix& x) const override { return alpha_ * a_->apply(x); }
  Matrix apply_adjoint(const Matrix& x) const override {
    return std::conj(alpha_) * a_->apply_adjoint(x);
  }
  Matrix to_dense() const override { return alpha_ * a_->to_dense(); }

 private:
  Complex alpha_;
  DiscreteOperatorPtr a_;
};

class AdjointOp final : public DiscreteOperator {
 public:
  explicit AdjointOp(DiscreteOperatorPtr a) : a_(std::move(a)) {}
  Eigen::Index rows() const override { return a_->cols(); }
  Eigen::Index cols() const override { return a_->rows(); }
  Matrix apply(const Matrix& x) const override { return a_->apply_adjoint(x); }
  Matrix apply_adjoint(const Matrix& x) const override { return a_->apply(x); }

 private:
  DiscreteOperatorPtr a_;
};

class RankOneOp final : public DiscreteOperator {
 public:
  RankOneOp(Vector u, Vector v, Complex alpha) : u_(std::move(u)), v_(std::move(v)), alpha_(alpha) {}
  Eigen::Index rows() const override { return u_.size(); }
  Eigen::Index cols() const override { return v_.size(); }
  Matrix apply(const Matrix& x) const override {
    check_input(*this, x, false);
    return alpha_ * u_ * (v_.transpose() * x);
  }
  Matrix apply_adjoint(const Matrix& x) const override {
    check_input(*this, x, true);
    return std::conj(alpha_) * v_.conjugate() * (u_.adjoint() * x);
  }

 private:
  Vector u_, v_;
  Complex alpha_;
};

class BlockOp final : public DiscreteOperator {
 public:
  BlockOp(std::vector<std::vector<DiscreteOperatorPtr>> blocks, std::vector<Eigen::Index> rs,
          std::vector<Eigen::Index> cs)
      : blocks_(std::move(blocks)), rs_(std::move(rs)), cs_(std::move(cs)) {
    ro_.push_back(0);
    for (auto r : rs_) ro_.push_back(ro_.back() + r);
    co_.push_back(0);
    for (auto c : cs_) co_.push_back(co_.back() + c);
  }
  Eigen::Index rows() const override { return ro_.back(); }
  Eigen::Index cols() const override { return co_.back(); }
  Matrix apply(const Matrix& x) const override {
    check_input(*this, x, false);
    Matrix y = Matrix::Zero(rows(), x.cols());
    for (std::size_t i = 0; i < rs_.size(); ++i)
      for (std::size_t j = 0; j < cs_.size(); ++j)
        if (blocks_[i][j])
          y.middleRows(ro_[i], rs_[i]) += blocks_[i][j]->apply(x.middleRows(co_[j], cs_[j]));
    return y;
  }
  Matrix apply_adjoint(const Matrix& x) const override {
    check_input(*this, x, true);
    Matrix y = Matrix::Zero(cols(), x.cols());
    for (std::size_t i = 0; i < rs_.size(); ++i)
      for (std::size_t j = 0; j < cs_.size(); ++j)
        if (blocks_[i][j])
          y.middleRows(co_[j], cs_[j]) += blocks_[i][j]->apply_adjoint(x.middleRows(ro_[i], rs_[i]));
    return y;
  }
  Matrix to_dense() const override {
    Matrix d = Matrix::Zero(rows(), cols());
    for (std::size_t i = 0; i < rs_.size(); ++i)
      for (std::size_t j = 0; j < cs_.size(); ++j)
        if (blocks_[i][j]) d.block(ro_[i], co_[j], rs_[i], cs_[j]) = blocks_[i][j]->to_dense();
    return d;
  }

 private:
  std::vector<std::vector<DiscreteOperatorPtr>> blocks_;
  std::vector<Eigen::Index> rs_, cs_, ro_, co_;
};

class SparseLUFactorization final : public Factorization {
 public:
  explicit SparseLUFactorization(const SparseMatrix& m) {
    if (m.rows() != m.cols())
      throw FactorizationError("cannot factorize a " + shape(m.rows(), m.cols()) + " matrix");
    SparseMatrix a = m;
    a.makeCompressed();
    lu_.analyzePattern(a);
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success)
      throw FactorizationError("sparse LU failed: " + lu_.lastErrorMessage());
    // Rounding can leave a tiny nonzero pivot; probe the growth of a solve.
    Vector probe(m.rows());
    for (Eigen::Index i = 0; i < probe.size(); ++i) probe[i] = 1.0 + 0.5 * std::sin(1.0 + i);
    const Vector x = lu_.solve(probe);
    double norm1 = 0.0;
    for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
      double col = 0.0;
      for (SparseMatrix::InnerIterator it(a, j); it; ++it) col += std::abs(it.value());
      norm1 = std::max(norm1, col);
    }
    const double growth = x.cwiseAbs().sum() * norm1 / probe.cwiseAbs().sum();
    if (!x.allFinite() || !(growth < 1e14))
      throw FactorizationError("matrix is singular to working precision (solve growth " +
                               std::to_string(growth) + ")");
    n_ = m.rows();
    ++g_factorization_count;
  }
  Eigen::Index size() const override { return n_; }
  Matrix solve(const Matrix& b) const override { return lu_.solve(b); }
  Matrix solve_adjoint(const Matrix& b) const override { return lu_.adjoint().solve(b); }

 private:
  mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::Index n_ = 0;
};

class DenseLUFactorization final : public Factorization {
 public:
  DenseLUFactorization(const Matrix& m, double rcond_min) {
    if (m.rows() != m.cols())
      throw FactorizationError("cannot factorize a " + shape(m.rows(), m.cols()) + " matrix");
    if (!m.allFinite()) throw NumericalError("matrix has non-finite entries");
    lu_.compute(m);
    const double rc = lu_.rcond();
    if (!(rc > rcond_min))
      throw FactorizationError("matrix is singular to working precision (rcond " +
                               std::to_string(rc) + ")");
    ++g_factorization_count;
  }
  Eigen::Index size() const override { return lu_.rows(); }
  Matrix solve(const Matrix& b) const override { return lu_.solve(b); }
  Matrix solve_adjoint(const Matrix& b) const override { return lu_.adjoint().solve(b); }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
};

}  // namespace

Vector DiscreteOperator::matvec(const Vector& x) const { return apply(x); }
Vector DiscreteOperator::rmatvec(const Vector& x) const { return apply_adjoint(x); }

Matrix DiscreteOperator::to_dense() const { return apply(Matrix::Identity(cols(), cols())); }

FactorizationPtr sparse_lu(const SparseMatrix& m) {
  return std::make_shared<SparseLUFactorization>(m);
}

FactorizationPtr dense_lu(const Matrix& m, double rcond_min) {
  return std::make_shared<DenseLUFactorization>(m, rcond_min);
}

long factorization_count() { return g_factorization_count.load(); }

DiscreteOperatorPtr dense_operator(Matrix m) {
  return std::make_shared<DenseOp>(std::make_shared<const Matrix>(std::move(m)));
}

DiscreteOperatorPtr dense_operator(std::shared_ptr<const Matrix> m) {
  return std::make_shared<DenseOp>(std::move(m));
}

DiscreteOperatorPtr sparse_operator(SparseMatrix m) { return std::make_shared<SparseOp>(std::move(m)); }

DiscreteOperatorPtr inverse_operator(FactorizationPtr f) { return std::make_shared<InverseOp>(std::move(f)); }

DiscreteOperatorPtr zero_operator(Eigen::Index rows, Eigen::Index cols) {
  return std::make_shared<ZeroOp>(rows, cols);
}

DiscreteOperatorPtr product_operator(std::vector<DiscreteOperatorPtr> ops) {
  if (ops.empty()) throw ArgumentError("empty operator product");
  for (std::size_t i = 0; i + 1 < ops.size(); ++i)
    if (ops[i]->cols() != ops[i + 1]->rows())
      throw ArgumentError("operator product shapes do not chain: " +
                          shape(ops[i]->rows(), ops[i]->cols()) + " times " +
                          shape(ops[i + 1]->rows(), ops[i + 1]->cols()));
  if (ops.size() == 1) return ops.front();
  return std::make_shared<ProductOp>(std::move(ops));
}

DiscreteOperatorPtr sum_operator(DiscreteOperatorPtr a, DiscreteOperatorPtr b) {
  if (a->rows() != b->rows() || a->cols() != b->cols())
    throw ArgumentError("cannot add operators of shapes " + shape(a->rows(), a->cols()) + " and " +
                        shape(b->rows(), b->cols()));
  return std::make_shared<SumOp>(std::move(a), std::move(b));
}

DiscreteOperatorPtr scaled_operator(Complex alpha, DiscreteOperatorPtr a) {
  return std::make_shared<ScaledOp>(alpha, std::move(a));
}

DiscreteOperatorPtr adjoint_operator(DiscreteOperatorPtr a) { return std::make_shared<AdjointOp>(std::move(a)); }

DiscreteOperatorPtr rank_one_operator(Vector u, Vector v, Complex alpha) {
  return std::make_shared<RankOneOp>(std::move(u), std::move(v), alpha);
}

DiscreteOperatorPtr block_operator(std::vector<std::vector<DiscreteOperatorPtr>> blocks,
                                   std::vector<Eigen::Index> row_sizes,
                                   std::vector<Eigen::Index> col_sizes) {
  if (blocks.size() != row_sizes.size()) throw ArgumentError("block rows do not match row sizes");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != col_sizes.size()) throw ArgumentError("block columns do not match column sizes");
    for (std::size_t j = 0; j < col_sizes.size(); ++j)
      if (blocks[i][j] && (blocks[i][j]->rows() != row_sizes[i] || blocks[i][j]->cols() != col_sizes[j]))
        throw ArgumentError("block (" + std::to_string(i) + ", " + std::to_string(j) + ") has shape " +
                            shape(blocks[i][j]->rows(), blocks[i][j]->cols()) + ", expected " +
                            shape(row_sizes[i], col_sizes[j]));
  }
  return std::make_shared<BlockOp>(std::move(blocks), std::move(row_sizes), std::move(col_sizes));
}

DiscreteOperatorPtr block_diagonal_operator(std::vector<DiscreteOperatorPtr> diag) {
  const std::size_t n = diag.size();
  std::vector<std::vector<DiscreteOperatorPtr>> blocks(n, std::vector<DiscreteOperatorPtr>(n));
  std::vector<Eigen::Index> rs(n), cs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rs[i] = diag[i]->rows();
    cs[i] = diag[i]->cols();
    blocks[i][i] = diag[i];
  }
  return block_operator(std::move(blocks), std::move(rs), std::move(cs));
}

}  // namespace bemalg
