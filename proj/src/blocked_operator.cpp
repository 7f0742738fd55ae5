#include "bemalg/blocked_operator.hpp"

#include <functional>
#include <mutex>
#include <string>

#include "bemalg/errors.hpp"

namespace bemalg {

struct BlockedOperator::State {
  int m = 0, n = 0;
  std::vector<FunctionSpacePtr> ranges, duals, domains;
  std::vector<std::vector<BoundaryOperator>> blocks;  // grid kind only
  std::function<DiscreteOperatorPtr()> provider;      // composite kind only
  std::mutex mutex;
  bool frozen = false;
  DiscreteOperatorPtr weak, strong;
};

namespace {

std::string pos(int i, int j) { return "(" + std::to_string(i) + ", " + std::to_string(j) + ")"; }

bool same(const FunctionSpacePtr& a, const FunctionSpacePtr& b) { return a && b && a->same_as(*b); }

}  // namespace

BlockedOperator::BlockedOperator(int rows, int cols) : state_(std::make_shared<State>()) {
  if (rows < 1 || cols < 1) throw BlockStructureError("blocked operator needs at least one row and column");
  state_->m = rows;
  state_->n = cols;
  state_->ranges.resize(rows);
  state_->duals.resize(rows);
  state_->domains.resize(cols);
  state_->blocks.assign(rows, std::vector<BoundaryOperator>(cols));
}

void BlockedOperator::require() const {
  if (!state_) throw BlockStructureError("use of an empty blocked operator");
}

int BlockedOperator::row_count() const {
  require();
  return state_->m;
}

int BlockedOperator::column_count() const {
  require();
  return state_->n;
}

bool BlockedOperator::is_composite() const {
  require();
  return static_cast<bool>(state_->provider);
}

void BlockedOperator::set(int i, int j, const BoundaryOperator& op) {
  require();
  State& s = *state_;
  std::lock_guard lock(s.mutex);
  if (s.provider) throw BlockStructureError("blocks of a composite blocked operator cannot be set");
  if (s.frozen) throw BlockStructureError("blocked operator is frozen after its forms were computed");
  if (i < 0 || i >= s.m || j < 0 || j >= s.n)
    throw BlockStructureError("block position " + pos(i, j) + " outside a " + std::to_string(s.m) + "x" +
                              std::to_string(s.n) + " blocked operator");
  if (!op.valid()) throw BlockStructureError("empty operator set at block " + pos(i, j));

  // Spaces fixed by other blocks of the same row and column.
  FunctionSpacePtr row_range, row_dual, col_domain;
  for (int jj = 0; jj < s.n; ++jj)
    if (jj != j && s.blocks[i][jj].valid()) {
      row_range = s.blocks[i][jj].range();
      row_dual = s.blocks[i][jj].dual_to_range();
    }
  for (int ii = 0; ii < s.m; ++ii)
    if (ii != i && s.blocks[ii][j].valid()) col_domain = s.blocks[ii][j].domain();
  if (row_range && !same(row_range, op.range()))
    throw BlockStructureError("block " + pos(i, j) + " has range " + op.range()->name() + " but row " +
                              std::to_string(i) + " has range " + row_range->name());
  if (row_dual && !same(row_dual, op.dual_to_range()))
    throw BlockStructureError("block " + pos(i, j) + " has dual space " + op.dual_to_range()->name() +
                              " but row " + std::to_string(i) + " has dual space " + row_dual->name());
  if (col_domain && !same(col_domain, op.domain()))
    throw BlockStructureError("block " + pos(i, j) + " has domain " + op.domain()->name() + " but column " +
                              std::to_string(j) + " has domain " + col_domain->name());
  s.blocks[i][j] = op;
  s.ranges[i] = op.range();
  s.duals[i] = op.dual_to_range();
  s.domains[j] = op.domain();
}

BoundaryOperator BlockedOperator::block(int i, int j) const {
  require();
  if (state_->provider) throw BlockStructureError("blocks of a composite blocked operator are not accessible");
  if (i < 0 || i >= state_->m || j < 0 || j >= state_->n)
    throw BlockStructureError("block position " + pos(i, j) + " out of range");
  return state_->blocks[i][j];
}

void BlockedOperator::validate() const {
  require();
  const State& s = *state_;
  for (int i = 0; i < s.m; ++i)
    if (!s.ranges[i]) throw BlockStructureError("row " + std::to_string(i) + " of the blocked operator is empty");
  for (int j = 0; j < s.n; ++j)
    if (!s.domains[j])
      throw BlockStructureError("column " + std::to_string(j) + " of the blocked operator is empty");
}

const FunctionSpacePtr& BlockedOperator::row_range(int i) const {
  validate();
  return state_->ranges.at(i);
}

const FunctionSpacePtr& BlockedOperator::row_dual(int i) const {
  validate();
  return state_->duals.at(i);
}

const FunctionSpacePtr& BlockedOperator::column_domain(int j) const {
  validate();
  return state_->domains.at(j);
}

DiscreteOperatorPtr BlockedOperator::weak_form() const {
  validate();
  State& s = *state_;
  std::lock_guard lock(s.mutex);
  if (!s.weak) {
    s.frozen = true;
    if (s.provider) {
      s.weak = s.provider();
    } else {
      std::vector<std::vector<DiscreteOperatorPtr>> blocks(s.m, std::vector<DiscreteOperatorPtr>(s.n));
      std::vector<Eigen::Index> rs(s.m), cs(s.n);
      for (int i = 0; i < s.m; ++i) rs[i] = s.duals[i]->dof_count();
      for (int j = 0; j < s.n; ++j) cs[j] = s.domains[j]->dof_count();
      for (int i = 0; i < s.m; ++i)
        for (int j = 0; j < s.n; ++j)
          if (s.blocks[i][j].valid()) blocks[i][j] = s.blocks[i][j].weak_form();
      s.weak = block_operator(std::move(blocks), std::move(rs), std::move(cs));
    }
  }
  return s.weak;
}

DiscreteOperatorPtr BlockedOperator::strong_form() const {
  DiscreteOperatorPtr weak = weak_form();
  State& s = *state_;
  std::lock_guard lock(s.mutex);
  if (!s.strong) {
    std::vector<DiscreteOperatorPtr> inverses;
    for (int i = 0; i < s.m; ++i) {
      FactorizationPtr f;
      try {
        f = pairing_factorization(s.ranges[i], s.duals[i]);
      } catch (const ConversionUnavailableError& e) {
        throw FactorizationError("row " + std::to_string(i) + " of the blocked operator: " + e.what());
      }
      inverses.push_back(inverse_operator(f));
    }
    s.strong = product_operator({block_diagonal_operator(std::move(inverses)), weak});
  }
  return s.strong;
}

BlockedOperator product(const BlockedOperator& b, const BlockedOperator& a) {
  a.validate();
  b.validate();
  if (a.row_count() != b.column_count())
    throw BlockStructureError("blocked product: left operator has " + std::to_string(b.column_count()) +
                              " columns, right operator has " + std::to_string(a.row_count()) + " rows");
  for (int k = 0; k < a.row_count(); ++k)
    if (!same(a.row_range(k), b.column_domain(k)))
      throw BlockStructureError("blocked product: range " + a.row_range(k)->name() + " of row " +
                                std::to_string(k) + " differs from domain " + b.column_domain(k)->name() +
                                " of column " + std::to_string(k));
  BlockedOperator out;
  out.state_ = std::make_shared<BlockedOperator::State>();
  auto& s = *out.state_;
  s.m = b.row_count();
  s.n = a.column_count();
  s.ranges = b.state_->ranges;
  s.duals = b.state_->duals;
  s.domains = a.state_->domains;
  s.provider = [a, b] { return product_operator({b.weak_form(), a.strong_form()}); };
  return out;
}

BlockedOperator add(const BlockedOperator& a, const BlockedOperator& b) {
  a.validate();
  b.validate();
  if (a.row_count() != b.row_count() || a.column_count() != b.column_count())
    throw BlockStructureError("blocked sum of operators with different block shapes");
  for (int i = 0; i < a.row_count(); ++i)
    if (!same(a.row_range(i), b.row_range(i)) || !same(a.row_dual(i), b.row_dual(i)))
      throw BlockStructureError("blocked sum: row " + std::to_string(i) + " spaces differ");
  for (int j = 0; j < a.column_count(); ++j)
    if (!same(a.column_domain(j), b.column_domain(j)))
      throw BlockStructureError("blocked sum: column " + std::to_string(j) + " domains differ");
  BlockedOperator out;
  out.state_ = std::make_shared<BlockedOperator::State>();
  auto& s = *out.state_;
  s.m = a.row_count();
  s.n = a.column_count();
  s.ranges = a.state_->ranges;
  s.duals = a.state_->duals;
  s.domains = a.state_->domains;
  s.provider = [a, b] { return sum_operator(a.weak_form(), b.weak_form()); };
  return out;
}

BlockedOperator scale(Complex alpha, const BlockedOperator& a) {
  a.validate();
  BlockedOperator out;
  out.state_ = std::make_shared<BlockedOperator::State>();
  auto& s = *out.state_;
  s.m = a.row_count();
  s.n = a.column_count();
  s.ranges = a.state_->ranges;
  s.duals = a.state_->duals;
  s.domains = a.state_->domains;
  s.provider = [alpha, a] { return scaled_operator(alpha, a.weak_form()); };
  return out;
}

BlockedOperator operator*(const BlockedOperator& b, const BlockedOperator& a) { return product(b, a); }
BlockedOperator operator+(const BlockedOperator& a, const BlockedOperator& b) { return add(a, b); }
BlockedOperator operator-(const BlockedOperator& a, const BlockedOperator& b) { return add(a, scale(-1.0, b)); }
BlockedOperator operator*(Complex alpha, const BlockedOperator& a) { return scale(alpha, a); }
BlockedOperator operator*(double alpha, const BlockedOperator& a) { return scale(alpha, a); }

Vector concatenate_coefficients(const std::vector<GridFunction>& f) {
  Eigen::Index n = 0;
  for (const auto& g : f) n += g.space()->dof_count();
  Vector out(n);
  Eigen::Index o = 0;
  for (const auto& g : f) {
    const Vector& c = g.coefficients();
    out.segment(o, c.size()) = c;
    o += c.size();
  }
  return out;
}

Vector concatenate_projections(const std::vector<GridFunction>& f, const std::vector<FunctionSpacePtr>& duals) {
  if (f.size() != duals.size()) throw ArgumentError("one dual space per function required");
  Eigen::Index n = 0;
  for (const auto& d : duals) n += d->dof_count();
  Vector out(n);
  Eigen::Index o = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vector p = f[i].projections(duals[i]);
    out.segment(o, p.size()) = p;
    o += p.size();
  }
  return out;
}

std::vector<GridFunction> apply_blocked(const BlockedOperator& op, const std::vector<GridFunction>& f) {
  op.validate();
  if (static_cast<int>(f.size()) != op.column_count())
    throw BlockStructureError("blocked operator with " + std::to_string(op.column_count()) + " columns applied to " +
                              std::to_string(f.size()) + " functions");
  for (int j = 0; j < op.column_count(); ++j)
    if (!f[j].space()->same_as(*op.column_domain(j)))
      throw SpaceMismatchError("function " + std::to_string(j) + " lives in " + f[j].space()->name() +
                               ", column domain is " + op.column_domain(j)->name());
  const Vector y = op.weak_form()->matvec(concatenate_coefficients(f));
  std::vector<GridFunction> out;
  Eigen::Index o = 0;
  for (int i = 0; i < op.row_count(); ++i) {
    const auto n = op.row_dual(i)->dof_count();
    out.push_back(GridFunction::from_projections(op.row_range(i), op.row_dual(i), y.segment(o, n)));
    o += n;
  }
  return out;
}

}  // namespace bemalg
