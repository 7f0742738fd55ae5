#include "bemalg/boundary_operator.hpp"

#include <cstdint>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "bemalg/assembly.hpp"
#include "bemalg/errors.hpp"

namespace bemalg {

std::shared_ptr<detail::PairingData> FunctionSpace::pairing_slot(const FunctionSpacePtr& dual) const {
  std::lock_guard lock(cache_mutex_);
  auto it = pairings_.find(dual.get());
  if (it != pairings_.end()) {
    if (!it->second.first.expired()) return it->second.second;
    pairings_.erase(it);
  }
  auto data = std::make_shared<detail::PairingData>();
  pairings_.emplace(dual.get(), std::make_pair(std::weak_ptr<const FunctionSpace>(dual), data));
  return data;
}

std::shared_ptr<const SparseMatrix> pairing_mass(const FunctionSpacePtr& range, const FunctionSpacePtr& dual) {
  auto slot = range->pairing_slot(dual);
  std::lock_guard lock(slot->mutex);
  if (!slot->mass) slot->mass = std::make_shared<const SparseMatrix>(assemble_mass(*range, *range, *dual));
  return slot->mass;
}

FactorizationPtr pairing_factorization(const FunctionSpacePtr& range, const FunctionSpacePtr& dual) {
  if (range->dof_count() != dual->dof_count())
    throw ConversionUnavailableError("pairing of " + range->name() + " with dual " + dual->name() +
                                     " is rectangular; no mass matrix inverse exists");
  const auto mass = pairing_mass(range, dual);
  auto slot = range->pairing_slot(dual);
  std::lock_guard lock(slot->mutex);
  if (!slot->factorization) slot->factorization = sparse_lu(*mass);
  return slot->factorization;
}

struct BoundaryOperator::State {
  FunctionSpacePtr domain, range, dual;
  Provider provider;
  std::string label;
  std::mutex mutex;
  DiscreteOperatorPtr weak, strong;
};

BoundaryOperator::BoundaryOperator(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual,
                                   Provider provider, std::string label)
    : state_(std::make_shared<State>()) {
  if (!domain || !range || !dual) throw ArgumentError("boundary operator needs three spaces");
  state_->domain = std::move(domain);
  state_->range = std::move(range);
  state_->dual = std::move(dual);
  state_->provider = std::move(provider);
  state_->label = std::move(label);
}

namespace {
void require(const std::shared_ptr<void>& s) {
  if (!s) throw ArgumentError("use of an empty boundary operator");
}
}  // namespace

const FunctionSpacePtr& BoundaryOperator::domain() const {
  require(state_);
  return state_->domain;
}
const FunctionSpacePtr& BoundaryOperator::range() const {
  require(state_);
  return state_->range;
}
const FunctionSpacePtr& BoundaryOperator::dual_to_range() const {
  require(state_);
  return state_->dual;
}
const std::string& BoundaryOperator::label() const {
  require(state_);
  return state_->label;
}

DiscreteOperatorPtr BoundaryOperator::weak_form() const {
  require(state_);
  std::lock_guard lock(state_->mutex);
  if (!state_->weak) {
    DiscreteOperatorPtr w = state_->provider();
    if (w->rows() != state_->dual->dof_count() || w->cols() != state_->domain->dof_count())
      throw SpaceMismatchError("weak form of '" + state_->label + "' has the wrong shape");
    state_->weak = std::move(w);
  }
  return state_->weak;
}

DiscreteOperatorPtr BoundaryOperator::strong_form() const {
  require(state_);
  DiscreteOperatorPtr weak = weak_form();
  std::lock_guard lock(state_->mutex);
  if (!state_->strong) {
    FactorizationPtr f;
    try {
      f = pairing_factorization(state_->range, state_->dual);
    } catch (const ConversionUnavailableError& e) {
      throw FactorizationError("strong form of '" + state_->label + "' unavailable: " + e.what());
    }
    state_->strong = product_operator({inverse_operator(f), weak});
  }
  return state_->strong;
}

BoundaryOperator BoundaryOperator::respaced(FunctionSpacePtr domain, FunctionSpacePtr range,
                                            FunctionSpacePtr dual) const {
  require(state_);
  if (domain->dof_count() != state_->domain->dof_count() || dual->dof_count() != state_->dual->dof_count())
    throw SpaceMismatchError("respacing '" + state_->label + "' changes its dimensions");
  BoundaryOperator self = *this;
  return BoundaryOperator(std::move(domain), std::move(range), std::move(dual),
                          [self] { return self.weak_form(); }, state_->label);
}

BoundaryOperator identity_operator(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual) {
  FunctionSpacePtr d = domain, t = dual;
  return BoundaryOperator(std::move(domain), std::move(range), std::move(dual),
                          [d, t] { return sparse_operator(*pairing_mass(d, t)); }, "Id");
}

BoundaryOperator zero_boundary_operator(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual) {
  const auto r = dual->dof_count(), c = domain->dof_count();
  return BoundaryOperator(std::move(domain), std::move(range), std::move(dual),
                          [r, c] { return zero_operator(r, c); }, "0");
}

BoundaryOperator from_weak_form(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual,
                                DiscreteOperatorPtr weak, std::string label) {
  return BoundaryOperator(std::move(domain), std::move(range), std::move(dual),
                          [weak] { return weak; }, std::move(label));
}

namespace {

void require_same(const FunctionSpacePtr& a, const FunctionSpacePtr& b, const std::string& what) {
  if (!a->same_as(*b))
    throw SpaceMismatchError(what + ": " + a->name() + " on mesh " +
                             std::to_string(reinterpret_cast<std::uintptr_t>(a->mesh().get())) +
                             " differs from " + b->name() + " on mesh " +
                             std::to_string(reinterpret_cast<std::uintptr_t>(b->mesh().get())));
}

}  // namespace

BoundaryOperator product(const BoundaryOperator& b, const BoundaryOperator& a) {
  require_same(a.range(), b.domain(), "product needs range of the right factor equal to domain of the left");
  return BoundaryOperator(a.domain(), b.range(), b.dual_to_range(),
                          [a, b] { return product_operator({b.weak_form(), a.strong_form()}); },
                          "(" + b.label() + " * " + a.label() + ")");
}

BoundaryOperator dual_product(const BoundaryOperator& b, const BoundaryOperator& a) {
  require_same(b.range(), a.dual_to_range(),
               "dual product needs range of the left factor equal to the dual space of the right");
  return BoundaryOperator(a.domain(), a.range(), b.domain(),
                          [a, b] { return product_operator({adjoint_operator(b.strong_form()), a.weak_form()}); },
                          "(" + b.label() + " *D " + a.label() + ")");
}

BoundaryOperator add(const BoundaryOperator& a, const BoundaryOperator& b) {
  require_same(a.domain(), b.domain(), "sum needs equal domains");
  require_same(a.range(), b.range(), "sum needs equal ranges");
  require_same(a.dual_to_range(), b.dual_to_range(), "sum needs equal dual spaces");
  return BoundaryOperator(a.domain(), a.range(), a.dual_to_range(),
                          [a, b] { return sum_operator(a.weak_form(), b.weak_form()); },
                          "(" + a.label() + " + " + b.label() + ")");
}

BoundaryOperator scale(Complex alpha, const BoundaryOperator& a) {
  std::ostringstream label;
  label << alpha.real();
  if (alpha.imag() != 0.0) label << (alpha.imag() > 0 ? "+" : "") << alpha.imag() << "i";
  return BoundaryOperator(a.domain(), a.range(), a.dual_to_range(),
                          [alpha, a] { return scaled_operator(alpha, a.weak_form()); },
                          label.str() + " " + a.label());
}

BoundaryOperator operator*(const BoundaryOperator& b, const BoundaryOperator& a) { return product(b, a); }
BoundaryOperator operator+(const BoundaryOperator& a, const BoundaryOperator& b) { return add(a, b); }
BoundaryOperator operator-(const BoundaryOperator& a, const BoundaryOperator& b) { return add(a, scale(-1.0, b)); }
BoundaryOperator operator-(const BoundaryOperator& a) { return scale(-1.0, a); }
BoundaryOperator operator*(Complex alpha, const BoundaryOperator& a) { return scale(alpha, a); }
BoundaryOperator operator*(double alpha, const BoundaryOperator& a) { return scale(alpha, a); }

BoundaryOperator rank_one_regularized(const BoundaryOperator& a, double alpha) {
  return BoundaryOperator(a.domain(), a.range(), a.dual_to_range(),
                          [a, alpha] {
                            // Integrals of the basis functions are the pairing
                            // of each space with the constant function 1.
                            const auto ones_dual = Vector::Ones(a.dual_to_range()->dof_count());
                            const auto ones_dom = Vector::Ones(a.domain()->dof_count());
                            const SparseMatrix md = assemble_mass(*a.dual_to_range(), *a.dual_to_range(),
                                                                  *a.dual_to_range());
                            const SparseMatrix mc = assemble_mass(*a.domain(), *a.domain(), *a.domain());
                            Vector u = md * ones_dual;
                            Vector v = mc * ones_dom;
                            return sum_operator(a.weak_form(), rank_one_operator(std::move(u), std::move(v), alpha));
                          },
                          a.label() + " + rank one");
}

double l2_operator_norm(const BoundaryOperator& op) {
  const Matrix mass = Matrix(*pairing_mass(op.range(), op.dual_to_range()));
  if (mass.rows() != mass.cols())
    throw FactorizationError("L2 norm needs a square pairing mass");
  Eigen::LLT<Matrix> llt(mass);
  if (llt.info() != Eigen::Success)
    throw FactorizationError("pairing mass of " + op.range()->name() + " and " + op.dual_to_range()->name() +
                             " is not positive definite");
  const Matrix a = op.weak_form()->to_dense();
  if (a.rows() != a.cols()) throw FactorizationError("L2 norm needs a square weak form");
  // L^{-1} A L^{-H}
  const Matrix left = llt.matrixL().solve(a);
  const Matrix both = llt.matrixL().solve(left.adjoint()).adjoint();
  Eigen::BDCSVD<Matrix> svd(both);
  return svd.singularValues()(0);
}

}  // namespace bemalg
