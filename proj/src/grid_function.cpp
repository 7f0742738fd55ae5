#include "bemalg/grid_function.hpp"

#include <cmath>
#include <mutex>

#include "bemalg/assembly.hpp"
#include "bemalg/errors.hpp"
#include "bemalg/quadrature.hpp"

namespace bemalg {

struct GridFunction::State {
  FunctionSpacePtr space;
  FunctionSpacePtr dual;
  Vector projections;
  std::mutex mutex;
  std::optional<Vector> coefficients;
};

namespace {

std::shared_ptr<const void> check(const std::shared_ptr<const void>& s) {
  if (!s) throw ArgumentError("use of an empty grid function");
  return s;
}

}  // namespace

GridFunction GridFunction::from_coefficients(FunctionSpacePtr space, Vector coefficients) {
  if (!space) throw ArgumentError("grid function needs a space");
  if (coefficients.size() != space->dof_count())
    throw ArgumentError("coefficient vector of length " + std::to_string(coefficients.size()) + " for " +
                        space->name());
  GridFunction f;
  f.state_ = std::make_shared<State>();
  f.state_->space = std::move(space);
  f.state_->coefficients = std::move(coefficients);
  return f;
}

GridFunction GridFunction::from_projections(FunctionSpacePtr space, FunctionSpacePtr dual, Vector projections) {
  if (!space || !dual) throw ArgumentError("grid function needs a space and a dual space");
  if (projections.size() != dual->dof_count())
    throw ArgumentError("projection vector of length " + std::to_string(projections.size()) + " for dual " +
                        dual->name());
  common_grid(*space, *dual);
  GridFunction f;
  f.state_ = std::make_shared<State>();
  f.state_->space = std::move(space);
  f.state_->dual = std::move(dual);
  f.state_->projections = std::move(projections);
  return f;
}

GridFunction GridFunction::from_ones(FunctionSpacePtr space) {
  const auto n = space->dof_count();
  return from_coefficients(std::move(space), Vector::Ones(n));
}

GridFunction GridFunction::from_zeros(FunctionSpacePtr space) {
  const auto n = space->dof_count();
  return from_coefficients(std::move(space), Vector::Zero(n));
}

GridFunction GridFunction::from_function(FunctionSpacePtr space, FunctionSpacePtr dual,
                                         const std::function<Complex(const Vec3&, const Vec3&)>& f,
                                         int degree) {
  const TriangleRule rule = gauss_triangle(degree);
  const SurfaceMesh& grid = *dual->assembly_grid();
  const LocalBasis& basis = dual->local_basis();
  Vector proj = Vector::Zero(dual->dof_count());
  for (int e = 0; e < static_cast<int>(grid.element_count()); ++e) {
    const ElementBasis& b = basis[e];
    const double jac = 2.0 * grid.area(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double s = rule.points[q][0], t = rule.points[q][1];
      const std::array<double, 3> lam{1.0 - s - t, s, t};
      const Complex v = f(grid.map(e, s, t), grid.normal(e)) * (rule.weights[q] * jac);
      for (int g = 0; g < b.count; ++g)
        proj[b.dof[g]] += std::conj(b.value[g][0] * lam[0] + b.value[g][1] * lam[1] + b.value[g][2] * lam[2]) * v;
    }
  }
  return from_projections(std::move(space), std::move(dual), std::move(proj));
}

GridFunction GridFunction::interpolated(FunctionSpacePtr space, const std::function<Complex(const Vec3&)>& f) {
  Vector c = interpolate(*space, f);
  return from_coefficients(std::move(space), std::move(c));
}

const FunctionSpacePtr& GridFunction::space() const {
  check(state_);
  return state_->space;
}

bool GridFunction::has_coefficients() const {
  check(state_);
  std::lock_guard lock(state_->mutex);
  return state_->coefficients.has_value();
}

FunctionSpacePtr GridFunction::stored_dual() const {
  check(state_);
  return state_->dual;
}

const Vector& GridFunction::coefficients() const {
  check(state_);
  std::lock_guard lock(state_->mutex);
  if (!state_->coefficients) {
    FactorizationPtr f;
    try {
      f = pairing_factorization(state_->space, state_->dual);
    } catch (const FactorizationError& e) {
      throw ConversionUnavailableError(std::string("coefficients unavailable: ") + e.what());
    }
    state_->coefficients = Vector(f->solve(state_->projections));
  }
  return *state_->coefficients;
}

Vector GridFunction::projections(const FunctionSpacePtr& dual) const {
  check(state_);
  if (state_->dual && state_->dual->same_as(*dual)) return state_->projections;
  const Vector& c = coefficients();
  return *pairing_mass(state_->space, dual) * c;
}

double GridFunction::l2_norm() const {
  const Vector& c = coefficients();
  const Vector mc = *pairing_mass(state_->space, state_->space) * c;
  return std::sqrt(std::max(0.0, c.dot(mc).real()));
}

GridFunction GridFunction::operator+(const GridFunction& other) const {
  if (!space()->same_as(*other.space())) throw SpaceMismatchError("sum of grid functions in different spaces");
  const auto d1 = stored_dual(), d2 = other.stored_dual();
  if (d1 && d2 && d1->same_as(*d2) && !has_coefficients() && !other.has_coefficients())
    return from_projections(space(), d1, state_->projections + other.state_->projections);
  return from_coefficients(space(), coefficients() + other.coefficients());
}

GridFunction GridFunction::operator-(const GridFunction& other) const { return *this + other * Complex(-1.0); }

GridFunction GridFunction::operator*(Complex alpha) const {
  if (!has_coefficients()) return from_projections(space(), stored_dual(), alpha * state_->projections);
  return from_coefficients(space(), alpha * coefficients());
}

GridFunction operator*(Complex alpha, const GridFunction& f) { return f * alpha; }

GridFunction apply(const BoundaryOperator& op, const GridFunction& f) {
  if (!f.space()->same_as(*op.domain()))
    throw SpaceMismatchError("operator '" + op.label() + "' has domain " + op.domain()->name() +
                             ", function lives in " + f.space()->name());
  Vector proj = op.weak_form()->matvec(f.coefficients());
  return GridFunction::from_projections(op.range(), op.dual_to_range(), std::move(proj));
}

Complex evaluate(const GridFunction& f, int element, double s, double t) {
  return evaluate(*f.space(), f.coefficients(), element, s, t);
}

}  // namespace bemalg
