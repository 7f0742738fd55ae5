#pragma once

#include <functional>
#include <memory>
#include <string>

#include "bemalg/discrete_operator.hpp"
#include "bemalg/space.hpp"

namespace bemalg {

namespace detail {

/// Mass matrix <phi_range_j, phi_dual_i> and its lazily computed factorization.
struct PairingData {
  std::mutex mutex;
  std::shared_ptr<const SparseMatrix> mass;
  FactorizationPtr factorization;
};

}  // namespace detail

/// Pairing mass of (range, dual): rows follow the dual space.
std::shared_ptr<const SparseMatrix> pairing_mass(const FunctionSpacePtr& range, const FunctionSpacePtr& dual);
/// Factorization of the pairing mass, computed once per (range, dual) pair.
/// Throws ConversionUnavailableError for rectangular pairings and
/// FactorizationError for singular ones.
FactorizationPtr pairing_factorization(const FunctionSpacePtr& range, const FunctionSpacePtr& dual);

/// Boundary operator with domain, range and dual-to-range spaces. The weak
/// form is produced on first use and cached; the strong form is the inverse
/// pairing mass of (range, dual) applied after the weak form.
///
/// Copies share one state, so caching works across an expression tree.
class BoundaryOperator {
 public:
  using Provider = std::function<DiscreteOperatorPtr()>;

  BoundaryOperator() = default;
  BoundaryOperator(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual,
                   Provider provider, std::string label);

  bool valid() const { return static_cast<bool>(state_); }

  const FunctionSpacePtr& domain() const;
  const FunctionSpacePtr& range() const;
  const FunctionSpacePtr& dual_to_range() const;
  const std::string& label() const;

  DiscreteOperatorPtr weak_form() const;
  DiscreteOperatorPtr strong_form() const;

  /// Same weak form with different spaces; dimensions must agree.
  BoundaryOperator respaced(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

/// Identity with weak form given by the mass matrix <phi_domain, phi_dual>.
BoundaryOperator identity_operator(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual);
BoundaryOperator zero_boundary_operator(FunctionSpacePtr domain, FunctionSpacePtr range,
                                        FunctionSpacePtr dual);
/// Operator with a fixed weak form.
BoundaryOperator from_weak_form(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual,
                                DiscreteOperatorPtr weak, std::string label);

/// B (.) A: weak form B.weak * A.strong. Requires A.range == B.domain.
BoundaryOperator product(const BoundaryOperator& b, const BoundaryOperator& a);
/// B (.)_D A: weak form (B.strong)^H * A.weak, spaces (A.domain, A.range,
/// B.domain). Requires B.range == A.dual_to_range.
BoundaryOperator dual_product(const BoundaryOperator& b, const BoundaryOperator& a);
BoundaryOperator add(const BoundaryOperator& a, const BoundaryOperator& b);
BoundaryOperator scale(Complex alpha, const BoundaryOperator& a);

BoundaryOperator operator*(const BoundaryOperator& b, const BoundaryOperator& a);
BoundaryOperator operator+(const BoundaryOperator& a, const BoundaryOperator& b);
BoundaryOperator operator-(const BoundaryOperator& a, const BoundaryOperator& b);
BoundaryOperator operator-(const BoundaryOperator& a);
BoundaryOperator operator*(Complex alpha, const BoundaryOperator& a);
BoundaryOperator operator*(double alpha, const BoundaryOperator& a);

/// a + alpha (int phi_dual)(int phi_domain)^T, the rank-one modification
/// that removes the constant kernel of the Laplace hypersingular operator.
BoundaryOperator rank_one_regularized(const BoundaryOperator& a, double alpha = 1.0);

/// Largest singular value of L^{-1} A L^{-H} where the pairing mass of
/// (range, dual) equals L L^H (Cholesky).
double l2_operator_norm(const BoundaryOperator& op);

}  // namespace bemalg
