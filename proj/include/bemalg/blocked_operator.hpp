#pragma once

#include <memory>
#include <vector>

#include "bemalg/boundary_operator.hpp"
#include "bemalg/grid_function.hpp"

namespace bemalg {

/// m x n array of boundary operators. Operators in one row share range and
/// dual space, operators in one column share domain, and no row or column may
/// be empty. Empty positions act as zero operators.
///
/// Products, sums and scalings produce composite blocked operators whose
/// blocks are not individually accessible.
class BlockedOperator {
 public:
  BlockedOperator() = default;
  BlockedOperator(int rows, int cols);

  int row_count() const;
  int column_count() const;

  /// Throws BlockStructureError when op conflicts with the spaces already
  /// fixed for row i or column j, or when the operator is composite or its
  /// forms were already computed.
  void set(int i, int j, const BoundaryOperator& op);
  /// Invalid (empty) BoundaryOperator for empty positions.
  BoundaryOperator block(int i, int j) const;
  bool is_composite() const;

  /// Throws BlockStructureError naming the first empty row or column.
  void validate() const;

  const FunctionSpacePtr& row_range(int i) const;
  const FunctionSpacePtr& row_dual(int i) const;
  const FunctionSpacePtr& column_domain(int j) const;

  DiscreteOperatorPtr weak_form() const;
  /// blockdiag(M_i^{-1}) * weak form, one pairing factorization per row.
  DiscreteOperatorPtr strong_form() const;

  friend BlockedOperator product(const BlockedOperator& b, const BlockedOperator& a);
  friend BlockedOperator add(const BlockedOperator& a, const BlockedOperator& b);
  friend BlockedOperator scale(Complex alpha, const BlockedOperator& a);

 private:
  struct State;
  std::shared_ptr<State> state_;
  void require() const;
};

BlockedOperator product(const BlockedOperator& b, const BlockedOperator& a);
BlockedOperator add(const BlockedOperator& a, const BlockedOperator& b);
BlockedOperator scale(Complex alpha, const BlockedOperator& a);

BlockedOperator operator*(const BlockedOperator& b, const BlockedOperator& a);
BlockedOperator operator+(const BlockedOperator& a, const BlockedOperator& b);
BlockedOperator operator-(const BlockedOperator& a, const BlockedOperator& b);
BlockedOperator operator*(Complex alpha, const BlockedOperator& a);
BlockedOperator operator*(double alpha, const BlockedOperator& a);

/// Applies the weak form and returns one function per row, given by its
/// projections onto the row dual space.
std::vector<GridFunction> apply_blocked(const BlockedOperator& op, const std::vector<GridFunction>& f);

/// Concatenated coefficients of a list of functions.
Vector concatenate_coefficients(const std::vector<GridFunction>& f);
/// Concatenated projections onto the given dual spaces.
Vector concatenate_projections(const std::vector<GridFunction>& f, const std::vector<FunctionSpacePtr>& duals);

}  // namespace bemalg
