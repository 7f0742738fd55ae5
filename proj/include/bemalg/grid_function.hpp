#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "bemalg/boundary_operator.hpp"
#include "bemalg/space.hpp"

namespace bemalg {

/// Function in a space, stored either by coefficients or by projections onto
/// a dual space. The other representation is computed on demand and cached.
class GridFunction {
 public:
  GridFunction() = default;

  static GridFunction from_coefficients(FunctionSpacePtr space, Vector coefficients);
  static GridFunction from_projections(FunctionSpacePtr space, FunctionSpacePtr dual, Vector projections);
  static GridFunction from_ones(FunctionSpacePtr space);
  static GridFunction from_zeros(FunctionSpacePtr space);
  /// L2 projection of f(x, normal) onto `space`, computed through projections
  /// onto `dual` by quadrature of the given degree.
  static GridFunction from_function(FunctionSpacePtr space, FunctionSpacePtr dual,
                                    const std::function<Complex(const Vec3&, const Vec3&)>& f,
                                    int degree = 6);
  /// Nodal interpolant of f (see interpolate()).
  static GridFunction interpolated(FunctionSpacePtr space, const std::function<Complex(const Vec3&)>& f);

  bool valid() const { return static_cast<bool>(state_); }
  const FunctionSpacePtr& space() const;

  bool has_coefficients() const;
  /// Stored dual space, null when built from coefficients.
  FunctionSpacePtr stored_dual() const;

  /// Coefficients; solves with the cached pairing factorization when the
  /// function was built from projections. Throws ConversionUnavailableError
  /// when the pairing is rectangular or singular.
  const Vector& coefficients() const;
  /// Projections <f, psi_i> onto the basis of `dual`.
  Vector projections(const FunctionSpacePtr& dual) const;

  /// sqrt(<f, f>) using the self mass matrix of the space.
  double l2_norm() const;

  GridFunction operator+(const GridFunction& other) const;
  GridFunction operator-(const GridFunction& other) const;
  GridFunction operator*(Complex alpha) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

GridFunction operator*(Complex alpha, const GridFunction& f);

/// op applied to f, returned by projections onto op's dual space.
GridFunction apply(const BoundaryOperator& op, const GridFunction& f);

/// Pointwise evaluation at the reference point (s, t) of an assembly grid element.
Complex evaluate(const GridFunction& f, int element, double s, double t);

}  // namespace bemalg
