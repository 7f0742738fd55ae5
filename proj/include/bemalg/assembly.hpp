#pragma once

#include <string>
#include <vector>

#include "bemalg/quadrature.hpp"
#include "bemalg/space.hpp"
#include "bemalg/types.hpp"

namespace bemalg {

/// Green's function e^{ikr} / (4 pi r); k = 0 is the Laplace kernel.
struct Kernel {
  double k = 0.0;

  bool is_laplace() const { return k == 0.0; }
  Complex green(const Vec3& x, const Vec3& y) const;
  /// Normal derivative with respect to y along ny.
  Complex dgreen_dny(const Vec3& x, const Vec3& y, const Vec3& ny) const;
  /// Normal derivative with respect to x along nx.
  Complex dgreen_dnx(const Vec3& x, const Vec3& y, const Vec3& nx) const;
};

struct Provenance {
  std::string kind;
  std::string domain;
  std::string dual;
  double wavenumber = 0.0;
  QuadratureOptions quadrature;
};

/// Galerkin matrix of shape (dual dofs x domain dofs).
struct DenseWeakForm {
  Matrix matrix;
  Provenance provenance;
};

DenseWeakForm assemble_single_layer(const Kernel& kernel, const FunctionSpace& domain,
                                    const FunctionSpace& range, const FunctionSpace& dual,
                                    const QuadratureOptions& quad = {});
DenseWeakForm assemble_double_layer(const Kernel& kernel, const FunctionSpace& domain,
                                    const FunctionSpace& range, const FunctionSpace& dual,
                                    const QuadratureOptions& quad = {});
DenseWeakForm assemble_adjoint_double_layer(const Kernel& kernel, const FunctionSpace& domain,
                                            const FunctionSpace& range, const FunctionSpace& dual,
                                            const QuadratureOptions& quad = {});
/// Integrated by parts form; domain and dual must be piecewise linear.
DenseWeakForm assemble_hypersingular_direct(const Kernel& kernel, const FunctionSpace& domain,
                                            const FunctionSpace& range, const FunctionSpace& dual,
                                            const QuadratureOptions& quad = {});

/// Exact L2 pairing <phi_domain_j, phi_dual_i>.
SparseMatrix assemble_mass(const FunctionSpace& domain, const FunctionSpace& range,
                           const FunctionSpace& dual);
/// <[curl theta_j]_ell, xi_i> for ell in {0, 1, 2}.
SparseMatrix assemble_curl_component(int ell, const FunctionSpace& domain,
                                     const FunctionSpace& range, const FunctionSpace& dual);
/// <nu_ell theta_j, xi_i> for ell in {0, 1, 2}.
SparseMatrix assemble_normal_component(int ell, const FunctionSpace& domain,
                                       const FunctionSpace& range, const FunctionSpace& dual);

/// Embedding of P1 into DP1 on the same mesh: (3F x V), one unit entry per row.
SparseMatrix duplication_matrix(const FunctionSpace& p1, const FunctionSpace& dp1);

/// W on P1 obtained as P^T W_DP1 P.
DenseWeakForm assemble_projection_hypersingular(const Kernel& kernel, const MeshPtr& mesh,
                                                const QuadratureOptions& quad = {});

struct PotentialOptions {
  /// Points closer to an element than epsilon times its diameter are rejected.
  double epsilon = 1e-3;
  /// Triangle rule degree on each (sub)element.
  int degree = 4;
  /// An element is subdivided while the point is closer than
  /// near_factor times its diameter.
  double near_factor = 3.0;
  int max_depth = 8;
};

/// Matrix mapping coefficients of `space` to values of the single layer
/// potential at `points` (rows).
Matrix potential_single_layer(const Kernel& kernel, const FunctionSpace& space,
                              const std::vector<Vec3>& points, const PotentialOptions& opts = {});
Matrix potential_double_layer(const Kernel& kernel, const FunctionSpace& space,
                              const std::vector<Vec3>& points, const PotentialOptions& opts = {});

/// Distance from a point to a flat triangle.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Number of dense and sparse Galerkin assemblies performed so far.
long assembly_count();

}  // namespace bemalg
