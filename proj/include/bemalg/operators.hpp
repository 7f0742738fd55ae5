#pragma once

#include "bemalg/assembly.hpp"
#include "bemalg/boundary_operator.hpp"

namespace bemalg {

/// Boundary operators whose weak forms come from dense assembly on first use.
BoundaryOperator single_layer(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual, double k,
                              const QuadratureOptions& quad = {});
BoundaryOperator double_layer(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual, double k,
                              const QuadratureOptions& quad = {});
BoundaryOperator adjoint_double_layer(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual,
                                      double k, const QuadratureOptions& quad = {});
/// Direct assembly of the integrated by parts form.
BoundaryOperator hypersingular(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual, double k,
                               const QuadratureOptions& quad = {});

/// Sparse operators mapping a linear space into a discontinuous space.
BoundaryOperator curl_component(int ell, FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual);
BoundaryOperator normal_component(int ell, FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual);

/// Hypersingular operator composed from one single layer operator:
/// sum_l C_l (.)_D (V (.) C_l) - k^2 sum_l N_l (.)_D (V (.) N_l), with V on DP1
/// (k > 0) or P0 (k = 0) of the common assembly grid. The result carries the
/// requested spaces.
BoundaryOperator hypersingular_via_single_layer(FunctionSpacePtr domain, FunctionSpacePtr range,
                                                FunctionSpacePtr dual, double k,
                                                const QuadratureOptions& quad = {});

}  // namespace bemalg
