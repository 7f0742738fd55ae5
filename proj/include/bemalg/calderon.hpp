#pragma once

#include <string>

#include "bemalg/blocked_operator.hpp"
#include "bemalg/grid_function.hpp"
#include "bemalg/operators.hpp"

namespace bemalg {

/// Space recipe for Cauchy data.
/// dual: Dirichlet trace in BP1, Neumann trace in DUAL0, rows paired BP1/DUAL0.
/// p1: everything in P1 on the mesh itself.
enum class SpaceRecipe { dual, p1 };

SpaceRecipe parse_space_recipe(const std::string& name);
std::string to_string(SpaceRecipe recipe);

enum class Side { interior, exterior };

/// Spaces of a recipe: column domains, row ranges and row duals.
struct CauchySpaces {
  FunctionSpacePtr dirichlet;
  FunctionSpacePtr neumann;
  /// Dual of row 0 (range = dirichlet) and row 1 (range = neumann).
  FunctionSpacePtr dirichlet_dual;
  FunctionSpacePtr neumann_dual;
};

CauchySpaces cauchy_spaces(const MeshPtr& mesh, SpaceRecipe recipe);

/// The blocked operator [[-K, V], [W, K']] and its components.
struct Multitrace {
  BlockedOperator op;
  MeshPtr mesh;
  SpaceRecipe recipe = SpaceRecipe::dual;
  CauchySpaces spaces;
  BoundaryOperator double_layer;
  BoundaryOperator single_layer;
  BoundaryOperator hypersingular;
  BoundaryOperator adjoint_double_layer;
};

struct CauchyPair {
  GridFunction dirichlet;
  GridFunction neumann;

  std::vector<GridFunction> as_vector() const { return {dirichlet, neumann}; }
};

Multitrace multitrace_operator(const MeshPtr& mesh, double k, SpaceRecipe recipe = SpaceRecipe::dual,
                               const QuadratureOptions& quad = {});

/// diag(Id, Id) with the recipe spaces.
BlockedOperator multitrace_identity(const MeshPtr& mesh, SpaceRecipe recipe = SpaceRecipe::dual);

/// 1/2 Id + A (interior) or 1/2 Id - A (exterior).
BlockedOperator calderon_projector(const Multitrace& a, Side side);
BlockedOperator calderon_projector(const MeshPtr& mesh, double k, Side side,
                                   SpaceRecipe recipe = SpaceRecipe::dual, const QuadratureOptions& quad = {});

struct TransmissionOperators {
  Multitrace a_minus;  // wavenumber n k
  Multitrace a_plus;   // wavenumber k
  BlockedOperator identity;
};

TransmissionOperators transmission_operators(const MeshPtr& mesh, double k, double n,
                                             SpaceRecipe recipe = SpaceRecipe::dual,
                                             const QuadratureOptions& quad = {});

/// Cauchy data from a trace function and a normal derivative function,
/// interpolated or projected into the recipe spaces.
CauchyPair cauchy_data(const CauchySpaces& spaces, const std::function<Complex(const Vec3&)>& trace,
                       const std::function<Complex(const Vec3&, const Vec3&)>& normal_derivative);

}  // namespace bemalg
