#include "bemalg/calderon.hpp"

#include "bemalg/errors.hpp"

namespace bemalg {

SpaceRecipe parse_space_recipe(const std::string& name) {
  if (name == "dual") return SpaceRecipe::dual;
  if (name == "p1" || name == "P1") return SpaceRecipe::p1;
  throw UnsupportedSpaceError("unknown space recipe '" + name + "'");
}

std::string to_string(SpaceRecipe recipe) { return recipe == SpaceRecipe::dual ? "dual" : "p1"; }

CauchySpaces cauchy_spaces(const MeshPtr& mesh, SpaceRecipe recipe) {
  if (!mesh) throw ArgumentError("null mesh");
  CauchySpaces s;
  if (recipe == SpaceRecipe::dual) {
    s.dirichlet = make_space(SpaceKind::BP1, mesh);
    s.neumann = make_space(SpaceKind::DUAL0, mesh);
    s.dirichlet_dual = s.neumann;
    s.neumann_dual = s.dirichlet;
  } else {
    s.dirichlet = make_space(SpaceKind::P1, mesh);
    s.neumann = s.dirichlet;
    s.dirichlet_dual = s.dirichlet;
    s.neumann_dual = s.dirichlet;
  }
  return s;
}

Multitrace multitrace_operator(const MeshPtr& mesh, double k, SpaceRecipe recipe, const QuadratureOptions& quad) {
  Multitrace m;
  m.mesh = mesh;
  m.recipe = recipe;
  m.spaces = cauchy_spaces(mesh, recipe);
  const CauchySpaces& s = m.spaces;
  m.double_layer = double_layer(s.dirichlet, s.dirichlet, s.dirichlet_dual, k, quad);
  m.single_layer = single_layer(s.neumann, s.dirichlet, s.dirichlet_dual, k, quad);
  m.hypersingular = hypersingular(s.dirichlet, s.neumann, s.neumann_dual, k, quad);
  m.adjoint_double_layer = adjoint_double_layer(s.neumann, s.neumann, s.neumann_dual, k, quad);
  m.op = BlockedOperator(2, 2);
  m.op.set(0, 0, -m.double_layer);
  m.op.set(0, 1, m.single_layer);
  m.op.set(1, 0, m.hypersingular);
  m.op.set(1, 1, m.adjoint_double_layer);
  return m;
}

BlockedOperator multitrace_identity(const MeshPtr& mesh, SpaceRecipe recipe) {
  const CauchySpaces s = cauchy_spaces(mesh, recipe);
  BlockedOperator id(2, 2);
  id.set(0, 0, identity_operator(s.dirichlet, s.dirichlet, s.dirichlet_dual));
  id.set(1, 1, identity_operator(s.neumann, s.neumann, s.neumann_dual));
  return id;
}

BlockedOperator calderon_projector(const Multitrace& a, Side side) {
  const BlockedOperator half = 0.5 * multitrace_identity(a.mesh, a.recipe);
  return side == Side::interior ? half + a.op : half - a.op;
}

BlockedOperator calderon_projector(const MeshPtr& mesh, double k, Side side, SpaceRecipe recipe,
                                   const QuadratureOptions& quad) {
  return calderon_projector(multitrace_operator(mesh, k, recipe, quad), side);
}

TransmissionOperators transmission_operators(const MeshPtr& mesh, double k, double n, SpaceRecipe recipe,
                                             const QuadratureOptions& quad) {
  if (!(k > 0.0)) throw ArgumentError("transmission problem needs a positive wavenumber");
  if (!(n > 0.0)) throw ArgumentError("transmission problem needs a positive refractive index");
  TransmissionOperators t;
  t.a_minus = multitrace_operator(mesh, n * k, recipe, quad);
  t.a_plus = n == 1.0 ? t.a_minus : multitrace_operator(mesh, k, recipe, quad);
  t.identity = multitrace_identity(mesh, recipe);
  return t;
}

CauchyPair cauchy_data(const CauchySpaces& spaces, const std::function<Complex(const Vec3&)>& trace,
                       const std::function<Complex(const Vec3&, const Vec3&)>& normal_derivative) {
  CauchyPair p;
  p.dirichlet = GridFunction::interpolated(spaces.dirichlet, trace);
  p.neumann = GridFunction::from_function(spaces.neumann, spaces.neumann_dual, normal_derivative);
  return p;
}

}  // namespace bemalg
