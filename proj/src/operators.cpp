#include "bemalg/operators.hpp"

#include <sstream>

#include "bemalg/errors.hpp"

namespace bemalg {

namespace {

using DenseAssembler = DenseWeakForm (*)(const Kernel&, const FunctionSpace&, const FunctionSpace&,
                                         const FunctionSpace&, const QuadratureOptions&);

std::string with_k(const char* name, double k) {
  std::ostringstream s;
  s << name << "[k=" << k << "]";
  return s.str();
}

BoundaryOperator dense(DenseAssembler fn, const char* name, FunctionSpacePtr domain, FunctionSpacePtr range,
                       FunctionSpacePtr dual, double k, const QuadratureOptions& quad) {
  if (k < 0.0) throw ArgumentError("wavenumber must be non-negative");
  common_grid(*domain, *dual);
  FunctionSpacePtr d = domain, r = range, t = dual;
  return BoundaryOperator(std::move(domain), std::move(range), std::move(dual),
                          [fn, d, r, t, k, quad] {
                            return dense_operator(fn(Kernel{k}, *d, *r, *t, quad).matrix);
                          },
                          with_k(name, k));
}

}  // namespace

BoundaryOperator single_layer(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual, double k,
                              const QuadratureOptions& quad) {
  return dense(assemble_single_layer, "V", std::move(domain), std::move(range), std::move(dual), k, quad);
}

BoundaryOperator double_layer(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual, double k,
                              const QuadratureOptions& quad) {
  return dense(assemble_double_layer, "K", std::move(domain), std::move(range), std::move(dual), k, quad);
}

BoundaryOperator adjoint_double_layer(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual,
                                      double k, const QuadratureOptions& quad) {
  return dense(assemble_adjoint_double_layer, "K'", std::move(domain), std::move(range), std::move(dual), k, quad);
}

BoundaryOperator hypersingular(FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual, double k,
                               const QuadratureOptions& quad) {
  if (domain->order() != 1 || dual->order() != 1)
    throw UnsupportedSpaceError("hypersingular operator needs piecewise linear domain and dual spaces");
  return dense(assemble_hypersingular_direct, "W", std::move(domain), std::move(range), std::move(dual), k, quad);
}

BoundaryOperator curl_component(int ell, FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual) {
  FunctionSpacePtr d = domain, r = range, t = dual;
  // Validate eagerly so misuse fails at construction.
  if (ell < 0 || ell > 2) throw ArgumentError("component index must be 0, 1 or 2");
  if (domain->order() != 1) throw UnsupportedSpaceError("curl component needs a piecewise linear domain");
  return BoundaryOperator(std::move(domain), std::move(range), std::move(dual),
                          [ell, d, r, t] { return sparse_operator(assemble_curl_component(ell, *d, *r, *t)); },
                          "C" + std::to_string(ell));
}

BoundaryOperator normal_component(int ell, FunctionSpacePtr domain, FunctionSpacePtr range, FunctionSpacePtr dual) {
  FunctionSpacePtr d = domain, r = range, t = dual;
  if (ell < 0 || ell > 2) throw ArgumentError("component index must be 0, 1 or 2");
  if (domain->order() != 1) throw UnsupportedSpaceError("normal component needs a piecewise linear domain");
  return BoundaryOperator(std::move(domain), std::move(range), std::move(dual),
                          [ell, d, r, t] { return sparse_operator(assemble_normal_component(ell, *d, *r, *t)); },
                          "N" + std::to_string(ell));
}

BoundaryOperator hypersingular_via_single_layer(FunctionSpacePtr domain, FunctionSpacePtr range,
                                                FunctionSpacePtr dual, double k, const QuadratureOptions& quad) {
  if (domain->order() != 1 || dual->order() != 1)
    throw UnsupportedSpaceError("hypersingular operator needs piecewise linear domain and dual spaces");
  const MeshPtr grid = common_grid(*domain, *dual);
  const FunctionSpacePtr disc = make_space(k == 0.0 ? SpaceKind::P0 : SpaceKind::DP1, grid);
  const BoundaryOperator v = single_layer(disc, disc, disc, k, quad);

  BoundaryOperator total;
  for (int ell = 0; ell < 3; ++ell) {
    const BoundaryOperator c_dom = curl_component(ell, domain, disc, disc);
    const BoundaryOperator c_dual = curl_component(ell, dual, disc, disc);
    const BoundaryOperator term = dual_product(c_dual, product(v, c_dom));
    total = total.valid() ? add(total, term) : term;
  }
  if (k != 0.0) {
    for (int ell = 0; ell < 3; ++ell) {
      const BoundaryOperator n_dom = normal_component(ell, domain, disc, disc);
      const BoundaryOperator n_dual = normal_component(ell, dual, disc, disc);
      total = add(total, scale(-k * k, dual_product(n_dual, product(v, n_dom))));
    }
  }
  return total.respaced(std::move(domain), std::move(range), std::move(dual));
}

}  // namespace bemalg
