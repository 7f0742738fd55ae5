#include <doctest.h>

#include <random>

#include "bemalg/blocked_operator.hpp"
#include "bemalg/errors.hpp"
#include "bemalg/operators.hpp"
#include "bemalg/solver.hpp"

using namespace bemalg;

namespace {

Vector random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(d(gen), d(gen));
  return v;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = Complex(d(gen), d(gen));
  return m;
}

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / b.norm(); }

struct Fixture {
  MeshPtr mesh = make_sphere(1);
  FunctionSpacePtr p0 = make_space(SpaceKind::P0, mesh);
  FunctionSpacePtr p1 = make_space(SpaceKind::P1, mesh);
  FunctionSpacePtr dp1 = make_space(SpaceKind::DP1, mesh);
  FunctionSpacePtr d0 = make_space(SpaceKind::DUAL0, mesh);
  FunctionSpacePtr bp1 = make_space(SpaceKind::BP1, mesh);

  BoundaryOperator random_op(const FunctionSpacePtr& dom, const FunctionSpacePtr& ran, const FunctionSpacePtr& dual,
                             unsigned seed) const {
    return from_weak_form(dom, ran, dual, dense_operator(random_matrix(dual->dof_count(), dom->dof_count(), seed)),
                          "R" + std::to_string(seed));
  }
};

}  // namespace

TEST_CASE("discrete operators") {
  const Matrix a = random_matrix(5, 4, 1), b = random_matrix(4, 3, 2);
  const Vector x = random_vector(3, 3), y = random_vector(5, 4);
  const auto da = dense_operator(a), db = dense_operator(b);
  CHECK(rel(product_operator({da, db})->matvec(x), a * (b * x)) < 1e-14);
  CHECK(rel(adjoint_operator(da)->matvec(y), a.adjoint() * y) < 1e-14);
  CHECK(rel(da->rmatvec(y), a.adjoint() * y) < 1e-14);
  CHECK(rel(scaled_operator(Complex(0, 2), db)->matvec(x), Complex(0, 2) * (b * x)) < 1e-14);
  CHECK(rel(sum_operator(db, db)->matvec(x), 2.0 * (b * x)) < 1e-14);
  CHECK(zero_operator(4, 3)->matvec(x).norm() == 0.0);
  const Vector u = random_vector(5, 5), v = random_vector(4, 6);
  CHECK((rank_one_operator(u, v, 2.0)->to_dense() - 2.0 * u * v.transpose()).norm() < 1e-13);

  const auto blocks = block_operator({{da, nullptr}, {nullptr, db}}, {5, 4}, {4, 3});
  CHECK(blocks->rows() == 9);
  CHECK(blocks->cols() == 7);
  Matrix expected = Matrix::Zero(9, 7);
  expected.block(0, 0, 5, 4) = a;
  expected.block(5, 4, 4, 3) = b;
  CHECK((blocks->to_dense() - expected).norm() < 1e-14);
  CHECK((blocks->apply_adjoint(Matrix::Identity(9, 9)) - expected.adjoint()).norm() < 1e-14);
}

TEST_CASE("factorizations") {
  const Matrix a = random_matrix(6, 6, 7);
  const auto lu = dense_lu(a);
  const Matrix b = random_matrix(6, 2, 8);
  CHECK((a * lu->solve(b) - b).norm() < 1e-12 * b.norm());
  CHECK((a.adjoint() * lu->solve_adjoint(b) - b).norm() < 1e-12 * b.norm());
  Matrix singular = a;
  singular.col(5) = singular.col(0);
  CHECK_THROWS_AS(dense_lu(singular), FactorizationError);

  const SparseMatrix s = a.sparseView();
  const auto slu = sparse_lu(s);
  CHECK((a * slu->solve(b) - b).norm() < 1e-12 * b.norm());
  CHECK_THROWS_AS(sparse_lu(SparseMatrix(singular.sparseView())), FactorizationError);
}

TEST_CASE("identity operator strong form is the identity") {
  Fixture f;
  for (const auto& [ran, dual] : {std::pair{f.p1, f.p1}, std::pair{f.bp1, f.d0}, std::pair{f.d0, f.bp1},
                                  std::pair{f.p0, f.p0}, std::pair{f.dp1, f.dp1}}) {
    const BoundaryOperator id = identity_operator(ran, ran, dual);
    const Vector v = random_vector(ran->dof_count(), 11);
    CHECK(rel(id.strong_form()->matvec(v), v) < 1e-12);
  }
  const BoundaryOperator rect = identity_operator(f.p0, f.p0, f.p1);
  CHECK_THROWS_AS(rect.strong_form(), FactorizationError);
}

TEST_CASE("product laws") {
  Fixture f;
  const BoundaryOperator a = f.random_op(f.p1, f.d0, f.bp1, 1);
  const BoundaryOperator b = f.random_op(f.d0, f.dp1, f.dp1, 2);
  const BoundaryOperator c = f.random_op(f.dp1, f.p0, f.p0, 3);
  const Vector x = random_vector(f.p1->dof_count(), 4);

  const BoundaryOperator left = (c * b) * a, right = c * (b * a);
  CHECK(left.domain().get() == f.p1.get());
  CHECK(left.range().get() == f.p0.get());
  CHECK(left.dual_to_range().get() == f.p0.get());
  CHECK(rel(left.weak_form()->matvec(x), right.weak_form()->matvec(x)) < 1e-12);
  CHECK(rel(left.strong_form()->matvec(x), c.strong_form()->matvec(b.strong_form()->matvec(a.strong_form()->matvec(x)))) < 1e-12);

  const BoundaryOperator id_range = identity_operator(f.d0, f.d0, f.bp1);
  const BoundaryOperator id_domain = identity_operator(f.p1, f.p1, f.p1);
  CHECK(rel((id_range * a).weak_form()->matvec(x), a.weak_form()->matvec(x)) < 1e-12);
  CHECK(rel((a * id_domain).weak_form()->matvec(x), a.weak_form()->matvec(x)) < 1e-12);

  CHECK_THROWS_AS(a * c, SpaceMismatchError);
  CHECK_THROWS_AS(b * f.random_op(f.p1, f.bp1, f.d0, 5), SpaceMismatchError);
}

TEST_CASE("dual product") {
  Fixture f;
  const BoundaryOperator a = f.random_op(f.p1, f.d0, f.bp1, 1);
  const BoundaryOperator id = identity_operator(f.bp1, f.bp1, f.d0);
  const BoundaryOperator r = dual_product(id, a);
  CHECK(r.domain().get() == f.p1.get());
  CHECK(r.range().get() == f.d0.get());
  CHECK(r.dual_to_range().get() == f.bp1.get());
  const Vector x = random_vector(f.p1->dof_count(), 2);
  CHECK(rel(r.weak_form()->matvec(x), a.weak_form()->matvec(x)) < 1e-12);

  const BoundaryOperator b = f.random_op(f.dp1, f.bp1, f.d0, 3);
  const BoundaryOperator rb = dual_product(b, a);
  CHECK(rb.dual_to_range().get() == f.dp1.get());
  const Matrix expected = b.strong_form()->to_dense().adjoint() * a.weak_form()->to_dense();
  CHECK(rel(rb.weak_form()->matvec(x), expected * x) < 1e-12);
  CHECK_THROWS_AS(dual_product(a, a), SpaceMismatchError);
}

TEST_CASE("sums and scalings") {
  Fixture f;
  const BoundaryOperator a = f.random_op(f.p1, f.d0, f.bp1, 1);
  const Vector x = random_vector(f.p1->dof_count(), 2);
  CHECK((a + (-1.0) * a).weak_form()->matvec(x).norm() <= 1e-14 * a.weak_form()->matvec(x).norm());
  CHECK((a - a).weak_form()->matvec(x).norm() <= 1e-14 * a.weak_form()->matvec(x).norm());
  const BoundaryOperator id = identity_operator(f.p1, f.p1, f.p1);
  CHECK((0.5 * id).weak_form()->to_dense().isApprox(0.5 * Matrix(*pairing_mass(f.p1, f.p1))));
  CHECK_THROWS_AS(a + f.random_op(f.p1, f.d0, f.p1, 3), SpaceMismatchError);
  CHECK_THROWS_AS(a + f.random_op(f.p1, f.bp1, f.d0, 3), SpaceMismatchError);
}

TEST_CASE("weak forms and factorizations are computed once") {
  Fixture f;
  const MeshPtr m = make_sphere(0);
  const auto p1 = make_space(SpaceKind::P1, m), dp1 = make_space(SpaceKind::DP1, m);
  const BoundaryOperator v = single_layer(dp1, p1, p1, 0.0);
  const BoundaryOperator w = hypersingular(p1, dp1, dp1, 0.0);
  const long a0 = assembly_count(), f0 = factorization_count();
  const BoundaryOperator wv = w * v;
  const BoundaryOperator vwv = v * wv;
  const Vector x = random_vector(dp1->dof_count(), 1);
  for (int rep = 0; rep < 3; ++rep) {
    wv.weak_form()->matvec(x);
    vwv.weak_form()->matvec(x);
    vwv.strong_form()->matvec(x);
  }
  // V, W and the pairings (P1, P1), (DP1, DP1).
  CHECK(assembly_count() - a0 == 4);
  CHECK(factorization_count() - f0 == 2);
}

TEST_CASE("rank one regularization and L2 norm") {
  Fixture f;
  const BoundaryOperator w = hypersingular(f.p1, f.p1, f.p1, 0.0);
  const Matrix wr = rank_one_regularized(w).weak_form()->to_dense();
  CHECK_NOTHROW(cholesky(0.5 * (wr + wr.adjoint())));
  CHECK_THROWS_AS(cholesky(-wr), FactorizationError);

  CHECK(l2_operator_norm(identity_operator(f.p1, f.p1, f.p1)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(l2_operator_norm(3.0 * identity_operator(f.bp1, f.bp1, f.bp1)) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK_THROWS_AS(l2_operator_norm(identity_operator(f.p0, f.p0, f.p1)), FactorizationError);
}

TEST_CASE("grid function representations") {
  Fixture f;
  const MeshPtr cube = make_cube(0.5);
  const auto p0 = make_space(SpaceKind::P0, cube), p1 = make_space(SpaceKind::P1, cube);
  const auto d0 = make_space(SpaceKind::DUAL0, cube);
  const Vector areas = GridFunction::from_ones(p0).projections(p0);
  for (std::size_t e = 0; e < cube->element_count(); ++e)
    CHECK(areas[static_cast<Eigen::Index>(e)].real() == doctest::Approx(cube->area(static_cast<int>(e))).epsilon(1e-14));
  const Vector dual_areas = GridFunction::from_ones(p1).projections(d0);
  for (std::size_t v = 0; v < cube->vertex_count(); ++v)
    CHECK(dual_areas[static_cast<Eigen::Index>(v)].real() ==
          doctest::Approx(cube->barycentric()->dual_cell_area(static_cast<int>(v))).epsilon(1e-13));

  const Vector c = random_vector(f.p1->dof_count(), 3);
  const GridFunction g = GridFunction::from_coefficients(f.p1, c);
  CHECK(g.coefficients() == c);
  const Vector p = g.projections(f.p1);
  const GridFunction h = GridFunction::from_projections(f.p1, f.p1, p);
  CHECK(h.projections(f.p1) == p);
  CHECK(rel(h.coefficients(), c) < 1e-12);

  const GridFunction rect = GridFunction::from_projections(f.p0, f.p1, random_vector(f.p1->dof_count(), 4));
  CHECK_THROWS_AS(rect.coefficients(), ConversionUnavailableError);
  CHECK_THROWS_AS(rect.projections(f.p0), ConversionUnavailableError);
  CHECK_THROWS_AS(GridFunction::from_coefficients(f.p1, Vector::Zero(3)), ArgumentError);

  const GridFunction lin = GridFunction::from_function(f.p1, f.p1, [](const Vec3& x, const Vec3&) {
    return Complex(1.0 + x.x() - 0.5 * x.z());
  });
  const Vector nodal = interpolate(*f.p1, [](const Vec3& x) { return Complex(1.0 + x.x() - 0.5 * x.z()); });
  CHECK(rel(lin.coefficients(), nodal) < 1e-10);
  CHECK(GridFunction::from_ones(f.p0).l2_norm() == doctest::Approx(std::sqrt(f.mesh->total_area())));
  CHECK(rel((g + g - g * Complex(2.0)).coefficients() + c, c) < 1e-14);
}

TEST_CASE("apply returns projections onto the dual space") {
  Fixture f;
  const BoundaryOperator id = identity_operator(f.p1, f.p1, f.p1);
  const Vector c = random_vector(f.p1->dof_count(), 5);
  const GridFunction g = GridFunction::from_coefficients(f.p1, c);
  const GridFunction r = apply(id, g);
  CHECK_FALSE(r.has_coefficients());
  CHECK(r.stored_dual().get() == f.p1.get());
  CHECK(rel(r.coefficients(), c) < 1e-12);
  CHECK_THROWS_AS(apply(id, GridFunction::from_ones(f.p0)), SpaceMismatchError);
}

TEST_CASE("blocked operators") {
  Fixture f;
  BlockedOperator b(2, 2);
  b.set(0, 0, identity_operator(f.bp1, f.bp1, f.d0));
  CHECK_THROWS_AS(b.validate(), BlockStructureError);
  CHECK_THROWS_AS(b.set(0, 1, f.random_op(f.d0, f.p1, f.p1, 1)), BlockStructureError);
  CHECK_THROWS_AS(b.set(1, 0, f.random_op(f.p1, f.d0, f.bp1, 1)), BlockStructureError);
  b.set(1, 1, identity_operator(f.d0, f.d0, f.bp1));
  CHECK_NOTHROW(b.validate());
  CHECK_FALSE(b.block(0, 1).valid());

  const Vector x = random_vector(f.bp1->dof_count() + f.d0->dof_count(), 2);
  CHECK(rel(b.strong_form()->matvec(x), x) < 1e-12);

  const auto out = apply_blocked(b, {GridFunction::from_coefficients(f.bp1, x.head(f.bp1->dof_count())),
                                     GridFunction::from_coefficients(f.d0, x.tail(f.d0->dof_count()))});
  CHECK(rel(concatenate_coefficients(out), x) < 1e-12);
  CHECK_THROWS_AS(apply_blocked(b, {GridFunction::from_ones(f.bp1)}), BlockStructureError);
  CHECK_THROWS_AS(apply_blocked(b, {GridFunction::from_ones(f.d0), GridFunction::from_ones(f.bp1)}),
                  SpaceMismatchError);

  const BlockedOperator sq = b * b;
  CHECK(sq.is_composite());
  CHECK(rel(sq.strong_form()->matvec(x), x) < 1e-12);
  CHECK(rel((b + (-1.0) * b).weak_form()->matvec(x) + x, x) < 1e-14);

  BlockedOperator empty_row(2, 1);
  empty_row.set(0, 0, identity_operator(f.p1, f.p1, f.p1));
  try {
    empty_row.validate();
    FAIL("expected BlockStructureError");
  } catch (const BlockStructureError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("blocked strong form factorizes once per row") {
  const MeshPtr m = make_sphere(0);
  const auto p1 = make_space(SpaceKind::P1, m), dp1 = make_space(SpaceKind::DP1, m);
  BlockedOperator b(2, 2);
  b.set(0, 0, identity_operator(p1, p1, p1));
  b.set(0, 1, from_weak_form(dp1, p1, p1, dense_operator(random_matrix(12, 60, 1)), "X"));
  b.set(1, 0, from_weak_form(p1, dp1, dp1, dense_operator(random_matrix(60, 12, 2)), "Y"));
  b.set(1, 1, identity_operator(dp1, dp1, dp1));
  const long before = factorization_count();
  b.strong_form()->matvec(random_vector(72, 3));
  b.strong_form()->matvec(random_vector(72, 4));
  CHECK(factorization_count() - before == 2);
}
