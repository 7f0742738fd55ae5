#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/LU>

#include "bemalg/errors.hpp"
#include "bemalg/operators.hpp"
#include "bemalg/solver.hpp"

using namespace bemalg;

namespace {

Matrix well_conditioned(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = Complex(d(gen), d(gen)) / (3.0 * std::sqrt(double(n)));
  m += Matrix::Identity(n, n) * Complex(2.0, 0.5);
  return m;
}

Vector random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(d(gen), d(gen));
  return v;
}

}  // namespace

TEST_CASE("GMRES solves a well conditioned system") {
  const Matrix a = well_conditioned(80, 1);
  const Vector b = random_vector(80, 2);
  const auto op = dense_operator(a);
  GmresOptions opts;
  opts.tol = 1e-10;
  SolveReport report;
  const Vector x = gmres(*op, b, opts, report);
  CHECK(report.converged);
  CHECK(report.iterations > 0);
  CHECK(report.iterations < 80);
  CHECK((a * x - b).norm() / b.norm() < 1e-10);
  CHECK((x - a.partialPivLu().solve(b)).norm() / x.norm() < 1e-9);
  REQUIRE(report.residual_history.size() == static_cast<std::size_t>(report.iterations + 1));
  CHECK(report.residual_history.front() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < report.residual_history.size(); ++i)
    CHECK(report.residual_history[i] <= report.residual_history[i - 1] * (1.0 + 1e-12));
  CHECK(report.residual_history.back() <= opts.tol);
}

TEST_CASE("restarted GMRES converges and full GMRES terminates in n steps") {
  const Matrix a = well_conditioned(60, 3);
  const Vector b = random_vector(60, 4);
  GmresOptions opts;
  opts.tol = 1e-8;
  opts.restart = 10;
  SolveReport report;
  const Vector x = gmres(*dense_operator(a), b, opts, report);
  CHECK(report.converged);
  CHECK((a * x - b).norm() / b.norm() < 1e-8);

  // A nilpotent-plus-identity Jordan block needs all n steps.
  const int n = 12;
  Matrix j = Matrix::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = 1.0;
  Vector e = Vector::Zero(n);
  e[n - 1] = 1.0;
  GmresOptions full;
  full.tol = 1e-12;
  SolveReport r2;
  const Vector y = gmres(*dense_operator(j), e, full, r2);
  CHECK(r2.converged);
  CHECK(r2.iterations <= n);
  CHECK((j * y - e).norm() < 1e-10);
}

TEST_CASE("GMRES reports non-convergence without throwing") {
  const Matrix a = well_conditioned(50, 5);
  GmresOptions opts;
  opts.tol = 1e-14;
  opts.max_iter = 3;
  SolveReport report;
  CHECK_NOTHROW(gmres(*dense_operator(a), random_vector(50, 6), opts, report));
  CHECK_FALSE(report.converged);
  CHECK(report.iterations == 3);
}

TEST_CASE("GMRES edge cases") {
  const auto op = dense_operator(well_conditioned(10, 7));
  SolveReport report;
  const Vector x = gmres(*op, Vector::Zero(10), GmresOptions{}, report);
  CHECK(report.converged);
  CHECK(report.iterations == 0);
  CHECK(x.norm() == 0.0);
  GmresOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(gmres(*op, Vector::Ones(10), bad, report), ArgumentError);
  CHECK_THROWS_AS(gmres(*op, Vector::Ones(9), GmresOptions{}, report), ArgumentError);
  CHECK_THROWS_AS(gmres(*dense_operator(Matrix::Ones(3, 4)), Vector::Ones(3), GmresOptions{}, report), ArgumentError);
}

TEST_CASE("GMRES on boundary operators in weak and strong mode") {
  const MeshPtr m = make_sphere(2);
  const auto p0 = make_space(SpaceKind::P0, m);
  const BoundaryOperator v = single_layer(p0, p0, p0, 0.0);
  const GridFunction rhs = GridFunction::from_function(p0, p0, [](const Vec3& x, const Vec3&) { return Complex(x.z()); });
  GmresOptions opts;
  opts.tol = 1e-10;
  const GmresResult weak = gmres(v, rhs, opts);
  opts.use_strong_form = true;
  const GmresResult strong = gmres(v, rhs, opts);
  CHECK(weak.report.converged);
  CHECK(strong.report.converged);
  CHECK(weak.solution.space().get() == p0.get());
  CHECK((weak.solution.coefficients() - strong.solution.coefficients()).norm() <
        1e-8 * weak.solution.coefficients().norm());
  // The density of V sigma = z on the unit sphere is 3 z.
  const Vector expected = 3.0 * interpolate(*p0, [](const Vec3& x) { return Complex(x.z()); });
  CHECK((weak.solution.coefficients() - expected).norm() < 0.05 * expected.norm());
  const auto p1 = make_space(SpaceKind::P1, m);
  CHECK_THROWS_AS(gmres(v, GridFunction::from_ones(p1), GmresOptions{}), SpaceMismatchError);
}

TEST_CASE("dense factorizations and spectra") {
  const Matrix a = well_conditioned(20, 8);
  const Matrix spd = a * a.adjoint();
  const Matrix l = cholesky(spd);
  CHECK((l * l.adjoint() - spd).norm() < 1e-12 * spd.norm());
  CHECK(l.isLowerTriangular());
  CHECK_THROWS_AS(cholesky(a), FactorizationError);
  CHECK_THROWS_AS(cholesky(-spd), FactorizationError);

  Matrix d = Matrix::Zero(4, 4);
  d.diagonal() << 3.0, -1.0, Complex(0, 2), 0.5;
  Eigen::VectorXcd ev = dense_eig(d);
  std::vector<double> re;
  for (Eigen::Index i = 0; i < ev.size(); ++i) re.push_back(ev[i].real());
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-1.0));
  CHECK(re[3] == doctest::Approx(3.0));

  const Eigen::VectorXd sv = dense_svd(d);
  CHECK(sv[0] == doctest::Approx(3.0));
  CHECK(sv[1] == doctest::Approx(2.0));
  CHECK(sv[3] == doctest::Approx(0.5));
  Matrix bad = d;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(dense_eig(bad), NumericalError);
  CHECK_THROWS_AS(dense_svd(bad), NumericalError);
}
