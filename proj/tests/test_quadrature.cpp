#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "bemalg/errors.hpp"
#include "bemalg/quadrature.hpp"

using namespace bemalg;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// Integral of s^a t^b over the reference triangle.
double triangle_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

// Potential of a flat triangle with unit density at a point x in its plane:
// integral over the triangle of 1/|x - y|.
double in_plane_potential(const std::array<Vec3, 3>& p, const Vec3& x) {
  const Vec3 n = (p[1] - p[0]).cross(p[2] - p[0]).normalized();
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& a = p[i];
    const Vec3& b = p[(i + 1) % 3];
    const Vec3 s = (b - a).normalized();
    const Vec3 m = s.cross(n);
    const double h = (a - x).dot(m);
    if (std::abs(h) < 1e-15) continue;
    const double lm = (a - x).dot(s), lp = (b - x).dot(s);
    const double rm = (a - x).norm(), rp = (b - x).norm();
    sum += h * std::log((lp + rp) / (lm + rm));
  }
  return sum;
}

// Integral over triangle p of f, using a collapsed Gauss rule on each of
// 4^depth congruent subtriangles.
template <typename F>
double composite_integral(const std::array<Vec3, 3>& p, int depth, int n, F&& f) {
  if (depth > 0) {
    const Vec3 m01 = 0.5 * (p[0] + p[1]), m12 = 0.5 * (p[1] + p[2]), m20 = 0.5 * (p[2] + p[0]);
    return composite_integral({p[0], m01, m20}, depth - 1, n, f) +
           composite_integral({m01, p[1], m12}, depth - 1, n, f) +
           composite_integral({m20, m12, p[2]}, depth - 1, n, f) +
           composite_integral({m12, m20, m01}, depth - 1, n, f);
  }
  const LineRule g = gauss_legendre(n);
  const double jac = (p[1] - p[0]).cross(p[2] - p[0]).norm();
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = g.points[i], v = g.points[j] * (1.0 - u);
      sum += g.weights[i] * g.weights[j] * (1.0 - u) * f(p[0] + u * (p[1] - p[0]) + v * (p[2] - p[0]));
    }
  return sum * jac;
}

Vec3 on(const std::array<Vec3, 3>& p, const std::array<double, 2>& st) {
  return p[0] + st[0] * (p[1] - p[0]) + st[1] * (p[2] - p[0]);
}

double rule_integral(const PairRule& r, const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b) {
  const double ja = (a[1] - a[0]).cross(a[2] - a[0]).norm();
  const double jb = (b[1] - b[0]).cross(b[2] - b[0]).norm();
  double sum = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) sum += r.weights[q] / (on(a, r.x[q]) - on(b, r.y[q])).norm();
  return sum * ja * jb;
}

// The composite error decays like 4^-depth, so one Richardson step removes it.
double oracle(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b) {
  const auto f = [&](const Vec3& x) { return in_plane_potential(b, x); };
  const double coarse = composite_integral(a, 6, 8, f), fine = composite_integral(a, 7, 8, f);
  return (4.0 * fine - coarse) / 3.0;
}

const std::array<Vec3, 3> tri_a{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.3, 0.8, 0)};
const std::array<Vec3, 3> tri_edge{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.6, -0.7, 0)};
const std::array<Vec3, 3> tri_vertex{Vec3(0, 0, 0), Vec3(-0.8, 0.2, 0), Vec3(-0.5, -0.9, 0)};

}  // namespace

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n = 1; n <= 12; ++n) {
    const LineRule r = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int m = 0; m <= 2 * n - 1; ++m) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.points[i], m);
      CHECK(s == doctest::Approx(1.0 / (m + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), ArgumentError);
}

TEST_CASE("triangle rules integrate monomials up to their degree") {
  for (int d = 1; d <= max_triangle_degree; ++d) {
    const TriangleRule r = gauss_triangle(d);
    CHECK(r.degree >= d);
    for (const auto& p : r.points) {
      CHECK(p[0] >= 0.0);
      CHECK(p[1] >= 0.0);
      CHECK(p[0] + p[1] <= 1.0 + 1e-15);
    }
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q][0], a) * std::pow(r.points[q][1], b);
        CHECK(s == doctest::Approx(triangle_monomial(a, b)).epsilon(1e-12));
      }
  }
  CHECK_THROWS_AS(gauss_triangle(0), ArgumentError);
  CHECK_THROWS_AS(gauss_triangle(max_triangle_degree + 1), ArgumentError);
}

TEST_CASE("singular pair rules integrate smooth products exactly") {
  for (PairClass cls : {PairClass::identical, PairClass::shared_edge, PairClass::shared_vertex}) {
    const PairRule r = singular_pair_rule(cls, 5);
    CHECK(r.cls == cls);
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; a + b <= 2; ++b)
        for (int c = 0; c <= 2; ++c)
          for (int d = 0; c + d <= 2; ++d) {
            double s = 0.0;
            for (std::size_t q = 0; q < r.size(); ++q)
              s += r.weights[q] * std::pow(r.x[q][0], a) * std::pow(r.x[q][1], b) * std::pow(r.y[q][0], c) *
                   std::pow(r.y[q][1], d);
            CHECK(s == doctest::Approx(triangle_monomial(a, b) * triangle_monomial(c, d)).epsilon(1e-13));
          }
  }
  CHECK_THROWS_AS(singular_pair_rule(PairClass::disjoint, 4), ArgumentError);
  CHECK_THROWS_AS(singular_pair_rule(PairClass::identical, 0), ArgumentError);
}

TEST_CASE("regular pair rule is the tensor product") {
  const TriangleRule a = gauss_triangle(3), b = gauss_triangle(5);
  const PairRule r = regular_pair_rule(a, b);
  CHECK(r.size() == a.size() * b.size());
  double s = 0.0;
  for (double w : r.weights) s += w;
  CHECK(s == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("coincident 1/r integral matches the analytic potential oracle") {
  const double exact = oracle(tri_a, tri_a);
  double previous = 1.0;
  for (int order : {2, 4, 8}) {
    const double err = std::abs(rule_integral(singular_pair_rule(PairClass::identical, order), tri_a, tri_a) - exact) / exact;
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-8);
}

TEST_CASE("edge adjacent 1/r integral matches the analytic potential oracle") {
  const double exact = oracle(tri_a, tri_edge);
  double previous = 1.0;
  for (int order : {2, 4, 8}) {
    const double err = std::abs(rule_integral(singular_pair_rule(PairClass::shared_edge, order), tri_a, tri_edge) - exact) / exact;
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-8);
}

TEST_CASE("vertex adjacent 1/r integral matches the analytic potential oracle") {
  const double exact = oracle(tri_a, tri_vertex);
  double previous = 1.0;
  for (int order : {2, 4, 8}) {
    const double err =
        std::abs(rule_integral(singular_pair_rule(PairClass::shared_vertex, order), tri_a, tri_vertex) - exact) / exact;
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-8);
}

TEST_CASE("pair classification and alignment on a sphere") {
  const MeshPtr m = make_sphere(1);
  const int n = static_cast<int>(m->element_count());
  int counts[4] = {0, 0, 0, 0};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::set<int> sa(m->triangle(a).begin(), m->triangle(a).end());
      int shared = 0;
      for (int v : m->triangle(b)) shared += static_cast<int>(sa.count(v));
      const PairClass cls = classify_pair(*m, a, b);
      CHECK(static_cast<int>(cls) == shared);
      ++counts[shared];
      const PairAlignment al = align_pair(*m, a, b);
      CHECK(al.cls == cls);
      for (int i = 0; i < shared; ++i) CHECK(m->triangle(a)[al.perm_a[i]] == m->triangle(b)[al.perm_b[i]]);
      std::array<int, 3> pa = al.perm_a, pb = al.perm_b;
      std::sort(pa.begin(), pa.end());
      std::sort(pb.begin(), pb.end());
      CHECK(pa == std::array<int, 3>{0, 1, 2});
      CHECK(pb == std::array<int, 3>{0, 1, 2});
    }
  CHECK(counts[3] == n);
  CHECK(counts[2] == 3 * n);
  CHECK_THROWS_AS(classify_pair(*m, -1, 0), ArgumentError);
}
