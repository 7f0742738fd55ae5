#include <doctest.h>

#include <cmath>

#include "bemalg/errors.hpp"
#include "bemalg/space.hpp"

using namespace bemalg;

namespace {

const SpaceKind all_kinds[] = {SpaceKind::P0, SpaceKind::P1, SpaceKind::DP1, SpaceKind::DUAL0, SpaceKind::BP1};

Complex linear(const Vec3& x) { return Complex(0.5 + x.x() - 2.0 * x.y() + 0.25 * x.z(), x.z()); }

}  // namespace

TEST_CASE("dof counts") {
  const MeshPtr m = make_sphere(2);
  const int v = static_cast<int>(m->vertex_count()), f = static_cast<int>(m->element_count());
  CHECK(make_space(SpaceKind::P0, m)->dof_count() == f);
  CHECK(make_space(SpaceKind::P1, m)->dof_count() == v);
  CHECK(make_space(SpaceKind::DP1, m)->dof_count() == 3 * f);
  CHECK(make_space(SpaceKind::DUAL0, m)->dof_count() == v);
  CHECK(make_space(SpaceKind::BP1, m)->dof_count() == v);
}

TEST_CASE("spaces are interned per kind and mesh") {
  const MeshPtr m = make_sphere(1);
  const MeshPtr other = make_sphere(1);
  for (SpaceKind k : all_kinds) {
    CHECK(make_space(k, m).get() == make_space(k, m).get());
    CHECK(make_space(k, m)->same_as(*make_space(to_string(k), m)));
    CHECK_FALSE(make_space(k, m)->same_as(*make_space(k, other)));
  }
  CHECK(make_space(SpaceKind::P0, m).get() != make_space(SpaceKind::DP1, m).get());
}

TEST_CASE("assembly grids") {
  const MeshPtr m = make_cube(0.5);
  for (SpaceKind k : {SpaceKind::P0, SpaceKind::P1, SpaceKind::DP1})
    CHECK(make_space(k, m)->assembly_grid().get() == m.get());
  for (SpaceKind k : {SpaceKind::DUAL0, SpaceKind::BP1}) {
    const auto s = make_space(k, m);
    CHECK(s->assembly_grid().get() == &m->barycentric()->fine());
    CHECK(s->refinement().get() == m->barycentric().get());
  }
  CHECK(common_grid(*make_space(SpaceKind::P1, m), *make_space(SpaceKind::DUAL0, m)).get() ==
        &m->barycentric()->fine());
  CHECK_THROWS_AS(common_grid(*make_space(SpaceKind::P1, m), *make_space(SpaceKind::P1, make_cube(0.5))),
                  SpaceMismatchError);
}

TEST_CASE("orders and names") {
  const MeshPtr m = make_sphere(0);
  CHECK(make_space(SpaceKind::P0, m)->order() == 0);
  CHECK(make_space(SpaceKind::DUAL0, m)->order() == 0);
  CHECK(make_space(SpaceKind::P1, m, 1)->order() == 1);
  CHECK(make_space(SpaceKind::BP1, m)->is_continuous());
  CHECK_FALSE(make_space(SpaceKind::DP1, m)->is_continuous());
  CHECK_THROWS_AS(make_space(SpaceKind::P1, m, 2), UnsupportedSpaceError);
  CHECK_THROWS_AS(make_space(SpaceKind::P0, m, 1), UnsupportedSpaceError);
  CHECK(parse_space_kind("DUAL") == SpaceKind::DUAL0);
  CHECK(parse_space_kind("B-P1") == SpaceKind::BP1);
  for (SpaceKind k : all_kinds) CHECK(parse_space_kind(to_string(k)) == k);
  CHECK_THROWS(parse_space_kind("P2"));
}

TEST_CASE("local bases form a partition of unity") {
  const MeshPtr m = make_sphere(1);
  for (SpaceKind k : all_kinds) {
    const auto s = make_space(k, m);
    for (const ElementBasis& b : s->local_basis()) {
      for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int i = 0; i < b.count; ++i) sum += b.value[i][c];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
      }
      for (int i = 0; i < b.count; ++i) {
        CHECK(b.dof[i] >= 0);
        CHECK(b.dof[i] < s->dof_count());
      }
    }
  }
}

TEST_CASE("DUAL0 basis functions are dual cell indicators") {
  const MeshPtr m = make_sphere(1);
  const auto s = make_space(SpaceKind::DUAL0, m);
  const auto bary = m->barycentric();
  for (std::size_t e = 0; e < s->local_basis().size(); ++e) {
    const ElementBasis& b = s->local_basis()[e];
    REQUIRE(b.count == 1);
    CHECK(b.dof[0] == bary->parent_vertex(static_cast<int>(e)));
  }
}

TEST_CASE("linear functions are reproduced by the piecewise linear spaces") {
  const MeshPtr m = make_cube(0.5);
  for (SpaceKind k : {SpaceKind::P1, SpaceKind::DP1, SpaceKind::BP1}) {
    const auto s = make_space(k, m);
    const Vector c = interpolate(*s, linear);
    const SurfaceMesh& grid = *s->assembly_grid();
    for (std::size_t e = 0; e < grid.element_count(); e += 7) {
      const int ei = static_cast<int>(e);
      for (auto [u, v] : {std::pair{0.2, 0.3}, std::pair{0.6, 0.1}, std::pair{0.0, 1.0}}) {
        const Complex got = evaluate(*s, c, ei, u, v);
        CHECK(std::abs(got - linear(grid.map(ei, u, v))) < 1e-13);
      }
    }
  }
}

TEST_CASE("interpolation nodes of the constant spaces") {
  const MeshPtr m = make_sphere(1);
  const auto p0 = make_space(SpaceKind::P0, m);
  const Vector c0 = interpolate(*p0, linear);
  for (std::size_t e = 0; e < m->element_count(); ++e)
    CHECK(std::abs(c0[static_cast<Eigen::Index>(e)] - linear(m->centroid(static_cast<int>(e)))) < 1e-14);
  const auto d0 = make_space(SpaceKind::DUAL0, m);
  const Vector cd = interpolate(*d0, linear);
  for (std::size_t v = 0; v < m->vertex_count(); ++v)
    CHECK(std::abs(cd[static_cast<Eigen::Index>(v)] - linear(m->vertex(static_cast<int>(v)))) < 1e-14);
}

TEST_CASE("surface curls are tangential and sum to zero") {
  const MeshPtr m = make_sphere(1);
  for (std::size_t e = 0; e < m->element_count(); ++e) {
    const int ei = static_cast<int>(e);
    const auto c = corner_curls(*m, ei);
    CHECK((c[0] + c[1] + c[2]).norm() < 1e-12);
    for (const Vec3& v : c) CHECK(std::abs(v.dot(m->normal(ei))) < 1e-12);
    // The curl of lambda_1 is (nu x grad lambda_1); grad lambda_1 is normal
    // to the opposite edge and has length 1 / height.
    const Vec3 edge = m->corner(ei, 2) - m->corner(ei, 0);
    const double height = 2.0 * m->area(ei) / edge.norm();
    CHECK(c[1].norm() == doctest::Approx(1.0 / height).epsilon(1e-12));
  }
  CHECK_THROWS_AS(surface_curl_components(*make_space(SpaceKind::P0, m), 0), UnsupportedSpaceError);
  const auto p1 = make_space(SpaceKind::P1, m);
  CHECK(surface_curl_components(*p1, 0).size() == 3);
}

TEST_CASE("BP1 curls match P1 curls on each parent element") {
  const MeshPtr m = make_sphere(1);
  const auto p1 = make_space(SpaceKind::P1, m);
  const auto bp1 = make_space(SpaceKind::BP1, m);
  const Vector c = interpolate(*p1, linear);
  const auto bary = m->barycentric();
  const auto value_curl = [&](const FunctionSpace& s, int element) {
    const auto curls = surface_curl_components(s, element);
    const ElementBasis& b = s.local_basis()[element];
    Eigen::Vector3cd sum = Eigen::Vector3cd::Zero();
    for (int i = 0; i < b.count; ++i) sum += c[b.dof[i]] * curls[i].cast<Complex>();
    return sum;
  };
  for (std::size_t s = 0; s < bary->fine().element_count(); ++s) {
    const int si = static_cast<int>(s);
    CHECK((value_curl(*bp1, si) - value_curl(*p1, bary->parent_element(si))).norm() < 1e-12);
  }
}

TEST_CASE("evaluate validates its arguments") {
  const MeshPtr m = make_sphere(0);
  const auto p1 = make_space(SpaceKind::P1, m);
  CHECK_THROWS_AS(evaluate(*p1, Vector::Zero(3), 0, 0.1, 0.1), ArgumentError);
  CHECK_THROWS_AS(evaluate(*p1, Vector::Zero(p1->dof_count()), 99, 0.1, 0.1), ArgumentError);
}
