#include "bemalg/quadrature.hpp"

#include <cmath>
#include <utility>
#include <string>

#include "bemalg/errors.hpp"

namespace bemalg {

LineRule gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("Gauss-Legendre rule needs at least one point");
  // Returns P_n(x) and P_n'(x).
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::make_pair(p1, n * (x * p1 - p0) / (x * x - 1.0));
  };
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map from [-1, 1] to [0, 1]; nodes ascending.
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

namespace {

void add_orbit3(TriangleRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({a, a});
  r.points.push_back({b, a});
  r.points.push_back({a, b});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

TriangleRule collapsed_gauss(int degree) {
  const int n = (degree + 3) / 2;  // ceil((degree + 2) / 2)
  const LineRule g = gauss_legendre(n);
  TriangleRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = g.points[i], v = g.points[j];
      r.points.push_back({u, v * (1.0 - u)});
      r.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  return r;
}

}  // namespace

TriangleRule gauss_triangle(int degree) {
  if (degree < 1 || degree > max_triangle_degree)
    throw ArgumentError("triangle rule degree " + std::to_string(degree) + " outside [1, " +
                        std::to_string(max_triangle_degree) + "]");
  TriangleRule r;
  r.degree = degree;
  if (degree == 1) {
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.5);
  } else if (degree == 2) {
    add_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
  } else if (degree <= 4) {
    add_orbit3(r, 0.44594849091596488632, 0.5 * 0.22338158967801146570);
    add_orbit3(r, 0.09157621350977074346, 0.5 * 0.10995174365532186764);
  } else if (degree == 5) {
    const double s15 = std::sqrt(15.0);
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.5 * 0.225);
    add_orbit3(r, (6.0 - s15) / 21.0, 0.5 * (155.0 - s15) / 1200.0);
    add_orbit3(r, (6.0 + s15) / 21.0, 0.5 * (155.0 + s15) / 1200.0);
  } else {
    r = collapsed_gauss(degree);
  }
  return r;
}

const char* to_string(PairClass c) {
  switch (c) {
    case PairClass::disjoint: return "disjoint";
    case PairClass::shared_vertex: return "shared_vertex";
    case PairClass::shared_edge: return "shared_edge";
    case PairClass::identical: return "identical";
  }
  return "?";
}

PairAlignment align_pair(const SurfaceMesh& mesh, int a, int b) {
  const Triangle& ta = mesh.triangle(a);
  const Triangle& tb = mesh.triangle(b);
  PairAlignment out;
  if (a == b) {
    out.cls = PairClass::identical;
    return out;
  }
  std::array<int, 3> ia{}, ib{};
  int shared = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (ta[i] == tb[j]) {
        ia[shared] = i;
        ib[shared] = j;
        ++shared;
      }
  out.cls = static_cast<PairClass>(shared);
  if (shared == 3) {
    // Distinct elements on the same vertices; only possible for degenerate
    // meshes, which validation rejects.
    throw ManifoldError("elements " + std::to_string(a) + " and " + std::to_string(b) +
                        " share all vertices");
  }
  if (shared == 2) {
    out.perm_a = {ia[0], ia[1], 3 - ia[0] - ia[1]};
    out.perm_b = {ib[0], ib[1], 3 - ib[0] - ib[1]};
  } else if (shared == 1) {
    out.perm_a = {ia[0], (ia[0] + 1) % 3, (ia[0] + 2) % 3};
    out.perm_b = {ib[0], (ib[0] + 1) % 3, (ib[0] + 2) % 3};
  }
  return out;
}

PairClass classify_pair(const SurfaceMesh& mesh, int a, int b) {
  const int n = static_cast<int>(mesh.element_count());
  if (a < 0 || a >= n || b < 0 || b >= n) throw ArgumentError("element index out of range");
  return align_pair(mesh, a, b).cls;
}

PairRule singular_pair_rule(PairClass cls, int order) {
  if (cls == PairClass::disjoint)
    throw ArgumentError("singular pair rule requested for a disjoint pair");
  if (order < 1) throw ArgumentError("singular quadrature order must be positive");
  const LineRule g = gauss_legendre(order);
  PairRule rule;
  rule.cls = cls;

  // Regions map (xi, e1, e2, e3) to points of {0 <= p2 <= p1 <= 1}, which is
  // sent to the reference triangle by (s, t) = (p1 - p2, p2).
  auto push = [&rule](double x1, double x2, double y1, double y2, double w) {
    rule.x.push_back({x1 - x2, x2});
    rule.y.push_back({y1 - y2, y2});
    rule.weights.push_back(w);
  };
  const int n = order;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double xi = g.points[a], e1 = g.points[b], e2 = g.points[c], e3 = g.points[d];
          const double w = g.weights[a] * g.weights[b] * g.weights[c] * g.weights[d];
          switch (cls) {
            case PairClass::identical: {
              const double j = w * xi * xi * xi * e1 * e1 * e2;
              push(xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), j);
              push(xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), j);
              push(xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2), j);
              push(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3), j);
              push(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2), j);
              push(xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), j);
              break;
            }
            case PairClass::shared_edge: {
              const double j1 = w * xi * xi * xi * e1 * e1;
              const double j = j1 * e2;
              push(xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2), j1);
              push(xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), j);
              push(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3, j);
              push(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1, j);
              push(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2, j);
              break;
            }
            case PairClass::shared_vertex: {
              const double j = w * xi * xi * xi * e2;
              push(xi, xi * e1, xi * e2, xi * e2 * e3, j);
              push(xi * e2, xi * e2 * e3, xi, xi * e1, j);
              break;
            }
            case PairClass::disjoint: break;
          }
        }
  return rule;
}

PairRule regular_pair_rule(const TriangleRule& a, const TriangleRule& b) {
  PairRule rule;
  rule.cls = PairClass::disjoint;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      rule.x.push_back(a.points[i]);
      rule.y.push_back(b.points[j]);
      rule.weights.push_back(a.weights[i] * b.weights[j]);
    }
  return rule;
}

}  // namespace bemalg
