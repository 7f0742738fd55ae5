#pragma once

#include <array>
#include <vector>

#include "bemalg/mesh.hpp"

namespace bemalg {

/// Gauss-Legendre nodes and weights on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};
LineRule gauss_legendre(int n);

/// Rule on the reference triangle {s, t >= 0, s + t <= 1}; weights sum to 1/2.
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

inline constexpr int max_triangle_degree = 30;

/// Rule exact for polynomials of total degree `degree` (1..max_triangle_degree).
TriangleRule gauss_triangle(int degree);

enum class PairClass { disjoint = 0, shared_vertex = 1, shared_edge = 2, identical = 3 };

const char* to_string(PairClass c);

/// Classification by number of shared vertex indices.
PairClass classify_pair(const SurfaceMesh& mesh, int a, int b);

/// Reorders corners of two elements so shared vertices come first, in the
/// same order for both. perm[i] is the original corner placed at position i.
struct PairAlignment {
  PairClass cls = PairClass::disjoint;
  std::array<int, 3> perm_a{0, 1, 2};
  std::array<int, 3> perm_b{0, 1, 2};
};
PairAlignment align_pair(const SurfaceMesh& mesh, int a, int b);

/// Quadrature over the product of two reference triangles. Points refer to
/// aligned corners (see PairAlignment); weights sum to 1/4.
struct PairRule {
  PairClass cls = PairClass::disjoint;
  std::vector<std::array<double, 2>> x;
  std::vector<std::array<double, 2>> y;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

/// Sauter-Schwab rule with `order` Gauss points in each of the four
/// regularised coordinates. Disjoint pairs raise ArgumentError.
PairRule singular_pair_rule(PairClass cls, int order);

/// Tensor product of two triangle rules.
PairRule regular_pair_rule(const TriangleRule& a, const TriangleRule& b);

struct QuadratureOptions {
  /// Gauss points per regularised coordinate for adjacent pairs.
  int singular_order = 4;
  /// Triangle rule degree for well separated pairs.
  int regular_degree = 4;
  /// Pairs whose centroid distance exceeds far_ratio times the larger
  /// diameter use far_degree instead. Disabled when far_ratio <= 0.
  int far_degree = 2;
  double far_ratio = 2.0;
};

}  // namespace bemalg
