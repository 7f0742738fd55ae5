#include "bemalg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "bemalg/errors.hpp"

namespace bemalg {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

std::shared_ptr<const SurfaceMesh> SurfaceMesh::create(std::vector<Vec3> vertices,
                                                       std::vector<Triangle> triangles) {
  return std::make_shared<const SurfaceMesh>(std::move(vertices), std::move(triangles));
}

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = static_cast<int>(vertices_.size());
  if (triangles_.empty()) throw ManifoldError("mesh has no triangles");

  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    for (int k = 0; k < 3; ++k) {
      const int v = triangles_[e][k];
      if (v < 0 || v >= nv)
        throw ManifoldError("triangle " + std::to_string(e) + " references missing vertex " +
                            std::to_string(v));
    }
    const auto& t = triangles_[e];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw ManifoldError("triangle " + std::to_string(e) + " repeats a vertex");
  }

  // Geometry cache.
  const std::size_t ne = triangles_.size();
  areas_.resize(ne);
  normals_.resize(ne);
  diameters_.resize(ne);
  centroids_.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Vec3& p0 = vertices_[triangles_[e][0]];
    const Vec3& p1 = vertices_[triangles_[e][1]];
    const Vec3& p2 = vertices_[triangles_[e][2]];
    const Vec3 n = (p1 - p0).cross(p2 - p0);
    const double twice_area = n.norm();
    if (!(twice_area > 0.0))
      throw ManifoldError("triangle " + std::to_string(e) + " has zero area");
    areas_[e] = 0.5 * twice_area;
    normals_[e] = n / twice_area;
    diameters_[e] = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
    centroids_[e] = (p0 + p1 + p2) / 3.0;
  }

  // Each undirected edge must occur exactly once in each direction.
  std::unordered_map<std::uint64_t, std::array<int, 2>> directed;  // count (a<b), count (a>b)
  directed.reserve(3 * ne);
  for (std::size_t e = 0; e < ne; ++e) {
    for (int k = 0; k < 3; ++k) {
      const int a = triangles_[e][k];
      const int b = triangles_[e][(k + 1) % 3];
      auto [it, inserted] = directed.try_emplace(edge_key(a, b), std::array<int, 2>{0, 0});
      if (inserted) edges_.push_back({std::min(a, b), std::max(a, b)});
      ++it->second[a < b ? 0 : 1];
    }
  }
  for (const auto& edge : edges_) {
    const auto& count = directed.at(edge_key(edge[0], edge[1]));
    const int total = count[0] + count[1];
    if (total != 2)
      throw ManifoldError("edge (" + std::to_string(edge[0]) + ", " + std::to_string(edge[1]) +
                          ") is shared by " + std::to_string(total) +
                          " triangles; a closed manifold needs exactly 2");
    if (count[0] != 1)
      throw ManifoldError("inconsistent orientation across edge (" + std::to_string(edge[0]) +
                          ", " + std::to_string(edge[1]) + ")");
  }

  vertex_elements_.assign(vertices_.size(), {});
  for (std::size_t e = 0; e < ne; ++e)
    for (int v : triangles_[e]) vertex_elements_[v].push_back(static_cast<int>(e));
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    if (vertex_elements_[v].empty())
      throw ManifoldError("vertex " + std::to_string(v) + " is not used by any triangle");

  if (!(signed_volume() > 0.0))
    throw ManifoldError("enclosed volume is not positive; triangles must be oriented outwards");
}

SurfaceMesh::~SurfaceMesh() = default;

double SurfaceMesh::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

double SurfaceMesh::signed_volume() const {
  double sum = 0.0;
  for (const auto& t : triangles_)
    sum += vertices_[t[0]].dot(vertices_[t[1]].cross(vertices_[t[2]]));
  return sum / 6.0;
}

int SurfaceMesh::euler_characteristic() const {
  return static_cast<int>(vertices_.size()) - static_cast<int>(edges_.size()) +
         static_cast<int>(triangles_.size());
}

double SurfaceMesh::max_diameter() const {
  return *std::max_element(diameters_.begin(), diameters_.end());
}

Vec3 SurfaceMesh::map(int e, double s, double t) const {
  const Vec3& p0 = corner(e, 0);
  return p0 + s * (corner(e, 1) - p0) + t * (corner(e, 2) - p0);
}

BarycentricMeshPtr SurfaceMesh::barycentric() const {
  std::call_once(refinement_once_,
                 [this] { refinement_ = std::make_unique<BarycentricMesh>(*this); });
  // Aliasing constructor: the refinement lives as long as its parent.
  return BarycentricMeshPtr(shared_from_this(), refinement_.get());
}

BarycentricMesh::BarycentricMesh(const SurfaceMesh& parent) : parent_(&parent) {
  const int nv = static_cast<int>(parent.vertex_count());
  const int ned = static_cast<int>(parent.edge_count());
  const int ne = static_cast<int>(parent.element_count());

  std::vector<Vec3> vertices(parent.vertices());
  vertices.reserve(nv + ned + ne);
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(ned);
  for (int i = 0; i < ned; ++i) {
    const auto& ed = parent.edges()[i];
    midpoint[edge_key(ed[0], ed[1])] = nv + i;
    vertices.push_back(0.5 * (parent.vertex(ed[0]) + parent.vertex(ed[1])));
  }
  for (int e = 0; e < ne; ++e) vertices.push_back(parent.centroid(e));

  constexpr double h = 0.5, g = 1.0 / 3.0;
  std::vector<Triangle> triangles;
  triangles.reserve(6 * ne);
  parent_coords_.reserve(6 * ne);
  for (int e = 0; e < ne; ++e) {
    const Triangle& t = parent.triangle(e);
    const int c = nv + ned + e;
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3], prev = t[(k + 2) % 3];
      const int m_next = midpoint.at(edge_key(a, b));
      const int m_prev = midpoint.at(edge_key(prev, a));
      triangles.push_back({a, m_next, c});
      triangles.push_back({a, c, m_prev});

      std::array<double, 3> at_a{}, at_next{}, at_prev{};
      at_a[k] = 1.0;
      at_next[k] = h;
      at_next[(k + 1) % 3] = h;
      at_prev[k] = h;
      at_prev[(k + 2) % 3] = h;
      const std::array<double, 3> at_c{g, g, g};
      parent_coords_.push_back({at_a, at_next, at_c});
      parent_coords_.push_back({at_a, at_c, at_prev});
    }
  }
  fine_ = std::make_unique<SurfaceMesh>(std::move(vertices), std::move(triangles));

  // Dual cells: walk counterclockwise around each parent vertex. The successor
  // of sub-triangle (v, p, q) is the one whose second vertex is q.
  std::vector<std::vector<int>> around(nv);
  for (int s = 0; s < 6 * ne; ++s) around[fine_->triangle(s)[0]].push_back(s);
  dual_cells_.resize(nv);
  for (int v = 0; v < nv; ++v) {
    const auto& subs = around[v];
    std::unordered_map<int, int> by_second;
    for (int s : subs) by_second[fine_->triangle(s)[1]] = s;
    std::vector<int>& cell = dual_cells_[v];
    cell.reserve(subs.size());
    int s = *std::min_element(subs.begin(), subs.end());
    for (std::size_t i = 0; i < subs.size(); ++i) {
      cell.push_back(s);
      auto it = by_second.find(fine_->triangle(s)[2]);
      if (it == by_second.end()) throw ManifoldError("dual cell fan is not closed");
      s = it->second;
    }
    if (s != cell.front()) throw ManifoldError("dual cell fan is not a single cycle");
  }
}

MeshPtr BarycentricMesh::fine_ptr() const { return MeshPtr(parent_->shared_from_this(), fine_.get()); }

double BarycentricMesh::dual_cell_area(int vertex) const {
  double sum = 0.0;
  for (int s : dual_cells_[vertex]) sum += fine_->area(s);
  return sum;
}

BarycentricMeshPtr barycentric_refine(const MeshPtr& mesh) {
  if (!mesh) throw ArgumentError("barycentric_refine: null mesh");
  return mesh->barycentric();
}

MeshPtr make_sphere(int level) {
  if (level < 0) throw ArgumentError("sphere level must be non-negative");
  if (level > max_sphere_level)
    throw CapacityError("sphere level " + std::to_string(level) + " exceeds the cap of " +
                        std::to_string(max_sphere_level));

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                         {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                         {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Triangle> t = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::unordered_map<std::uint64_t, int> mid;
    auto midpoint = [&](int a, int b) {
      auto [it, inserted] = mid.try_emplace(edge_key(a, b), static_cast<int>(v.size()));
      if (inserted) v.push_back((0.5 * (v[a] + v[b])).normalized());
      return it->second;
    };
    std::vector<Triangle> next;
    next.reserve(4 * t.size());
    for (const auto& tri : t) {
      const int a = midpoint(tri[0], tri[1]);
      const int b = midpoint(tri[1], tri[2]);
      const int c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    t = std::move(next);
  }
  return SurfaceMesh::create(std::move(v), std::move(t));
}

MeshPtr make_cube(double h) {
  if (!(h > 0.0) || h > 1.0) throw ArgumentError("cube element size must satisfy 0 < h <= 1");
  const int n = static_cast<int>(std::ceil(1.0 / h - 1e-12));

  std::map<std::array<int, 3>, int> index;
  std::vector<Vec3> vertices;
  auto vertex = [&](const std::array<int, 3>& ijk) {
    auto [it, inserted] = index.try_emplace(ijk, static_cast<int>(vertices.size()));
    if (inserted) vertices.emplace_back(double(ijk[0]) / n, double(ijk[1]) / n, double(ijk[2]) / n);
    return it->second;
  };

  // Each face: fixed axis and value, plus in-plane axes (u, v) with u x v
  // pointing outwards.
  struct Face {
    int axis, value, u, v;
  };
  const Face faces[] = {{0, 0, 2, 1}, {0, 1, 1, 2}, {1, 0, 0, 2},
                        {1, 1, 2, 0}, {2, 0, 1, 0}, {2, 1, 0, 1}};
  std::vector<Triangle> triangles;
  triangles.reserve(12 * n * n);
  for (const Face& f : faces) {
    auto at = [&](int i, int j) {
      std::array<int, 3> ijk{};
      ijk[f.axis] = f.value * n;
      ijk[f.u] = i;
      ijk[f.v] = j;
      return vertex(ijk);
    };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int p00 = at(i, j), p10 = at(i + 1, j), p01 = at(i, j + 1), p11 = at(i + 1, j + 1);
        triangles.push_back({p00, p10, p11});
        triangles.push_back({p00, p11, p01});
      }
  }
  return SurfaceMesh::create(std::move(vertices), std::move(triangles));
}

}  // namespace bemalg
