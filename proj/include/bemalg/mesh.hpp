#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <mutex>
#include <vector>

#include "bemalg/types.hpp"

namespace bemalg {

using Triangle = std::array<int, 3>;

class BarycentricMesh;
using BarycentricMeshPtr = std::shared_ptr<const BarycentricMesh>;

/// Closed surface made of flat triangles, counterclockwise when seen from
/// outside. Construction validates the mesh; afterwards it is immutable.
///
/// Meshes are always held through shared_ptr (see create()), because the
/// lazily built barycentric refinement keeps its parent alive.
class SurfaceMesh : public std::enable_shared_from_this<SurfaceMesh> {
 public:
  /// Throws ManifoldError if an edge is not shared by exactly two
  /// consistently oriented triangles, if an element is degenerate or if the
  /// enclosed volume is not positive (normals pointing inwards).
  static std::shared_ptr<const SurfaceMesh> create(std::vector<Vec3> vertices,
                                                   std::vector<Triangle> triangles);

  SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);
  SurfaceMesh(const SurfaceMesh&) = delete;
  SurfaceMesh& operator=(const SurfaceMesh&) = delete;
  ~SurfaceMesh();

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t element_count() const { return triangles_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Vec3& vertex(int i) const { return vertices_[i]; }
  const Triangle& triangle(int e) const { return triangles_[e]; }
  const Vec3& corner(int e, int k) const { return vertices_[triangles_[e][k]]; }

  double area(int e) const { return areas_[e]; }
  const Vec3& normal(int e) const { return normals_[e]; }
  double diameter(int e) const { return diameters_[e]; }
  const Vec3& centroid(int e) const { return centroids_[e]; }

  /// Unique edges as sorted vertex pairs, in order of first appearance.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  /// Elements incident to each vertex, ascending.
  const std::vector<std::vector<int>>& vertex_elements() const { return vertex_elements_; }

  double total_area() const;
  /// Divergence-theorem volume; positive for outward orientation.
  double signed_volume() const;
  int euler_characteristic() const;
  double max_diameter() const;

  /// Maps reference coordinates (s, t) of element e to the surface.
  Vec3 map(int e, double s, double t) const;

  /// Barycentric refinement, built once and shared by all callers.
  BarycentricMeshPtr barycentric() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<double> areas_;
  std::vector<Vec3> normals_;
  std::vector<double> diameters_;
  std::vector<Vec3> centroids_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::vector<int>> vertex_elements_;

  mutable std::once_flag refinement_once_;
  mutable std::unique_ptr<BarycentricMesh> refinement_;
};

using MeshPtr = std::shared_ptr<const SurfaceMesh>;

/// Each parent triangle split into six through its centroid and edge
/// midpoints. Vertices of the fine mesh are numbered: parent vertices first
/// (same indices), then edge midpoints in parent edge order, then centroids.
/// Sub-triangle 6p+2c and 6p+2c+1 have parent corner c of parent p as their
/// first vertex.
class BarycentricMesh {
 public:
  explicit BarycentricMesh(const SurfaceMesh& parent);

  const SurfaceMesh& parent() const { return *parent_; }
  MeshPtr parent_ptr() const { return parent_->shared_from_this(); }
  const SurfaceMesh& fine() const { return *fine_; }
  /// Shares ownership with the parent mesh.
  MeshPtr fine_ptr() const;

  int parent_element(int sub) const { return sub / 6; }
  /// Parent vertex whose dual cell contains the sub-triangle.
  int parent_vertex(int sub) const { return fine_->triangle(sub)[0]; }
  /// Sub-triangles around a parent vertex, counterclockwise seen from outside.
  const std::vector<int>& dual_cell(int vertex) const { return dual_cells_[vertex]; }
  std::size_t dual_cell_count() const { return dual_cells_.size(); }
  double dual_cell_area(int vertex) const;

  /// Row c holds the parent barycentric coordinates of corner c of `sub`.
  const std::array<std::array<double, 3>, 3>& parent_coordinates(int sub) const {
    return parent_coords_[sub];
  }

 private:
  const SurfaceMesh* parent_;
  std::unique_ptr<SurfaceMesh> fine_;
  std::vector<std::vector<int>> dual_cells_;
  std::vector<std::array<std::array<double, 3>, 3>> parent_coords_;
};

/// Largest supported sphere refinement level (20 * 4^7 = 327680 triangles).
inline constexpr int max_sphere_level = 7;

/// Icosahedron subdivided `level` times with vertices projected onto the unit
/// sphere.
MeshPtr make_sphere(int level);

/// Structured surface grid of the unit cube [0,1]^3 with ceil(1/h) squares per
/// cube edge, each split into two triangles.
MeshPtr make_cube(double h);

BarycentricMeshPtr barycentric_refine(const MeshPtr& mesh);

/// Gmsh MSH 2.2 ASCII, 3-node triangles only.
MeshPtr load_msh(const std::filesystem::path& path);
void save_msh(const SurfaceMesh& mesh, const std::filesystem::path& path);

}  // namespace bemalg
