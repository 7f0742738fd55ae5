#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "bemalg/mesh.hpp"
#include "bemalg/types.hpp"

namespace bemalg {

enum class SpaceKind { P0, P1, DP1, DUAL0, BP1 };

std::string to_string(SpaceKind kind);
/// Accepts "P0", "P1", "DP1", "DUAL0" (or "DUAL"), "BP1" (or "B-P1").
SpaceKind parse_space_kind(const std::string& name);

/// Basis functions restricted to one element of an assembly grid. Function f
/// equals sum_c value[f][c] * lambda_c, lambda_c the barycentric coordinate of
/// corner c.
struct ElementBasis {
  int count = 0;
  std::array<int, 3> dof{};
  std::array<std::array<double, 3>, 3> value{};
};

/// Per-element local bases of a space on a particular assembly grid.
using LocalBasis = std::vector<ElementBasis>;

namespace detail {
struct PairingData;
}

class FunctionSpace;
using FunctionSpacePtr = std::shared_ptr<const FunctionSpace>;

/// Piecewise polynomial space of order 0 or 1 on a surface mesh.
///
/// P0, P1 and DP1 live on the mesh itself. DUAL0 (indicators of dual cells)
/// and BP1 (continuous linears on the parent, represented on the barycentric
/// refinement) live on the barycentric refinement of the mesh.
///
/// Spaces are interned: make_space returns the same object for the same kind
/// and mesh while it is alive, so object identity is structural identity.
class FunctionSpace {
 public:
  FunctionSpace(SpaceKind kind, MeshPtr mesh);
  FunctionSpace(const FunctionSpace&) = delete;
  FunctionSpace& operator=(const FunctionSpace&) = delete;
  ~FunctionSpace();

  SpaceKind kind() const { return kind_; }
  int order() const;
  bool is_continuous() const { return kind_ == SpaceKind::P1 || kind_ == SpaceKind::BP1; }
  std::string name() const;

  /// Mesh the space was defined on.
  const MeshPtr& mesh() const { return mesh_; }
  /// Mesh on which integrals over the space are evaluated.
  const MeshPtr& assembly_grid() const { return grid_; }
  /// Non-null for DUAL0 and BP1.
  const BarycentricMeshPtr& refinement() const { return refinement_; }

  int dof_count() const { return dof_count_; }

  /// Local basis on the own assembly grid, indexed by grid element.
  const LocalBasis& local_basis() const { return basis_; }
  /// Local basis on `grid`, which must be the own assembly grid or its
  /// barycentric refinement.
  LocalBasis local_basis_on(const MeshPtr& grid) const;

  /// Structural equality: same kind on the same mesh object.
  bool same_as(const FunctionSpace& other) const {
    return kind_ == other.kind_ && mesh_.get() == other.mesh_.get();
  }

  /// Cached pairing data for this space as range and `dual` as test space.
  std::shared_ptr<detail::PairingData> pairing_slot(const FunctionSpacePtr& dual) const;

 private:
  SpaceKind kind_;
  MeshPtr mesh_;
  MeshPtr grid_;
  BarycentricMeshPtr refinement_;
  int dof_count_ = 0;
  LocalBasis basis_;

  mutable std::mutex cache_mutex_;
  mutable std::map<const FunctionSpace*,
                   std::pair<std::weak_ptr<const FunctionSpace>, std::shared_ptr<detail::PairingData>>>
      pairings_;
};

/// Orders other than 0 and 1 throw UnsupportedSpaceError.
FunctionSpacePtr make_space(SpaceKind kind, const MeshPtr& mesh, int order = -1);
FunctionSpacePtr make_space(const std::string& kind, const MeshPtr& mesh, int order = -1);

/// Finer of the two assembly grids; throws SpaceMismatchError when the grids
/// are not equal or related by barycentric refinement.
MeshPtr common_grid(const FunctionSpace& a, const FunctionSpace& b);

/// Value of the expansion at reference point (s, t) of element `element` of
/// the space's assembly grid.
Complex evaluate(const FunctionSpace& space, const Vector& coefficients, int element, double s,
                 double t);

/// Surface curl nu x grad of the three corner hat functions of grid element e.
std::array<Vec3, 3> corner_curls(const SurfaceMesh& grid, int e);

/// Surface curl of each local basis function on assembly-grid element
/// `element`, in local order. Only P1, DP1 and BP1.
std::vector<Vec3> surface_curl_components(const FunctionSpace& space, int element);

/// Nodal interpolation: vertex values for P1/BP1, corner values for DP1,
/// centroid values for P0 and parent vertex values for DUAL0.
Vector interpolate(const FunctionSpace& space, const std::function<Complex(const Vec3&)>& f);

}  // namespace bemalg
