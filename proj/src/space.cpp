#include "bemalg/space.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "bemalg/errors.hpp"

namespace bemalg {

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P0: return "P0";
    case SpaceKind::P1: return "P1";
    case SpaceKind::DP1: return "DP1";
    case SpaceKind::DUAL0: return "DUAL0";
    case SpaceKind::BP1: return "BP1";
  }
  return "?";
}

SpaceKind parse_space_kind(const std::string& name) {
  std::string up;
  for (char c : name) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "P0" || up == "DP0") return SpaceKind::P0;
  if (up == "P1") return SpaceKind::P1;
  if (up == "DP1") return SpaceKind::DP1;
  if (up == "DUAL0" || up == "DUAL") return SpaceKind::DUAL0;
  if (up == "BP1" || up == "B-P1") return SpaceKind::BP1;
  throw ArgumentError("unknown space kind '" + name + "'");
}

FunctionSpace::FunctionSpace(SpaceKind kind, MeshPtr mesh) : kind_(kind), mesh_(std::move(mesh)) {
  if (!mesh_) throw ArgumentError("function space needs a mesh");
  const SurfaceMesh& m = *mesh_;
  switch (kind_) {
    case SpaceKind::P0: {
      grid_ = mesh_;
      dof_count_ = static_cast<int>(m.element_count());
      basis_.resize(m.element_count());
      for (int e = 0; e < dof_count_; ++e) {
        basis_[e].count = 1;
        basis_[e].dof[0] = e;
        basis_[e].value[0] = {1.0, 1.0, 1.0};
      }
      break;
    }
    case SpaceKind::P1:
    case SpaceKind::DP1: {
      grid_ = mesh_;
      const bool continuous = kind_ == SpaceKind::P1;
      dof_count_ = static_cast<int>(continuous ? m.vertex_count() : 3 * m.element_count());
      basis_.resize(m.element_count());
      for (std::size_t e = 0; e < m.element_count(); ++e) {
        ElementBasis& b = basis_[e];
        b.count = 3;
        for (int c = 0; c < 3; ++c) {
          b.dof[c] = continuous ? m.triangle(static_cast<int>(e))[c] : static_cast<int>(3 * e + c);
          b.value[c] = {0.0, 0.0, 0.0};
          b.value[c][c] = 1.0;
        }
      }
      break;
    }
    case SpaceKind::DUAL0:
    case SpaceKind::BP1: {
      refinement_ = m.barycentric();
      grid_ = refinement_->fine_ptr();
      dof_count_ = static_cast<int>(m.vertex_count());
      const std::size_t nsub = grid_->element_count();
      basis_.resize(nsub);
      for (std::size_t s = 0; s < nsub; ++s) {
        ElementBasis& b = basis_[s];
        const int sub = static_cast<int>(s);
        if (kind_ == SpaceKind::DUAL0) {
          b.count = 1;
          b.dof[0] = refinement_->parent_vertex(sub);
          b.value[0] = {1.0, 1.0, 1.0};
        } else {
          const auto& pc = refinement_->parent_coordinates(sub);
          const Triangle& parent = m.triangle(refinement_->parent_element(sub));
          b.count = 3;
          for (int k = 0; k < 3; ++k) {
            b.dof[k] = parent[k];
            for (int c = 0; c < 3; ++c) b.value[k][c] = pc[c][k];
          }
        }
      }
      break;
    }
  }
}

FunctionSpace::~FunctionSpace() = default;

int FunctionSpace::order() const {
  return (kind_ == SpaceKind::P0 || kind_ == SpaceKind::DUAL0) ? 0 : 1;
}

std::string FunctionSpace::name() const {
  return to_string(kind_) + "(" + std::to_string(dof_count_) + " dofs)";
}

LocalBasis FunctionSpace::local_basis_on(const MeshPtr& grid) const {
  if (grid.get() == grid_.get()) return basis_;
  const BarycentricMeshPtr fine = grid_->barycentric();
  if (grid.get() != &fine->fine())
    throw SpaceMismatchError(name() + " cannot be represented on an unrelated grid");
  LocalBasis lifted(grid->element_count());
  for (std::size_t s = 0; s < lifted.size(); ++s) {
    const int sub = static_cast<int>(s);
    const ElementBasis& coarse = basis_[fine->parent_element(sub)];
    const auto& pc = fine->parent_coordinates(sub);
    ElementBasis& b = lifted[s];
    b.count = coarse.count;
    b.dof = coarse.dof;
    for (int f = 0; f < coarse.count; ++f)
      for (int c = 0; c < 3; ++c) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k) v += coarse.value[f][k] * pc[c][k];
        b.value[f][c] = v;
      }
  }
  return lifted;
}

FunctionSpacePtr make_space(SpaceKind kind, const MeshPtr& mesh, int order) {
  if (!mesh) throw ArgumentError("make_space: null mesh");
  if (order >= 0) {
    if (order >= 2)
      throw UnsupportedSpaceError("polynomial order " + std::to_string(order) +
                                  " is not implemented; only orders 0 and 1 are");
    const int natural = (kind == SpaceKind::P0 || kind == SpaceKind::DUAL0) ? 0 : 1;
    if (order != natural)
      throw UnsupportedSpaceError(to_string(kind) + " has order " + std::to_string(natural));
  }
  static std::mutex registry_mutex;
  static std::map<std::pair<int, const SurfaceMesh*>, std::weak_ptr<const FunctionSpace>> registry;
  const auto key = std::make_pair(static_cast<int>(kind), mesh.get());
  std::lock_guard lock(registry_mutex);
  if (auto it = registry.find(key); it != registry.end())
    if (auto existing = it->second.lock()) return existing;
  auto space = std::make_shared<const FunctionSpace>(kind, mesh);
  registry[key] = space;
  // Drop expired entries so the registry does not grow without bound.
  for (auto it = registry.begin(); it != registry.end();)
    it = it->second.expired() ? registry.erase(it) : std::next(it);
  return space;
}

FunctionSpacePtr make_space(const std::string& kind, const MeshPtr& mesh, int order) {
  return make_space(parse_space_kind(kind), mesh, order);
}

MeshPtr common_grid(const FunctionSpace& a, const FunctionSpace& b) {
  const MeshPtr& ga = a.assembly_grid();
  const MeshPtr& gb = b.assembly_grid();
  if (ga.get() == gb.get()) return ga;
  if (&ga->barycentric()->fine() == gb.get()) return gb;
  if (&gb->barycentric()->fine() == ga.get()) return ga;
  throw SpaceMismatchError("spaces " + a.name() + " and " + b.name() +
                           " live on unrelated grids without a common refinement");
}

Complex evaluate(const FunctionSpace& space, const Vector& coefficients, int element, double s,
                 double t) {
  if (coefficients.size() != space.dof_count())
    throw ArgumentError("coefficient vector has length " + std::to_string(coefficients.size()) +
                        ", space has " + std::to_string(space.dof_count()) + " dofs");
  if (element < 0 || element >= static_cast<int>(space.local_basis().size()))
    throw ArgumentError("element index " + std::to_string(element) + " out of range");
  const std::array<double, 3> lambda{1.0 - s - t, s, t};
  const ElementBasis& b = space.local_basis()[element];
  Complex sum = 0.0;
  for (int f = 0; f < b.count; ++f) {
    double phi = 0.0;
    for (int c = 0; c < 3; ++c) phi += b.value[f][c] * lambda[c];
    sum += coefficients[b.dof[f]] * phi;
  }
  return sum;
}

std::array<Vec3, 3> corner_curls(const SurfaceMesh& grid, int e) {
  const double scale = 1.0 / (2.0 * grid.area(e));
  std::array<Vec3, 3> curls;
  for (int k = 0; k < 3; ++k)
    curls[k] = (grid.corner(e, (k + 1) % 3) - grid.corner(e, (k + 2) % 3)) * scale;
  return curls;
}

std::vector<Vec3> surface_curl_components(const FunctionSpace& space, int element) {
  if (space.order() != 1)
    throw UnsupportedSpaceError("surface curl needs a piecewise linear space, got " + space.name());
  if (element < 0 || element >= static_cast<int>(space.local_basis().size()))
    throw ArgumentError("element index " + std::to_string(element) + " out of range");
  const auto curls = corner_curls(*space.assembly_grid(), element);
  const ElementBasis& b = space.local_basis()[element];
  std::vector<Vec3> out(b.count, Vec3::Zero());
  for (int f = 0; f < b.count; ++f)
    for (int c = 0; c < 3; ++c) out[f] += b.value[f][c] * curls[c];
  return out;
}

Vector interpolate(const FunctionSpace& space, const std::function<Complex(const Vec3&)>& f) {
  const SurfaceMesh& m = *space.mesh();
  Vector out(space.dof_count());
  switch (space.kind()) {
    case SpaceKind::P0:
      for (int e = 0; e < space.dof_count(); ++e) out[e] = f(m.centroid(e));
      break;
    case SpaceKind::DP1:
      for (int e = 0; e < static_cast<int>(m.element_count()); ++e)
        for (int c = 0; c < 3; ++c) out[3 * e + c] = f(m.corner(e, c));
      break;
    case SpaceKind::P1:
    case SpaceKind::BP1:
    case SpaceKind::DUAL0:
      for (int v = 0; v < space.dof_count(); ++v) out[v] = f(m.vertex(v));
      break;
  }
  return out;
}

}  // namespace bemalg
