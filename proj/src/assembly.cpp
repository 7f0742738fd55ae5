#include "bemalg/assembly.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "bemalg/errors.hpp"

namespace bemalg {

namespace {

std::atomic<long> g_assembly_count{0};

constexpr double inv4pi = 1.0 / (4.0 * pi);

enum class Kind { single_layer, double_layer, adjoint_double_layer, hypersingular };

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::single_layer: return "single_layer";
    case Kind::double_layer: return "double_layer";
    case Kind::adjoint_double_layer: return "adjoint_double_layer";
    case Kind::hypersingular: return "hypersingular";
  }
  return "?";
}

// Scalar kernel evaluated from d = x - y, with x on the test element and y on
// the trial element. The hypersingular form only needs the plain Green's
// function; its surface-curl and normal factors are applied afterwards.
template <typename Scalar, Kind K>
struct PairKernel {
  double k = 0.0;
  Vec3 nx, ny;

  Scalar operator()(double dx, double dy, double dz) const {
    const double r2 = dx * dx + dy * dy + dz * dz;
    const double r = std::sqrt(r2);
    if constexpr (std::is_same_v<Scalar, double>) {
      if constexpr (K == Kind::single_layer || K == Kind::hypersingular) {
        return inv4pi / r;
      } else {
        const double f = inv4pi / (r2 * r);
        if constexpr (K == Kind::double_layer)
          return f * (dx * ny[0] + dy * ny[1] + dz * ny[2]);
        else
          return -f * (dx * nx[0] + dy * nx[1] + dz * nx[2]);
      }
    } else {
      const double kr = k * r;
      const Complex e(std::cos(kr), std::sin(kr));
      if constexpr (K == Kind::single_layer || K == Kind::hypersingular) {
        return e * (inv4pi / r);
      } else {
        const Complex f = e * Complex(1.0, -kr) * (inv4pi / (r2 * r));
        if constexpr (K == Kind::double_layer)
          return f * (dx * ny[0] + dy * ny[1] + dz * ny[2]);
        else
          return -f * (dx * nx[0] + dy * nx[1] + dz * nx[2]);
      }
    }
  }
};

// Physical points of a triangle rule on every element.
struct RegularPoints {
  int n = 0;
  std::vector<double> x, y, z, w;           // per element and point; w includes 2|T|
  std::vector<std::array<double, 3>> lam;  // per rule point

  RegularPoints(const SurfaceMesh& grid, const TriangleRule& rule) : n(static_cast<int>(rule.size())) {
    const std::size_t ne = grid.element_count();
    x.resize(ne * n);
    y.resize(ne * n);
    z.resize(ne * n);
    w.resize(ne * n);
    for (const auto& p : rule.points) lam.push_back({1.0 - p[0] - p[1], p[0], p[1]});
    for (std::size_t e = 0; e < ne; ++e) {
      const int ei = static_cast<int>(e);
      const double jac = 2.0 * grid.area(ei);
      for (int q = 0; q < n; ++q) {
        const Vec3 p = grid.map(ei, rule.points[q][0], rule.points[q][1]);
        x[e * n + q] = p[0];
        y[e * n + q] = p[1];
        z[e * n + q] = p[2];
        w[e * n + q] = rule.weights[q] * jac;
      }
    }
  }
};

template <typename Scalar>
using Moments = std::array<std::array<Scalar, 3>, 3>;

template <typename Scalar, typename KernelFn>
void regular_moments(const RegularPoints& R, int a, int b, const KernelFn& kern, Moments<Scalar>& I) {
  const int n = R.n;
  const double* bx = &R.x[b * n];
  const double* by = &R.y[b * n];
  const double* bz = &R.z[b * n];
  const double* bw = &R.w[b * n];
  for (auto& row : I) row.fill(Scalar(0));
  for (int i = 0; i < n; ++i) {
    const double xx = R.x[a * n + i], xy = R.y[a * n + i], xz = R.z[a * n + i];
    Scalar t0(0), t1(0), t2(0);
    for (int j = 0; j < n; ++j) {
      const Scalar kv = kern(xx - bx[j], xy - by[j], xz - bz[j]) * bw[j];
      t0 += kv * R.lam[j][0];
      t1 += kv * R.lam[j][1];
      t2 += kv * R.lam[j][2];
    }
    const double wi = R.w[a * n + i];
    for (int c = 0; c < 3; ++c) {
      const double f = wi * R.lam[i][c];
      I[c][0] += f * t0;
      I[c][1] += f * t1;
      I[c][2] += f * t2;
    }
  }
}

// Singular rules in aligned coordinates, one per adjacency class, with the
// weighted basis products w * lambda_i(x) * lambda_j(y) precomputed.
struct SingularRules {
  std::array<PairRule, 4> rules;
  std::array<std::vector<std::array<double, 3>>, 4> lx, ly;
  std::array<std::vector<std::array<double, 9>>, 4> wprod;

  explicit SingularRules(int order) {
    for (int c = 1; c <= 3; ++c) {
      rules[c] = singular_pair_rule(static_cast<PairClass>(c), order);
      for (std::size_t q = 0; q < rules[c].size(); ++q) {
        const auto& px = rules[c].x[q];
        const auto& py = rules[c].y[q];
        const std::array<double, 3> ux{1.0 - px[0] - px[1], px[0], px[1]};
        const std::array<double, 3> uy{1.0 - py[0] - py[1], py[0], py[1]};
        lx[c].push_back(ux);
        ly[c].push_back(uy);
        std::array<double, 9> w{};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) w[3 * i + j] = rules[c].weights[q] * ux[i] * uy[j];
        wprod[c].push_back(w);
      }
    }
  }
};

// Moments over an adjacent pair (test a, trial b). The rule is always applied
// with the lower element index as its first triangle, which makes the result
// independent of which element plays the test role.
template <typename Scalar, typename KernelFn>
void singular_moments(const SurfaceMesh& grid, const SingularRules& S, int a, int b,
                      const KernelFn& kern, Moments<Scalar>& I) {
  const int lo = std::min(a, b), hi = std::max(a, b);
  const PairAlignment al = align_pair(grid, lo, hi);
  const int c = static_cast<int>(al.cls);
  const std::size_t nq = S.rules[c].size();
  const auto& llo = S.lx[c];
  const auto& lhi = S.ly[c];
  const auto& wp = S.wprod[c];
  std::array<Vec3, 3> plo, phi;
  for (int i = 0; i < 3; ++i) {
    plo[i] = grid.corner(lo, al.perm_a[i]);
    phi[i] = grid.corner(hi, al.perm_b[i]);
  }
  // d = x - y with x on the test element.
  const double sign = (a == lo) ? 1.0 : -1.0;
  std::array<Scalar, 9> A{};
  for (std::size_t q = 0; q < nq; ++q) {
    const auto& ul = llo[q];
    const auto& uh = lhi[q];
    double d[3];
    for (int k = 0; k < 3; ++k)
      d[k] = sign * (ul[0] * plo[0][k] + ul[1] * plo[1][k] + ul[2] * plo[2][k] - uh[0] * phi[0][k] -
                     uh[1] * phi[1][k] - uh[2] * phi[2][k]);
    const Scalar kv = kern(d[0], d[1], d[2]);
    const auto& w = wp[q];
    for (int m = 0; m < 9; ++m) A[m] += kv * w[m];
  }
  const double jac = 4.0 * grid.area(a) * grid.area(b);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Scalar v = A[3 * i + j] * jac;
      if (a == lo)
        I[al.perm_a[i]][al.perm_b[j]] = v;
      else
        I[al.perm_b[j]][al.perm_a[i]] = v;
    }
}

struct AssemblyJob {
  Kind kind;
  double k;
  const SurfaceMesh* grid;
  LocalBasis test, trial;
  int rows, cols;
  bool symmetric;
  QuadratureOptions quad;
};

template <typename Scalar, Kind K>
void run_assembly(const AssemblyJob& job, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out) {
  const SurfaceMesh& grid = *job.grid;
  const int ne = static_cast<int>(grid.element_count());

  const RegularPoints near_pts(grid, gauss_triangle(job.quad.regular_degree));
  const bool use_far = job.quad.far_ratio > 0.0;
  const RegularPoints far_pts(grid, gauss_triangle(use_far ? job.quad.far_degree : 1));
  const SingularRules singular(job.quad.singular_order);

  // Surface curls of local basis functions for the hypersingular form.
  std::vector<std::array<Vec3, 3>> curl_t, curl_s;
  if constexpr (K == Kind::hypersingular) {
    curl_t.resize(ne);
    curl_s.resize(ne);
    for (int e = 0; e < ne; ++e) {
      const auto cc = corner_curls(grid, e);
      for (int f = 0; f < 3; ++f) {
        curl_t[e][f] = Vec3::Zero();
        curl_s[e][f] = Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
          curl_t[e][f] += job.test[e].value[f][c] * cc[c];
          curl_s[e][f] += job.trial[e].value[f][c] * cc[c];
        }
      }
    }
  }

  const auto& vertex_elements = grid.vertex_elements();
  std::vector<int> stamp(ne, -1);
  PairKernel<Scalar, K> kern;
  kern.k = job.k;
  const double k2 = job.k * job.k;
  const double far2 = job.quad.far_ratio * job.quad.far_ratio;
  Moments<Scalar> I;

  // Row-major accumulator: the inner loop runs over trial elements, so writes
  // stay within one row. In symmetric mode only (test, trial) positions are
  // written and the transpose is added at the end, with self pairs halved.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> acc =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(job.rows, job.cols);

  for (int a = 0; a < ne; ++a) {
    for (int v : grid.triangle(a))
      for (int e : vertex_elements[v]) stamp[e] = a;
    const ElementBasis& tb = job.test[a];
    kern.nx = grid.normal(a);
    const Vec3& ca = grid.centroid(a);
    const double da = grid.diameter(a);
    for (int b = job.symmetric ? a : 0; b < ne; ++b) {
      const ElementBasis& sb = job.trial[b];
      kern.ny = grid.normal(b);
      if (stamp[b] == a) {
        singular_moments<Scalar>(grid, singular, a, b, kern, I);
      } else if (use_far) {
        const double dm = std::max(da, grid.diameter(b));
        if ((grid.centroid(b) - ca).squaredNorm() > far2 * dm * dm)
          regular_moments<Scalar>(far_pts, a, b, kern, I);
        else
          regular_moments<Scalar>(near_pts, a, b, kern, I);
      } else {
        regular_moments<Scalar>(near_pts, a, b, kern, I);
      }

      // T = test values * I, then local(f, g) = T(f, :) . trial values(g, :).
      Scalar T[3][3];
      for (int f = 0; f < tb.count; ++f)
        for (int d = 0; d < 3; ++d)
          T[f][d] = tb.value[f][0] * I[0][d] + tb.value[f][1] * I[1][d] + tb.value[f][2] * I[2][d];
      Scalar sum_all(0);
      double nn = 0.0;
      if constexpr (K == Kind::hypersingular) {
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d) sum_all += I[c][d];
        nn = kern.nx.dot(kern.ny);
      }
      const double self = (job.symmetric && b == a) ? 0.5 : 1.0;
      Scalar* row_ptr[3];
      for (int f = 0; f < tb.count; ++f) row_ptr[f] = acc.data() + static_cast<Eigen::Index>(tb.dof[f]) * job.cols;
      for (int f = 0; f < tb.count; ++f) {
        for (int g = 0; g < sb.count; ++g) {
          Scalar val = T[f][0] * sb.value[g][0] + T[f][1] * sb.value[g][1] + T[f][2] * sb.value[g][2];
          if constexpr (K == Kind::hypersingular)
            val = sum_all * curl_t[a][f].dot(curl_s[b][g]) - (k2 * nn) * val;
          row_ptr[f][sb.dof[g]] += self * val;
        }
      }
    }
  }
  if (job.symmetric)
    out = acc + acc.transpose();
  else
    out = acc;
}

void check_order_one(const FunctionSpace& s, const char* role) {
  if (s.order() != 1)
    throw UnsupportedSpaceError(std::string("hypersingular assembly needs a piecewise linear ") +
                                role + " space, got " + s.name());
}

DenseWeakForm assemble(Kind kind, const Kernel& kernel, const FunctionSpace& domain,
                       const FunctionSpace& dual, const QuadratureOptions& quad) {
  if (kernel.k < 0.0 || !std::isfinite(kernel.k))
    throw ArgumentError("wavenumber must be finite and non-negative");
  if (kind == Kind::hypersingular) {
    check_order_one(domain, "domain");
    check_order_one(dual, "dual");
  }
  const MeshPtr grid = common_grid(domain, dual);
  AssemblyJob job{kind,
                  kernel.k,
                  grid.get(),
                  dual.local_basis_on(grid),
                  domain.local_basis_on(grid),
                  dual.dof_count(),
                  domain.dof_count(),
                  false,
                  quad};
  // Symmetric kernels with identical test and trial spaces: visit each
  // unordered element pair once.
  job.symmetric = (kind == Kind::single_layer || kind == Kind::hypersingular) && domain.same_as(dual);

  DenseWeakForm out;
  out.provenance = {kind_name(kind), domain.name(), dual.name(), kernel.k, quad};
  if (kernel.is_laplace()) {
    RealMatrix real;
    switch (kind) {
      case Kind::single_layer: run_assembly<double, Kind::single_layer>(job, real); break;
      case Kind::double_layer: run_assembly<double, Kind::double_layer>(job, real); break;
      case Kind::adjoint_double_layer: run_assembly<double, Kind::adjoint_double_layer>(job, real); break;
      case Kind::hypersingular: run_assembly<double, Kind::hypersingular>(job, real); break;
    }
    out.matrix = real.cast<Complex>();
  } else {
    switch (kind) {
      case Kind::single_layer: run_assembly<Complex, Kind::single_layer>(job, out.matrix); break;
      case Kind::double_layer: run_assembly<Complex, Kind::double_layer>(job, out.matrix); break;
      case Kind::adjoint_double_layer: run_assembly<Complex, Kind::adjoint_double_layer>(job, out.matrix); break;
      case Kind::hypersingular: run_assembly<Complex, Kind::hypersingular>(job, out.matrix); break;
    }
  }
  if (!out.matrix.allFinite()) throw NumericalError(std::string(kind_name(kind)) + " assembly produced non-finite entries");
  ++g_assembly_count;
  return out;
}

// Local element matrices of linear bases: exact integrals of lambda_c lambda_d.
std::array<std::array<double, 3>, 3> local_mass(double area) {
  const double d = area / 6.0, o = area / 12.0;
  return {{{d, o, o}, {o, d, o}, {o, o, d}}};
}

template <typename LocalFn>
SparseMatrix sparse_assembly(const FunctionSpace& domain, const FunctionSpace& dual, LocalFn local) {
  const MeshPtr grid = common_grid(domain, dual);
  const LocalBasis test = dual.local_basis_on(grid);
  const LocalBasis trial = domain.local_basis_on(grid);
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(grid->element_count() * 9);
  for (int e = 0; e < static_cast<int>(grid->element_count()); ++e) {
    const ElementBasis& tb = test[e];
    const ElementBasis& sb = trial[e];
    for (int f = 0; f < tb.count; ++f)
      for (int g = 0; g < sb.count; ++g) {
        const double v = local(*grid, e, tb.value[f], sb.value[g]);
        if (v != 0.0) triplets.emplace_back(tb.dof[f], sb.dof[g], v);
      }
  }
  SparseMatrix m(dual.dof_count(), domain.dof_count());
  m.setFromTriplets(triplets.begin(), triplets.end());
  ++g_assembly_count;
  return m;
}

double mass_entry(const SurfaceMesh& grid, int e, const std::array<double, 3>& u,
                  const std::array<double, 3>& v) {
  const auto m = local_mass(grid.area(e));
  double s = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 3; ++d) s += u[c] * m[c][d] * v[d];
  return s;
}

void check_component(int ell) {
  if (ell < 0 || ell > 2) throw ArgumentError("component index must be 0, 1 or 2");
}

void check_discontinuous_dual(const FunctionSpace& dual) {
  if (dual.kind() != SpaceKind::DP1 && dual.kind() != SpaceKind::P0)
    throw UnsupportedSpaceError("component operators need a DP1 or P0 dual space, got " + dual.name());
}

}  // namespace

Complex Kernel::green(const Vec3& x, const Vec3& y) const {
  const double r = (x - y).norm();
  return std::exp(Complex(0.0, k * r)) * (inv4pi / r);
}

Complex Kernel::dgreen_dny(const Vec3& x, const Vec3& y, const Vec3& ny) const {
  const Vec3 d = x - y;
  const double r = d.norm();
  return std::exp(Complex(0.0, k * r)) * Complex(1.0, -k * r) * (inv4pi / (r * r * r)) * d.dot(ny);
}

Complex Kernel::dgreen_dnx(const Vec3& x, const Vec3& y, const Vec3& nx) const {
  const Vec3 d = y - x;
  const double r = d.norm();
  return std::exp(Complex(0.0, k * r)) * Complex(1.0, -k * r) * (inv4pi / (r * r * r)) * d.dot(nx);
}

DenseWeakForm assemble_single_layer(const Kernel& kernel, const FunctionSpace& domain,
                                    const FunctionSpace&, const FunctionSpace& dual,
                                    const QuadratureOptions& quad) {
  return assemble(Kind::single_layer, kernel, domain, dual, quad);
}

DenseWeakForm assemble_double_layer(const Kernel& kernel, const FunctionSpace& domain,
                                    const FunctionSpace&, const FunctionSpace& dual,
                                    const QuadratureOptions& quad) {
  return assemble(Kind::double_layer, kernel, domain, dual, quad);
}

DenseWeakForm assemble_adjoint_double_layer(const Kernel& kernel, const FunctionSpace& domain,
                                            const FunctionSpace&, const FunctionSpace& dual,
                                            const QuadratureOptions& quad) {
  return assemble(Kind::adjoint_double_layer, kernel, domain, dual, quad);
}

DenseWeakForm assemble_hypersingular_direct(const Kernel& kernel, const FunctionSpace& domain,
                                            const FunctionSpace&, const FunctionSpace& dual,
                                            const QuadratureOptions& quad) {
  return assemble(Kind::hypersingular, kernel, domain, dual, quad);
}

SparseMatrix assemble_mass(const FunctionSpace& domain, const FunctionSpace&, const FunctionSpace& dual) {
  return sparse_assembly(domain, dual, mass_entry);
}

SparseMatrix assemble_curl_component(int ell, const FunctionSpace& domain, const FunctionSpace&,
                                     const FunctionSpace& dual) {
  check_component(ell);
  if (domain.order() != 1)
    throw UnsupportedSpaceError("curl component needs a piecewise linear domain, got " + domain.name());
  check_discontinuous_dual(dual);
  return sparse_assembly(domain, dual,
                         [ell](const SurfaceMesh& grid, int e, const std::array<double, 3>& u,
                               const std::array<double, 3>& v) {
                           const auto cc = corner_curls(grid, e);
                           double curl = 0.0;
                           for (int c = 0; c < 3; ++c) curl += v[c] * cc[c][ell];
                           return curl * grid.area(e) / 3.0 * (u[0] + u[1] + u[2]);
                         });
}

SparseMatrix assemble_normal_component(int ell, const FunctionSpace& domain, const FunctionSpace&,
                                       const FunctionSpace& dual) {
  check_component(ell);
  if (domain.order() != 1)
    throw UnsupportedSpaceError("normal component needs a piecewise linear domain, got " + domain.name());
  check_discontinuous_dual(dual);
  return sparse_assembly(domain, dual,
                         [ell](const SurfaceMesh& grid, int e, const std::array<double, 3>& u,
                               const std::array<double, 3>& v) {
                           return grid.normal(e)[ell] * mass_entry(grid, e, u, v);
                         });
}

SparseMatrix duplication_matrix(const FunctionSpace& p1, const FunctionSpace& dp1) {
  if (p1.kind() != SpaceKind::P1 || dp1.kind() != SpaceKind::DP1 || p1.mesh().get() != dp1.mesh().get())
    throw SpaceMismatchError("duplication matrix needs P1 and DP1 on the same mesh");
  const SurfaceMesh& m = *p1.mesh();
  std::vector<Eigen::Triplet<Complex>> t;
  for (int e = 0; e < static_cast<int>(m.element_count()); ++e)
    for (int c = 0; c < 3; ++c) t.emplace_back(3 * e + c, m.triangle(e)[c], 1.0);
  SparseMatrix p(dp1.dof_count(), p1.dof_count());
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

DenseWeakForm assemble_projection_hypersingular(const Kernel& kernel, const MeshPtr& mesh,
                                                const QuadratureOptions& quad) {
  const auto p1 = make_space(SpaceKind::P1, mesh);
  const auto dp1 = make_space(SpaceKind::DP1, mesh);
  DenseWeakForm disc = assemble_hypersingular_direct(kernel, *dp1, *dp1, *dp1, quad);
  const SparseMatrix p = duplication_matrix(*p1, *dp1);
  const Matrix wp = disc.matrix * p;
  DenseWeakForm out;
  out.matrix = SparseMatrix(p.transpose()) * wp;
  out.provenance = disc.provenance;
  out.provenance.kind = "hypersingular_projection";
  out.provenance.domain = p1->name();
  out.provenance.dual = p1->name();
  return out;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Closest point by Voronoi region tests.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
  const double denom = 1.0 / (va + vb + vc);
  return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

namespace {

template <bool DoubleLayer>
Matrix potential(const Kernel& kernel, const FunctionSpace& space, const std::vector<Vec3>& points,
                 const PotentialOptions& opts) {
  const SurfaceMesh& grid = *space.assembly_grid();
  const LocalBasis& basis = space.local_basis();
  const TriangleRule rule = gauss_triangle(opts.degree);
  const RegularPoints pts(grid, rule);
  const int ne = static_cast<int>(grid.element_count());
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(points.size()), space.dof_count());

  auto kern = [&](const Vec3& x, const Vec3& y, const Vec3& ny) -> Complex {
    if constexpr (DoubleLayer)
      return kernel.dgreen_dny(x, y, ny);
    else
      return kernel.green(x, y);
  };

  for (std::size_t pi_ = 0; pi_ < points.size(); ++pi_) {
    const Vec3& x = points[pi_];
    for (int e = 0; e < ne; ++e) {
      const double diam = grid.diameter(e);
      const double dc = (x - grid.centroid(e)).norm();
      std::array<Complex, 3> J{};
      const Vec3& ny = grid.normal(e);
      if (dc > opts.near_factor * diam) {
        for (int q = 0; q < pts.n; ++q) {
          const std::size_t i = static_cast<std::size_t>(e) * pts.n + q;
          const Complex kv = kern(x, Vec3(pts.x[i], pts.y[i], pts.z[i]), ny) * pts.w[i];
          for (int c = 0; c < 3; ++c) J[c] += kv * pts.lam[q][c];
        }
      } else {
        const Vec3 &p0 = grid.corner(e, 0), &p1 = grid.corner(e, 1), &p2 = grid.corner(e, 2);
        if (point_triangle_distance(x, p0, p1, p2) < opts.epsilon * diam) {
          std::ostringstream msg;
          msg << "evaluation point (" << x[0] << ", " << x[1] << ", " << x[2]
              << ") is too close to element " << e;
          throw ProximityError(msg.str());
        }
        // Adaptive subdivision in barycentric coordinates of element e.
        using Bary = std::array<double, 3>;
        const double jac = 2.0 * grid.area(e);
        auto phys = [&](const Bary& l) { return Vec3(l[0] * p0 + l[1] * p1 + l[2] * p2); };
        auto recurse = [&](auto&& self, const Bary& A, const Bary& B, const Bary& C, int depth) -> void {
          const double scale = std::ldexp(1.0, -depth);
          Bary g;
          for (int c = 0; c < 3; ++c) g[c] = (A[c] + B[c] + C[c]) / 3.0;
          if (depth >= opts.max_depth || (x - phys(g)).norm() > opts.near_factor * diam * scale) {
            const double area_ratio = scale * scale;
            for (std::size_t q = 0; q < rule.size(); ++q) {
              const double s = rule.points[q][0], t = rule.points[q][1];
              Bary l;
              for (int c = 0; c < 3; ++c) l[c] = (1 - s - t) * A[c] + s * B[c] + t * C[c];
              const Complex kv = kern(x, phys(l), ny) * (rule.weights[q] * jac * area_ratio);
              for (int c = 0; c < 3; ++c) J[c] += kv * l[c];
            }
            return;
          }
          Bary ab, bc, ca;
          for (int c = 0; c < 3; ++c) {
            ab[c] = 0.5 * (A[c] + B[c]);
            bc[c] = 0.5 * (B[c] + C[c]);
            ca[c] = 0.5 * (C[c] + A[c]);
          }
          self(self, A, ab, ca, depth + 1);
          self(self, ab, B, bc, depth + 1);
          self(self, ca, bc, C, depth + 1);
          self(self, ab, bc, ca, depth + 1);
        };
        recurse(recurse, Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}, 0);
      }
      const ElementBasis& b = basis[e];
      for (int f = 0; f < b.count; ++f)
        out(static_cast<Eigen::Index>(pi_), b.dof[f]) +=
            b.value[f][0] * J[0] + b.value[f][1] * J[1] + b.value[f][2] * J[2];
    }
  }
  return out;
}

}  // namespace

Matrix potential_single_layer(const Kernel& kernel, const FunctionSpace& space,
                              const std::vector<Vec3>& points, const PotentialOptions& opts) {
  return potential<false>(kernel, space, points, opts);
}

Matrix potential_double_layer(const Kernel& kernel, const FunctionSpace& space,
                              const std::vector<Vec3>& points, const PotentialOptions& opts) {
  return potential<true>(kernel, space, points, opts);
}

long assembly_count() { return g_assembly_count.load(); }

}  // namespace bemalg
