#include "bemalg/drivers.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>

#include "bemalg/errors.hpp"

namespace bemalg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool is_command(const std::string& c) {
  return c == "dirichlet" || c == "hyp-bench" || c == "calderon" || c == "transmission" || c == "fig1";
}

std::string h_label(double h) { return "cube-h" + format_double(h); }

struct Box {
  Vec3 center;
  double radius;  // largest half extent
};

Box bounding_box(const SurfaceMesh& mesh) {
  Vec3 lo = mesh.vertex(0), hi = mesh.vertex(0);
  for (const auto& v : mesh.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {0.5 * (lo + hi), 0.5 * (hi - lo).maxCoeff()};
}

double relative_max_difference(const Matrix& a, const Matrix& b) {
  const double scale = a.cwiseAbs().maxCoeff();
  return scale > 0.0 ? (a - b).cwiseAbs().maxCoeff() / scale : (a - b).cwiseAbs().maxCoeff();
}

GmresOptions gmres_options(const RunConfig& c) {
  GmresOptions o;
  o.tol = *c.tol;
  o.max_iter = 1000;
  o.use_strong_form = c.use_strong_form;
  return o;
}

std::string iterations_text(const SolveReport& r) {
  return std::to_string(r.iterations) + (r.converged ? "" : " (not converged)");
}

}  // namespace

RunConfig resolved(RunConfig c) {
  if (!is_command(c.command)) throw ArgumentError("unknown command '" + c.command + "'");
  const bool sphere_first = c.command == "dirichlet" || c.command == "hyp-bench";
  if (c.shape.empty()) c.shape = sphere_first ? "sphere" : "cube";
  if (c.shape != "sphere" && c.shape != "cube" && c.shape != "file")
    throw ArgumentError("shape must be sphere, cube or file");
  if (c.shape == "sphere") {
    if (!c.hs.empty()) throw ArgumentError("--h applies to the cube only");
    if (c.levels.empty()) c.levels = c.command == "hyp-bench" ? std::vector<int>{1, 2, 3} : std::vector<int>{3};
    for (int l : c.levels)
      if (l < 0 || l > max_sphere_level)
        throw ArgumentError("sphere level must lie in [0, " + std::to_string(max_sphere_level) + "]");
  } else if (c.shape == "cube") {
    if (!c.levels.empty()) throw ArgumentError("--level applies to the sphere only");
    if (c.hs.empty()) c.hs = {c.command == "fig1" ? 0.1 : 0.25};
    for (double h : c.hs)
      if (!(h > 0.0 && h <= 1.0)) throw ArgumentError("cube element size must lie in (0, 1]");
  } else {
    if (c.mesh_path.empty()) throw ArgumentError("--mesh is required for shape 'file'");
    if (!c.levels.empty() || !c.hs.empty()) throw ArgumentError("--level and --h do not apply to mesh files");
  }
  if (!c.k) {
    if (c.command == "hyp-bench") c.k = 1.0;
    else if (c.command == "calderon") c.k = 2.0;
    else if (c.command == "transmission") c.k = 10.0;
    else c.k = 0.0;
  }
  if (!std::isfinite(*c.k) || *c.k < 0.0) throw ArgumentError("wavenumber must be finite and non-negative");
  if (c.command == "transmission" && !(*c.k > 0.0)) throw ArgumentError("transmission needs k > 0");
  if (!c.n) c.n = 0.8;
  if (!(*c.n > 0.0) || !std::isfinite(*c.n)) throw ArgumentError("refractive index must be positive");
  if (!c.tol) c.tol = c.command == "dirichlet" ? 1e-10 : 1e-5;
  if (!(*c.tol > 0.0 && *c.tol < 1.0)) throw ArgumentError("tolerance must lie in (0, 1)");
  if (c.quad_order < 1 || c.quad_order > 10) throw ArgumentError("quadrature order must lie in [1, 10]");
  if (c.side != "interior" && c.side != "exterior") throw ArgumentError("side must be interior or exterior");
  if (c.recipe != "dual" && c.recipe != "p1") throw ArgumentError("space recipe must be dual or p1");
  if (c.slice_points < 2 || c.slice_points > 1001) throw ArgumentError("slice points must lie in [2, 1001]");
  return c;
}

std::vector<LabeledMesh> build_meshes(const RunConfig& c) {
  std::vector<LabeledMesh> out;
  if (c.shape == "sphere")
    for (int l : c.levels) out.push_back({"sphere-L" + std::to_string(l), make_sphere(l)});
  else if (c.shape == "cube")
    for (double h : c.hs) out.push_back({h_label(h), make_cube(h)});
  else
    out.push_back({"file-" + std::filesystem::path(c.mesh_path).stem().string(), load_msh(c.mesh_path)});
  return out;
}

QuadratureOptions quadrature_options(const RunConfig& c) {
  QuadratureOptions q;
  q.singular_order = c.quad_order;
  q.regular_degree = c.quad_order;
  return q;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void Report::add(const std::string& key, const std::string& value) { lines.emplace_back(key, value); }
void Report::add(const std::string& key, double value) { lines.emplace_back(key, format_double(value)); }

void Report::check_at_most(const std::string& name, double value, double limit) {
  checks.push_back({name, value <= limit, format_double(value) + " <= " + format_double(limit)});
}

void Report::check(const std::string& name, bool passed, const std::string& detail) {
  checks.push_back({name, passed, detail});
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string Report::text() const {
  std::ostringstream s;
  s << title << "\n";
  for (const auto& [k, v] : lines) s << k << ": " << v << "\n";
  s << "checks:\n";
  for (const auto& c : checks) s << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
  s << "result: " << (passed() ? "PASS" : "FAIL") << "\n";
  return s.str();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& h : header) *this << h;
  end_row();
}

CsvWriter& CsvWriter::operator<<(const std::string& field) {
  if (!first_) out_ << ',';
  out_ << field;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::operator<<(double value) { return *this << format_double(value); }
CsvWriter& CsvWriter::operator<<(long value) { return *this << std::to_string(value); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

bool inside(const SurfaceMesh& mesh, const Vec3& p) {
  double omega = 0.0;
  for (int e = 0; e < static_cast<int>(mesh.element_count()); ++e) {
    const Vec3 a = mesh.corner(e, 0) - p, b = mesh.corner(e, 1) - p, c = mesh.corner(e, 2) - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    omega += 2.0 * std::atan2(num, den);
  }
  return omega > 2.0 * pi;
}

double distance_to_surface(const SurfaceMesh& mesh, const Vec3& p) {
  double d = std::numeric_limits<double>::infinity();
  for (int e = 0; e < static_cast<int>(mesh.element_count()); ++e)
    d = std::min(d, point_triangle_distance(p, mesh.corner(e, 0), mesh.corner(e, 1), mesh.corner(e, 2)));
  return d;
}

// Dirichlet problem.

DirichletResult run_dirichlet(const RunConfig& config) {
  DirichletResult r;
  r.config = resolved(config);
  const RunConfig& c = r.config;
  const double k = *c.k;
  const QuadratureOptions quad = quadrature_options(c);
  const Kernel kern{k};
  const GmresOptions opts = gmres_options(c);
  r.report.title = "dirichlet";
  r.report.add("wavenumber", k);
  r.report.add("tolerance", *c.tol);
  r.report.add("form", c.use_strong_form ? "strong" : "weak");

  for (const auto& [label, mesh] : build_meshes(c)) {
    const Box box = bounding_box(*mesh);
    r.source = box.center + box.radius * Vec3(2.0, 1.5, 1.25);
    const Vec3 x0 = r.source;
    const auto u = [&](const Vec3& x) { return kern.green(x, x0); };

    DirichletRun run;
    run.label = label;
    run.vertices = static_cast<int>(mesh->vertex_count());
    run.elements = static_cast<int>(mesh->element_count());
    const FunctionSpacePtr bp1 = make_space(SpaceKind::BP1, mesh);
    const FunctionSpacePtr d0 = make_space(SpaceKind::DUAL0, mesh);
    run.neumann_dofs = d0->dof_count();

    const BoundaryOperator v = single_layer(d0, bp1, d0, k, quad);
    const BoundaryOperator kop = double_layer(bp1, bp1, d0, k, quad);
    const BoundaryOperator id = identity_operator(bp1, bp1, d0);
    BoundaryOperator w = hypersingular(bp1, d0, bp1, k, quad);
    if (k == 0.0) w = rank_one_regularized(w);
    const auto t0 = Clock::now();
    v.weak_form();
    kop.weak_form();
    w.weak_form();
    run.assembly_time = seconds_since(t0);

    const GridFunction g = GridFunction::interpolated(bp1, u);
    const BoundaryOperator rhs_op = 0.5 * id + kop;
    const GmresResult plain = gmres(v, apply(rhs_op, g), opts);
    const GmresResult prec = gmres(w * v, apply(w * rhs_op, g), opts);
    run.plain = plain.report;
    run.preconditioned = prec.report;
    const Vector& xp = plain.solution.coefficients();
    const Vector& xq = prec.solution.coefficients();
    run.coefficient_difference = (xq - xp).norm() / xp.norm();

    std::vector<Vec3> pts;
    for (const Vec3& o : {Vec3(0.2, 0.1, -0.15), Vec3(-0.3, 0.25, 0.2), Vec3(0.1, -0.35, 0.3)})
      pts.push_back(box.center + box.radius * o);
    const Vector uh = potential_single_layer(kern, *d0, pts) * xq - potential_double_layer(kern, *bp1, pts) * g.coefficients();
    for (std::size_t i = 0; i < pts.size(); ++i)
      run.reconstruction_error = std::max(run.reconstruction_error, std::abs(uh[i] - u(pts[i])) / std::abs(u(pts[i])));

    r.report.add(label + " vertices", std::to_string(run.vertices));
    r.report.add(label + " iterations V", iterations_text(run.plain));
    r.report.add(label + " iterations W*V", iterations_text(run.preconditioned));
    r.report.add(label + " coefficient difference", run.coefficient_difference);
    r.report.add(label + " reconstruction error", run.reconstruction_error);
    r.report.add(label + " assembly time [s]", run.assembly_time);
    r.report.check(label + " V converged", run.plain.converged, iterations_text(run.plain));
    r.report.check(label + " W*V converged", run.preconditioned.converged, iterations_text(run.preconditioned));
    r.report.check_at_most(label + " solutions agree", run.coefficient_difference, 1e-6);
    r.report.check_at_most(label + " reconstruction error", run.reconstruction_error, 1e-3);
    r.runs.push_back(std::move(run));
  }
  r.report.add("source point", format_double(r.source[0]) + " " + format_double(r.source[1]) + " " +
                                   format_double(r.source[2]));
  if (r.runs.size() >= 2) {
    const auto& a = r.runs.front();
    const auto& b = r.runs.back();
    const double grow_prec = double(b.preconditioned.iterations) / std::max(1, a.preconditioned.iterations);
    const double grow_plain = double(b.plain.iterations) / std::max(1, a.plain.iterations);
    r.report.add("iteration growth W*V", grow_prec);
    r.report.add("iteration growth V", grow_plain);
    r.report.check_at_most("preconditioned iteration growth", grow_prec, 1.5);
    r.report.check("unpreconditioned iterations grow faster", grow_plain > grow_prec,
                   format_double(grow_plain) + " > " + format_double(grow_prec));
  }
  return r;
}

void write_dirichlet(const DirichletResult& r, const std::filesystem::path& dir) {
  CsvWriter it(dir / "iterations.csv", {"mesh", "vertices", "elements", "neumann_dofs", "iterations_v",
                                        "iterations_wv", "converged_v", "converged_wv", "coefficient_difference",
                                        "reconstruction_error", "assembly_time"});
  for (const auto& run : r.runs) {
    it << run.label << run.vertices << run.elements << run.neumann_dofs << run.plain.iterations
       << run.preconditioned.iterations << static_cast<int>(run.plain.converged)
       << static_cast<int>(run.preconditioned.converged) << run.coefficient_difference << run.reconstruction_error
       << run.assembly_time;
    it.end_row();
  }
  CsvWriter hist(dir / "residuals.csv", {"mesh", "solver", "iteration", "relative_residual"});
  for (const auto& run : r.runs)
    for (const auto* rep : {&run.plain, &run.preconditioned})
      for (std::size_t i = 0; i < rep->residual_history.size(); ++i) {
        hist << run.label << (rep == &run.plain ? "V" : "W*V") << static_cast<long>(i) << rep->residual_history[i];
        hist.end_row();
      }
}

// Hypersingular comparison.

HypBenchResult run_hyp_bench(const RunConfig& config) {
  HypBenchResult r;
  r.config = resolved(config);
  const RunConfig& c = r.config;
  const double k = *c.k;
  const QuadratureOptions quad = quadrature_options(c);
  const Kernel kern{k};
  r.report.title = "hyp-bench";
  r.report.add("wavenumber", k);
  r.report.add("memory", "dense matrix bytes (complex double)");

  for (const auto& [label, mesh] : build_meshes(c)) {
    HypBenchRow row;
    row.label = label;
    row.elements = static_cast<int>(mesh->element_count());
    const FunctionSpacePtr p1 = make_space(SpaceKind::P1, mesh);
    row.continuous_dofs = p1->dof_count();
    row.discontinuous_dofs = make_space(SpaceKind::DP1, mesh)->dof_count();
    const int disc_v = k == 0.0 ? row.elements : row.discontinuous_dofs;

    auto t0 = Clock::now();
    const Matrix wa = assemble_hypersingular_direct(kern, *p1, *p1, *p1, quad).matrix;
    row.time_direct = seconds_since(t0);
    t0 = Clock::now();
    const Matrix wb = assemble_projection_hypersingular(kern, mesh, quad).matrix;
    row.time_projection = seconds_since(t0);
    t0 = Clock::now();
    const BoundaryOperator wc_op = hypersingular_via_single_layer(p1, p1, p1, k, quad);
    const DiscreteOperatorPtr wc_weak = wc_op.weak_form();
    row.time_single_layer = seconds_since(t0);
    const Matrix wc = wc_weak->to_dense();

    row.bytes_direct = 16.0 * row.continuous_dofs * row.continuous_dofs;
    row.bytes_projection = 16.0 * row.discontinuous_dofs * row.discontinuous_dofs;
    row.bytes_single_layer = 16.0 * disc_v * disc_v;
    row.diff_projection = relative_max_difference(wa, wb);
    row.diff_single_layer = relative_max_difference(wa, wc);
    row.constant_residual = (wa * Vector::Ones(wa.cols())).cwiseAbs().maxCoeff() / wa.cwiseAbs().maxCoeff();

    r.report.add(label + " N (cont/discont)",
                 std::to_string(row.continuous_dofs) + " / " + std::to_string(row.discontinuous_dofs));
    r.report.add(label + " time direct [s]", row.time_direct);
    r.report.add(label + " time projection [s]", row.time_projection);
    r.report.add(label + " time single layer [s]", row.time_single_layer);
    r.report.add(label + " difference projection", row.diff_projection);
    r.report.add(label + " difference single layer", row.diff_single_layer);
    r.report.check(label + " discontinuous dofs = 3 x elements", row.discontinuous_dofs == 3 * row.elements,
                   std::to_string(row.discontinuous_dofs) + " = 3 x " + std::to_string(row.elements));
    r.report.check_at_most(label + " projection vs direct", row.diff_projection, 1e-12);
    r.report.check_at_most(label + " single layer vs direct", row.diff_single_layer, 1e-6);
    if (k == 0.0) {
      r.report.add(label + " constant residual", row.constant_residual);
      r.report.check_at_most(label + " W annihilates constants", row.constant_residual, 1e-8);
    }
    r.rows.push_back(row);
  }
  return r;
}

void write_hyp_bench(const HypBenchResult& r, const std::filesystem::path& dir) {
  CsvWriter out(dir / "hypersingular.csv",
                {"mesh", "elements", "continuous_dofs", "discontinuous_dofs", "time_direct", "time_projection",
                 "time_single_layer", "bytes_direct", "bytes_projection", "bytes_single_layer",
                 "difference_projection", "difference_single_layer", "constant_residual"});
  for (const auto& row : r.rows) {
    out << row.label << row.elements << row.continuous_dofs << row.discontinuous_dofs << row.time_direct
        << row.time_projection << row.time_single_layer << row.bytes_direct << row.bytes_projection
        << row.bytes_single_layer << row.diff_projection << row.diff_single_layer << row.constant_residual;
    out.end_row();
  }
}

// Calderon projector.

CalderonResult run_calderon(const RunConfig& config) {
  CalderonResult r;
  r.config = resolved(config);
  const RunConfig& c = r.config;
  const double k = *c.k;
  const QuadratureOptions quad = quadrature_options(c);
  const Side side = c.side == "interior" ? Side::interior : Side::exterior;
  const SpaceRecipe recipe = parse_space_recipe(c.recipe);
  r.report.title = "calderon";
  r.report.add("wavenumber", k);
  r.report.add("projector", side == Side::interior ? "interior 1/2 Id + A" : "exterior 1/2 Id - A");
  r.report.add("space recipe", c.recipe);
  r.report.add("random seed", std::to_string(c.seed));

  for (const auto& [label, mesh] : build_meshes(c)) {
    CalderonRun run;
    run.label = label;
    const Multitrace a = multitrace_operator(mesh, k, recipe, quad);
    run.dirichlet_dofs = a.spaces.dirichlet->dof_count();
    run.neumann_dofs = a.spaces.neumann->dof_count();
    const int n = run.dirichlet_dofs + run.neumann_dofs;
    if (n > max_dense_calderon)
      throw CapacityError("dense Calderon projector of size " + std::to_string(n) + " exceeds the cap of " +
                          std::to_string(max_dense_calderon) + "; use a coarser mesh");
    const BlockedOperator proj = calderon_projector(a, side);
    const Eigen::VectorXd mass_sv = dense_svd(Matrix(*pairing_mass(a.spaces.dirichlet, a.spaces.neumann)));
    run.pairing_condition = mass_sv[0] / mass_sv[mass_sv.size() - 1];

    const std::vector<GridFunction> f{GridFunction::from_ones(a.spaces.dirichlet),
                                      GridFunction::from_ones(a.spaces.neumann)};
    const std::vector<GridFunction> once = apply_blocked(proj, f);
    const std::vector<GridFunction> twice = apply_blocked(proj, once);
    run.error_dirichlet = (twice[0] - once[0]).l2_norm() / twice[0].l2_norm();
    run.error_neumann = (twice[1] - once[1]).l2_norm() / twice[1].l2_norm();

    const Matrix s = proj.strong_form()->to_dense();
    run.singular_values = dense_svd(s);
    double best = -1.0;
    for (int i = 0; i + 1 < run.singular_values.size(); ++i) {
      const double lo = run.singular_values[i + 1];
      const double ratio = lo > 0.0 ? run.singular_values[i] / lo : std::numeric_limits<double>::infinity();
      if (ratio > best) {
        best = ratio;
        run.drop_index = i + 1;
      }
    }
    run.drop_ratio = best;

    Eigen::VectorXcd ev = dense_eig(s);
    std::vector<Complex> sorted(ev.data(), ev.data() + ev.size());
    std::sort(sorted.begin(), sorted.end(), [](Complex x, Complex y) {
      return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
    run.eigenvalues = Eigen::Map<Eigen::VectorXcd>(sorted.data(), static_cast<Eigen::Index>(sorted.size()));
    for (const Complex& l : sorted) {
      if (std::abs(l - 1.0) < 0.2) ++run.near_one;
      else if (std::abs(l) < 0.2) ++run.near_zero;
      else ++run.elsewhere;
    }

    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> normal;
    Vector x(n);
    for (auto& xi : x) xi = Complex(normal(rng), normal(rng));
    const Vector y = s * x;
    run.idempotency_defect = (s * y - y).norm() / y.norm();

    const int nd = run.dirichlet_dofs;
    r.report.add(label + " Dirichlet/Neumann dofs", std::to_string(nd) + " / " + std::to_string(run.neumann_dofs));
    r.report.add(label + " error_dirichlet", run.error_dirichlet);
    r.report.add(label + " error_neumann", run.error_neumann);
    r.report.add(label + " idempotency defect", run.idempotency_defect);
    r.report.add(label + " pairing condition number", run.pairing_condition);
    r.report.add(label + " singular value drop index", std::to_string(run.drop_index));
    r.report.add(label + " singular values at drop",
                 format_double(run.singular_values[run.drop_index - 1]) + " -> " +
                     (run.drop_index < run.singular_values.size() ? format_double(run.singular_values[run.drop_index])
                                                                  : std::string("none")));
    r.report.add(label + " eigenvalues near 1 / near 0 / elsewhere", std::to_string(run.near_one) + " / " +
                                                                         std::to_string(run.near_zero) + " / " +
                                                                         std::to_string(run.elsewhere));
    r.report.check_at_most(label + " error_dirichlet", run.error_dirichlet, 5e-2);
    r.report.check_at_most(label + " error_neumann", run.error_neumann, 5e-2);
    r.report.check(label + " drop index equals Dirichlet dofs", run.drop_index == nd,
                   std::to_string(run.drop_index) + " vs " + std::to_string(nd));
    r.report.check(label + " drop ratio at least 10", run.drop_ratio >= 10.0, format_double(run.drop_ratio));
    r.report.check(label + " eigenvalues near 1", std::abs(run.near_one - nd) <= 0.02 * nd,
                   std::to_string(run.near_one) + " vs " + std::to_string(nd));
    r.report.check(label + " remaining eigenvalues near 0", run.elsewhere == 0,
                   std::to_string(run.elsewhere) + " outside both clusters");
    r.runs.push_back(std::move(run));
  }
  if (r.runs.size() >= 2) {
    for (std::size_t i = 1; i < r.runs.size(); ++i) {
      const auto& a = r.runs[i - 1];
      const auto& b = r.runs[i];
      r.report.check(b.label + " error_dirichlet decreases", b.error_dirichlet < a.error_dirichlet,
                     format_double(b.error_dirichlet) + " < " + format_double(a.error_dirichlet));
      r.report.check(b.label + " error_neumann decreases", b.error_neumann < a.error_neumann,
                     format_double(b.error_neumann) + " < " + format_double(a.error_neumann));
    }
  }
  return r;
}

void write_calderon(const CalderonResult& r, const std::filesystem::path& dir) {
  const bool many = r.runs.size() > 1;
  for (const auto& run : r.runs) {
    const std::string suffix = many ? "_" + run.label : "";
    CsvWriter sv(dir / ("singular_values" + suffix + ".csv"), {"index", "value"});
    for (Eigen::Index i = 0; i < run.singular_values.size(); ++i) {
      sv << static_cast<long>(i + 1) << run.singular_values[i];
      sv.end_row();
    }
    CsvWriter ev(dir / ("eigenvalues" + suffix + ".csv"), {"index", "real", "imag"});
    for (Eigen::Index i = 0; i < run.eigenvalues.size(); ++i) {
      ev << static_cast<long>(i + 1) << run.eigenvalues[i].real() << run.eigenvalues[i].imag();
      ev.end_row();
    }
  }
  CsvWriter sum(dir / "calderon.csv", {"mesh", "dirichlet_dofs", "neumann_dofs", "error_dirichlet", "error_neumann",
                                       "idempotency_defect", "pairing_condition", "drop_index", "drop_ratio",
                                       "near_one", "near_zero", "elsewhere"});
  for (const auto& run : r.runs) {
    sum << run.label << run.dirichlet_dofs << run.neumann_dofs << run.error_dirichlet << run.error_neumann
        << run.idempotency_defect << run.pairing_condition << run.drop_index << run.drop_ratio << run.near_one << run.near_zero
        << run.elsewhere;
    sum.end_row();
  }
}

// Transmission problem.

TransmissionResult run_transmission(const RunConfig& config) {
  TransmissionResult r;
  r.config = resolved(config);
  const RunConfig& c = r.config;
  const double k = *c.k, nref = *c.n;
  const QuadratureOptions quad = quadrature_options(c);
  const SpaceRecipe recipe = parse_space_recipe(c.recipe);
  r.direction = Vec3(1.0, 0.0, 0.0);
  const Vec3 d = r.direction;
  const Complex ik(0.0, k);
  const auto uinc = [&](const Vec3& x) { return std::exp(ik * d.dot(x)); };
  const auto duinc = [&](const Vec3& x, const Vec3& nu) { return ik * d.dot(nu) * std::exp(ik * d.dot(x)); };
  GmresOptions opts = gmres_options(c);
  opts.use_strong_form = true;

  r.report.title = "transmission";
  r.report.add("wavenumber", k);
  r.report.add("refractive index", nref);
  r.report.add("tolerance", *c.tol);
  r.report.add("incident direction", "1 0 0");
  r.report.add("space recipe", c.recipe);

  for (const auto& [label, mesh] : build_meshes(c)) {
    TransmissionRun run;
    run.label = label;
    const TransmissionOperators t = transmission_operators(mesh, k, nref, recipe, quad);
    const CauchySpaces& sp = t.a_plus.spaces;
    run.dofs = sp.dirichlet->dof_count() + sp.neumann->dof_count();
    const BlockedOperator op = t.a_minus.op + t.a_plus.op;
    const BlockedOperator rhs_part = 0.5 * t.identity - t.a_minus.op;
    const BlockedOperator rhs_op = op * rhs_part;
    const BlockedOperator squared = op * op;

    const CauchyPair vinc = cauchy_data(sp, uinc, duinc);
    const BlockedGmresResult sol = gmres(squared, apply_blocked(rhs_op, vinc.as_vector()), opts);
    run.report = sol.report;

    const Vector x = concatenate_coefficients(sol.solution);
    const Vector vi = concatenate_coefficients(vinc.as_vector());
    const Vector f = rhs_part.weak_form()->matvec(vi);
    run.unsquared_residual = (op.weak_form()->matvec(x) - f).norm() / f.norm();

    // Field on the slice.
    const Box box = bounding_box(*mesh);
    const int np = c.slice_points;
    std::vector<Vec3> ext, inn;
    std::vector<int> ext_idx, inn_idx;
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        SlicePoint p;
        p.x = Vec3(box.center[0] + box.radius * (-3.0 + 6.0 * i / (np - 1)),
                   box.center[1] + box.radius * (-3.0 + 6.0 * j / (np - 1)), box.center[2]);
        p.uinc2 = std::norm(uinc(p.x));
        if (distance_to_surface(*mesh, p.x) < 0.05) {
          p.region = 0;
        } else if (inside(*mesh, p.x)) {
          p.region = -1;
          inn.push_back(p.x);
          inn_idx.push_back(static_cast<int>(run.slice.size()));
        } else {
          p.region = 1;
          ext.push_back(p.x);
          ext_idx.push_back(static_cast<int>(run.slice.size()));
        }
        run.slice.push_back(p);
      }
    const Vector& g_plus = sol.solution[0].coefficients();
    const Vector& n_plus = sol.solution[1].coefficients();
    if (!ext.empty()) {
      const Kernel kp{k};
      const Vector us = potential_double_layer(kp, *sp.dirichlet, ext) * g_plus -
                        potential_single_layer(kp, *sp.neumann, ext) * n_plus;
      for (std::size_t i = 0; i < ext.size(); ++i)
        run.slice[ext_idx[i]].u2 = std::norm(uinc(ext[i]) + us[i]);
    }
    if (!inn.empty()) {
      const Kernel km{nref * k};
      const Vector g_minus = g_plus + vinc.dirichlet.coefficients();
      const Vector n_minus = n_plus + vinc.neumann.coefficients();
      const Vector ui = potential_single_layer(km, *sp.neumann, inn) * n_minus -
                        potential_double_layer(km, *sp.dirichlet, inn) * g_minus;
      for (std::size_t i = 0; i < inn.size(); ++i) run.slice[inn_idx[i]].u2 = std::norm(ui[i]);
    }
    double num = 0.0, den = 0.0;
    int skipped = 0;
    for (const auto& p : run.slice) {
      if (p.region == 0) {
        ++skipped;
        continue;
      }
      num += (p.u2 - p.uinc2) * (p.u2 - p.uinc2);
      den += p.uinc2 * p.uinc2;
    }
    run.null_deviation = std::sqrt(num / den);

    r.report.add(label + " dofs", std::to_string(run.dofs));
    r.report.add(label + " iterations", iterations_text(run.report));
    r.report.add(label + " unsquared residual", run.unsquared_residual);
    r.report.add(label + " slice points skipped near boundary", std::to_string(skipped));
    r.report.add(label + " slice deviation from incident field", run.null_deviation);
    r.report.check(label + " converged", run.report.converged, iterations_text(run.report));
    r.report.check(label + " at most 15 iterations", run.report.iterations <= 15,
                   std::to_string(run.report.iterations));
    r.report.check_at_most(label + " unsquared residual", run.unsquared_residual, 10.0 * *c.tol);
    if (nref == 1.0) r.report.check_at_most(label + " null test", run.null_deviation, 5e-2);
    r.runs.push_back(std::move(run));
  }
  if (r.runs.size() >= 2) {
    const int change = std::abs(r.runs.back().report.iterations - r.runs.front().report.iterations);
    r.report.check("iteration count stable under refinement", change <= 3, "change " + std::to_string(change));
  }
  return r;
}

void write_transmission(const TransmissionResult& r, const std::filesystem::path& dir) {
  const bool many = r.runs.size() > 1;
  for (const auto& run : r.runs) {
    const std::string suffix = many ? "_" + run.label : "";
    CsvWriter out(dir / ("slice" + suffix + ".csv"), {"x", "y", "z", "region", "u_squared", "u_inc_squared"});
    for (const auto& p : run.slice) {
      out << p.x[0] << p.x[1] << p.x[2];
      if (p.region == 0) {
        out << std::string("near_boundary") << std::string("") << std::string("");
      } else {
        out << std::string(p.region > 0 ? "exterior" : "interior") << p.u2 << p.uinc2;
      }
      out.end_row();
    }
  }
  CsvWriter it(dir / "iterations.csv", {"mesh", "dofs", "iteration", "relative_residual"});
  for (const auto& run : r.runs)
    for (std::size_t i = 0; i < run.report.residual_history.size(); ++i) {
      it << run.label << run.dofs << static_cast<long>(i) << run.report.residual_history[i];
      it.end_row();
    }
}

// Single layer of a constant, then the hypersingular operator.

Fig1Result run_fig1(const RunConfig& config) {
  Fig1Result r;
  r.config = resolved(config);
  const RunConfig& c = r.config;
  const double k = *c.k;
  const QuadratureOptions quad = quadrature_options(c);
  const auto meshes = build_meshes(c);
  r.label = meshes.front().label;
  r.mesh = meshes.front().mesh;
  const FunctionSpacePtr bp1 = make_space(SpaceKind::BP1, r.mesh);
  const FunctionSpacePtr d0 = make_space(SpaceKind::DUAL0, r.mesh);

  const BoundaryOperator v = single_layer(d0, bp1, d0, k, quad);
  const GridFunction g = apply(v, GridFunction::from_ones(d0));
  r.single_layer_values = g.coefficients();
  const BoundaryOperator w = hypersingular(bp1, d0, bp1, k, quad);
  const GridFunction h = apply(w, GridFunction::from_coefficients(bp1, r.single_layer_values));
  r.hypersingular_values = h.coefficients();
  r.first_space = g.space()->name();
  r.second_space = h.space()->name();

  r.report.title = "fig1";
  r.report.add("mesh", r.label);
  r.report.add("wavenumber", k);
  r.report.add("first function space", r.first_space);
  r.report.add("second function space", r.second_space);
  r.report.add("min V1", r.single_layer_values.real().minCoeff());
  r.report.add("max V1", r.single_layer_values.real().maxCoeff());
  r.report.add("min WV1", r.hypersingular_values.real().minCoeff());
  r.report.add("max WV1", r.hypersingular_values.real().maxCoeff());
  r.report.check("V1 lives in a continuous space", g.space()->is_continuous(), r.first_space);
  r.report.check("WV1 lives in a piecewise constant space",
                 !h.space()->is_continuous() && h.space()->order() == 0, r.second_space);
  if (k == 0.0)
    r.report.check("V1 positive", r.single_layer_values.real().minCoeff() > 0.0,
                   "min " + format_double(r.single_layer_values.real().minCoeff()));
  return r;
}

void write_fig1(const Fig1Result& r, const std::filesystem::path& dir) {
  CsvWriter a(dir / "single_layer_vertices.csv", {"vertex", "x", "y", "z", "real", "imag"});
  for (int i = 0; i < r.single_layer_values.size(); ++i) {
    const Vec3& p = r.mesh->vertex(i);
    a << i << p[0] << p[1] << p[2] << r.single_layer_values[i].real() << r.single_layer_values[i].imag();
    a.end_row();
  }
  CsvWriter b(dir / "hypersingular_dual_cells.csv", {"cell", "x", "y", "z", "real", "imag"});
  for (int i = 0; i < r.hypersingular_values.size(); ++i) {
    const Vec3& p = r.mesh->vertex(i);
    b << i << p[0] << p[1] << p[2] << r.hypersingular_values[i].real() << r.hypersingular_values[i].imag();
    b.end_row();
  }
}

int run_command(const RunConfig& config) {
  const RunConfig c = resolved(config);
  std::filesystem::create_directories(c.out_dir);
  Report report;
  try {
    if (c.command == "dirichlet") {
      auto r = run_dirichlet(c);
      write_dirichlet(r, c.out_dir);
      report = r.report;
    } else if (c.command == "hyp-bench") {
      auto r = run_hyp_bench(c);
      write_hyp_bench(r, c.out_dir);
      report = r.report;
    } else if (c.command == "calderon") {
      auto r = run_calderon(c);
      write_calderon(r, c.out_dir);
      report = r.report;
    } else if (c.command == "transmission") {
      auto r = run_transmission(c);
      write_transmission(r, c.out_dir);
      report = r.report;
    } else {
      auto r = run_fig1(c);
      write_fig1(r, c.out_dir);
      report = r.report;
    }
  } catch (const ArgumentError&) {
    throw;
  } catch (const Error& e) {
    report.title = c.command;
    report.check("run completed", false, e.what());
  }
  std::ofstream(c.out_dir / "report.txt") << report.text();
  std::cout << report.text();
  return report.passed() ? 0 : 1;
}

}  // namespace bemalg
