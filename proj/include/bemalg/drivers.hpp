#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bemalg/calderon.hpp"
#include "bemalg/solver.hpp"

namespace bemalg {

/// Parameters of one CLI run. Unset optionals take per-command defaults.
struct RunConfig {
  std::string command;
  std::string shape;                 // sphere | cube | file
  std::vector<int> levels;           // sphere refinement levels
  std::vector<double> hs;            // cube element sizes
  std::string mesh_path;             // shape == file
  std::optional<double> k;
  std::optional<double> n;
  std::optional<double> tol;
  int quad_order = 4;
  std::filesystem::path out_dir = "out";
  bool use_strong_form = false;
  std::string side = "exterior";     // calderon
  std::string recipe = "dual";       // calderon, transmission
  int slice_points = 101;            // transmission
  unsigned seed = 20170601;          // random probe vectors
};

/// Fills per-command defaults and validates ranges. Throws ArgumentError.
RunConfig resolved(RunConfig config);

struct LabeledMesh {
  std::string label;
  MeshPtr mesh;
};

/// One mesh per requested level or element size, or the mesh file.
std::vector<LabeledMesh> build_meshes(const RunConfig& config);

QuadratureOptions quadrature_options(const RunConfig& config);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Key/value summary lines and pass/fail checks of a driver run.
struct Report {
  std::string title;
  std::vector<std::pair<std::string, std::string>> lines;
  std::vector<Check> checks;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  /// Records value <= limit.
  void check_at_most(const std::string& name, double value, double limit);
  void check(const std::string& name, bool passed, const std::string& detail);
  bool passed() const;
  std::string text() const;
};

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// UTF-8 CSV with a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& operator<<(const std::string& field);
  CsvWriter& operator<<(double value);
  CsvWriter& operator<<(long value);
  CsvWriter& operator<<(int value) { return *this << static_cast<long>(value); }
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

// Dirichlet problem with a manufactured solution.

struct DirichletRun {
  std::string label;
  int vertices = 0, elements = 0, neumann_dofs = 0;
  SolveReport plain, preconditioned;
  double coefficient_difference = 0.0;
  double reconstruction_error = 0.0;
  double assembly_time = 0.0;
};

struct DirichletResult {
  RunConfig config;
  Vec3 source;
  std::vector<DirichletRun> runs;
  Report report;
};

DirichletResult run_dirichlet(const RunConfig& config);
void write_dirichlet(const DirichletResult& r, const std::filesystem::path& dir);

// Hypersingular assembly comparison.

struct HypBenchRow {
  std::string label;
  int elements = 0, continuous_dofs = 0, discontinuous_dofs = 0;
  double time_direct = 0.0, time_projection = 0.0, time_single_layer = 0.0;
  double bytes_direct = 0.0, bytes_projection = 0.0, bytes_single_layer = 0.0;
  double diff_projection = 0.0, diff_single_layer = 0.0;
  /// max |W 1| / max |W_ij|; reported for k = 0.
  double constant_residual = 0.0;
};

struct HypBenchResult {
  RunConfig config;
  std::vector<HypBenchRow> rows;
  Report report;
};

HypBenchResult run_hyp_bench(const RunConfig& config);
void write_hyp_bench(const HypBenchResult& r, const std::filesystem::path& dir);

// Calderon projector.

struct CalderonRun {
  std::string label;
  int dirichlet_dofs = 0, neumann_dofs = 0;
  double error_dirichlet = 0.0, error_neumann = 0.0;
  double idempotency_defect = 0.0;
  double pairing_condition = 0.0;    // Dirichlet/Neumann mass pairing, 2-norm
  Eigen::VectorXd singular_values;   // descending
  Eigen::VectorXcd eigenvalues;      // sorted by real part, descending
  int drop_index = 0;                // count of values before the largest ratio
  double drop_ratio = 0.0;
  int near_one = 0, near_zero = 0, elsewhere = 0;
};

struct CalderonResult {
  RunConfig config;
  std::vector<CalderonRun> runs;
  Report report;
};

/// Largest dense size materialized by the calderon driver.
inline constexpr int max_dense_calderon = 6000;

CalderonResult run_calderon(const RunConfig& config);
void write_calderon(const CalderonResult& r, const std::filesystem::path& dir);

// Transmission problem.

struct SlicePoint {
  Vec3 x;
  /// 1 exterior, -1 interior, 0 skipped near the boundary.
  int region = 0;
  double u2 = 0.0, uinc2 = 0.0;
};

struct TransmissionRun {
  std::string label;
  int dofs = 0;
  SolveReport report;
  double unsquared_residual = 0.0;
  double null_deviation = 0.0;  // slice deviation from |u_inc|^2
  std::vector<SlicePoint> slice;
};

struct TransmissionResult {
  RunConfig config;
  Vec3 direction;
  std::vector<TransmissionRun> runs;
  Report report;
};

TransmissionResult run_transmission(const RunConfig& config);
void write_transmission(const TransmissionResult& r, const std::filesystem::path& dir);

// Single layer of a constant and the hypersingular operator applied to it.

struct Fig1Result {
  RunConfig config;
  std::string label;
  MeshPtr mesh;
  Vector single_layer_values;   // BP1 coefficients, one per vertex
  Vector hypersingular_values;  // DUAL0 coefficients, one per dual cell
  std::string first_space, second_space;
  Report report;
};

Fig1Result run_fig1(const RunConfig& config);
void write_fig1(const Fig1Result& r, const std::filesystem::path& dir);

/// Runs the command, writes report.txt and CSVs into config.out_dir and
/// returns 0 when all checks pass, 1 otherwise.
int run_command(const RunConfig& config);

/// Interior points of the mesh by winding number.
bool inside(const SurfaceMesh& mesh, const Vec3& p);
/// Distance from p to the surface.
double distance_to_surface(const SurfaceMesh& mesh, const Vec3& p);

}  // namespace bemalg
