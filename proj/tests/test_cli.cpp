#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bemalg/drivers.hpp"
#include "bemalg/errors.hpp"

using namespace bemalg;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("bemalg_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig config(const std::string& command) {
  RunConfig c;
  c.command = command;
  return c;
}

}  // namespace

TEST_CASE("per-command defaults") {
  const RunConfig d = resolved(config("dirichlet"));
  CHECK(d.shape == "sphere");
  CHECK(d.levels == std::vector<int>{3});
  CHECK(*d.k == 0.0);
  CHECK(*d.tol == 1e-10);

  const RunConfig h = resolved(config("hyp-bench"));
  CHECK(h.levels == std::vector<int>{1, 2, 3});
  CHECK(*h.k == 1.0);

  const RunConfig c = resolved(config("calderon"));
  CHECK(c.shape == "cube");
  CHECK(c.hs == std::vector<double>{0.25});
  CHECK(*c.k == 2.0);
  CHECK(c.side == "exterior");

  const RunConfig t = resolved(config("transmission"));
  CHECK(*t.k == 10.0);
  CHECK(*t.n == 0.8);
  CHECK(*t.tol == 1e-5);

  CHECK(resolved(config("fig1")).hs == std::vector<double>{0.1});
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(resolved(config("solve")), ArgumentError);
  RunConfig c = config("calderon");
  c.shape = "torus";
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("calderon");
  c.hs = {0.0};
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("calderon");
  c.levels = {2};
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("dirichlet");
  c.levels = {max_sphere_level + 1};
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("transmission");
  c.k = 0.0;
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("dirichlet");
  c.k = -1.0;
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("dirichlet");
  c.tol = 0.0;
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("dirichlet");
  c.quad_order = 0;
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("calderon");
  c.side = "inside";
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("calderon");
  c.shape = "file";
  CHECK_THROWS_AS(resolved(c), ArgumentError);
  c = config("transmission");
  c.slice_points = 1;
  CHECK_THROWS_AS(resolved(c), ArgumentError);
}

TEST_CASE("mesh labels") {
  RunConfig c = config("calderon");
  c.hs = {0.5, 0.25};
  const auto meshes = build_meshes(resolved(c));
  REQUIRE(meshes.size() == 2);
  CHECK(meshes[0].label == "cube-h0.5");
  CHECK(meshes[1].label == "cube-h0.25");
  RunConfig s = config("dirichlet");
  s.levels = {1};
  CHECK(build_meshes(resolved(s))[0].label == "sphere-L1");
}

TEST_CASE("doubles are written in shortest round-trip form") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 4.0 * pi}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("csv writer") {
  const auto dir = fresh_dir("csv");
  std::filesystem::create_directories(dir);
  {
    CsvWriter w(dir / "t.csv", {"a", "b", "c"});
    w << std::string("x") << 0.1 << 7;
    w.end_row();
  }
  CHECK(slurp(dir / "t.csv") == "a,b,c\nx,0.1,7\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("report text") {
  Report r;
  r.title = "demo";
  r.add("value", 0.5);
  r.check_at_most("small", 1e-3, 1e-2);
  CHECK(r.passed());
  r.check_at_most("large", 1.0, 1e-2);
  CHECK_FALSE(r.passed());
  const auto l = lines(r.text());
  CHECK(l.front() == "demo");
  CHECK(l.back() == "result: FAIL");
  CHECK(r.text().find("value: 0.5") != std::string::npos);
  CHECK(r.text().find("PASS small") != std::string::npos);
  CHECK(r.text().find("FAIL large") != std::string::npos);
}

TEST_CASE("inside test and distance") {
  const MeshPtr m = make_cube(0.5);
  CHECK(inside(*m, Vec3(0.5, 0.5, 0.5)));
  CHECK(inside(*m, Vec3(0.01, 0.99, 0.5)));
  CHECK_FALSE(inside(*m, Vec3(1.5, 0.5, 0.5)));
  CHECK_FALSE(inside(*m, Vec3(-0.01, 0.5, 0.5)));
  CHECK(distance_to_surface(*m, Vec3(0.5, 0.5, 0.5)) == doctest::Approx(0.5));
  CHECK(distance_to_surface(*m, Vec3(2.0, 0.5, 0.5)) == doctest::Approx(1.0));
  CHECK(distance_to_surface(*m, Vec3(2.0, 2.0, 0.5)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("fig1 writes deterministic output") {
  RunConfig c = config("fig1");
  c.hs = {0.5};
  c.out_dir = fresh_dir("fig1_a");
  CHECK(run_command(c) == 0);
  const auto first = slurp(c.out_dir / "single_layer_vertices.csv");
  const auto second_space = slurp(c.out_dir / "hypersingular_dual_cells.csv");
  const auto report = slurp(c.out_dir / "report.txt");
  CHECK(lines(first).front() == "vertex,x,y,z,real,imag");
  CHECK(lines(first).size() == make_cube(0.5)->vertex_count() + 1);
  CHECK(lines(second_space).size() == make_cube(0.5)->vertex_count() + 1);
  CHECK(report.find("result: PASS") != std::string::npos);

  const auto again = fresh_dir("fig1_b");
  c.out_dir = again;
  CHECK(run_command(c) == 0);
  CHECK(slurp(again / "single_layer_vertices.csv") == first);
  std::filesystem::remove_all(again);
  std::filesystem::remove_all(fresh_dir("fig1_a"));
}

TEST_CASE("fig1 spaces and values") {
  RunConfig c = config("fig1");
  c.hs = {0.5};
  const Fig1Result r = run_fig1(resolved(c));
  CHECK(r.first_space.rfind("BP1", 0) == 0);
  CHECK(r.second_space.rfind("DUAL0", 0) == 0);
  CHECK(r.single_layer_values.real().minCoeff() > 0.0);
  CHECK(r.report.passed());
}

TEST_CASE("hyp-bench on the coarsest sphere") {
  RunConfig c = config("hyp-bench");
  c.levels = {1};
  const HypBenchResult r = run_hyp_bench(resolved(c));
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].elements == 80);
  CHECK(r.rows[0].continuous_dofs == 42);
  CHECK(r.rows[0].discontinuous_dofs == 240);
  CHECK(r.rows[0].diff_projection <= 1e-12);
  CHECK(r.rows[0].diff_single_layer <= 1e-6);
  CHECK(r.report.passed());
}

TEST_CASE("calderon output files") {
  RunConfig c = config("calderon");
  c.hs = {0.5};
  c.out_dir = fresh_dir("calderon");
  run_command(c);
  const auto sv = lines(slurp(c.out_dir / "singular_values.csv"));
  const auto ev = lines(slurp(c.out_dir / "eigenvalues.csv"));
  const std::size_t n = 2 * make_cube(0.5)->vertex_count();
  CHECK(sv.size() == n + 1);
  CHECK(ev.size() == n + 1);
  CHECK(sv.front() == "index,value");
  const auto summary = lines(slurp(c.out_dir / "calderon.csv"));
  REQUIRE(summary.size() == 2);
  CHECK(summary.front().find("pairing_condition") != std::string::npos);
  std::filesystem::remove_all(c.out_dir);
}

TEST_CASE("dual pairing condition number is recorded") {
  RunConfig c = config("calderon");
  c.hs = {0.5};
  const CalderonResult r = run_calderon(resolved(c));
  REQUIRE(r.runs.size() == 1);
  CHECK(std::isfinite(r.runs[0].pairing_condition));
  CHECK(r.runs[0].pairing_condition >= 1.0);
  CHECK(r.report.text().find("pairing condition number") != std::string::npos);
}

TEST_CASE("library errors become failed checks") {
  RunConfig c = config("calderon");
  c.shape = "file";
  c.mesh_path = (fresh_dir("missing") / "none.msh").string();
  c.out_dir = fresh_dir("missing_out");
  CHECK(run_command(c) == 1);
  CHECK(slurp(c.out_dir / "report.txt").find("FAIL run completed") != std::string::npos);
  std::filesystem::remove_all(c.out_dir);
}
