#include <iostream>

#include "CLI11.hpp"
#include "bemalg/drivers.hpp"
#include "bemalg/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Galerkin boundary element experiments"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  bemalg::RunConfig config;
  double k = 0.0, n = 0.0, tol = 0.0;
  std::string out_dir = "out";

  const std::vector<std::pair<std::string, std::string>> commands{
      {"dirichlet", "Dirichlet problem, plain and hypersingular preconditioned"},
      {"hyp-bench", "Hypersingular operator by direct, projection and single layer assembly"},
      {"calderon", "Calderon projector: double application, singular values, eigenvalues"},
      {"transmission", "Calderon preconditioned acoustic transmission problem"},
      {"fig1", "Single layer of a constant and the hypersingular operator applied to it"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--shape", config.shape, "sphere, cube or file")->check(CLI::IsMember({"sphere", "cube", "file"}));
    s->add_option("--level", config.levels, "sphere refinement levels")->delimiter(',');
    s->add_option("--h", config.hs, "cube element sizes")->delimiter(',');
    s->add_option("--mesh", config.mesh_path, "Gmsh MSH 2.2 file for shape 'file'");
    s->add_option("--k", k, "wavenumber");
    s->add_option("--n", n, "refractive index (transmission)");
    s->add_option("--tol", tol, "GMRES relative tolerance");
    s->add_option("--quad-order", config.quad_order, "quadrature order");
    s->add_option("--out", out_dir, "output directory");
    s->add_flag("--use-strong-form", config.use_strong_form, "solve with strong forms");
    if (name == "calderon") s->add_option("--side", config.side, "interior or exterior projector");
    if (name == "calderon" || name == "transmission") s->add_option("--spaces", config.recipe, "dual or p1");
    if (name == "transmission") s->add_option("--slice-points", config.slice_points, "slice points per axis");
    subs.push_back(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  for (CLI::App* s : subs) {
    if (!s->parsed()) continue;
    config.command = s->get_name();
    if (s->count("--k")) config.k = k;
    if (s->count("--n")) config.n = n;
    if (s->count("--tol")) config.tol = tol;
  }
  config.out_dir = out_dir;

  try {
    return bemalg::run_command(config);
  } catch (const bemalg::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
