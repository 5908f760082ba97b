// symcomp: configuration-driven comparison runs.
//
//   symcomp run <config.json> [--out DIR] [--tol-scale X] [--serial]
//   symcomp convergence <config.json> --levels K [--out DIR] [--tol-scale X]
//   symcomp mesh <config.json> [--out FILE] [--level K]
//   symcomp selftest [--out DIR] [--seed N]
//
// Exit codes: 0 pass, 1 error, 2 check violation.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "symcomp/mesh_io.hpp"
#include "symcomp/parallel.hpp"
#include "symcomp/pipeline.hpp"
#include "symcomp/selftest.hpp"

namespace {

void print_summary(const symcomp::RunResult& res) {
  const auto& last = res.levels.back();
  std::printf("%-24s %-24s %14s %12s  %s\n", "check", "verdict", "margin", "tolerance", "order");
  for (const auto& v : res.verdicts) {
    char order[32] = "";
    if (v.order) std::snprintf(order, sizeof order, "%.2f", *v.order);
    std::printf("%-24s %-24s %14.6e %12.4e  %s\n", v.id.c_str(), symcomp::to_string(v.verdict).c_str(), v.margin,
                v.tolerance, order);
  }
  for (const auto& s : last.skipped) std::printf("%-24s skipped: %s\n", s.id.c_str(), s.reason.c_str());
  for (const auto& n : res.notes) std::printf("note: %s\n", n.c_str());
  if (res.equality_within_tolerance)
    std::printf("equality within tolerance (numerical only; isometry is not inferred)\n");
  std::printf("status: %s\n", res.violated ? "violation" : "pass");
}

void print_convergence(const symcomp::RunResult& res) {
  std::printf("%5s %10s %9s %14s %14s %14s\n", "level", "h", "vertices", "oracle_linf", "l1 margin", "pw margin");
  for (const auto& lv : res.levels) {
    double l1 = 0.0, pw = 0.0;
    for (const auto& e : lv.checks) {
      if (e.id == "l1") l1 = e.margin;
      if (e.id == "pointwise") pw = e.margin;
    }
    std::printf("%5d %10.5f %9zu %14.6e %14.6e %14.6e\n", lv.level, lv.h, lv.vertices,
                lv.oracle_linf ? *lv.oracle_linf : 0.0 / 0.0, l1, pw);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Talenti-type comparison of Robin problems on planes, spheres and cones"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  double tol_scale = 0.0;
  bool serial = false;
  int levels = 0, mesh_level = 0;
  std::uint64_t seed = 20240601;

  auto* run = app.add_subcommand("run", "solve, symmetrize and verify one configuration");
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (default: the config's output)");
  run->add_option("--tol-scale", tol_scale, "multiplier for the tolerance model")->check(CLI::PositiveNumber);
  run->add_flag("--serial", serial, "use the serial reference kernels");

  auto* conv = app.add_subcommand("convergence", "refinement study with empirical orders");
  conv->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  conv->add_option("--levels", levels, "number of uniform refinements (>= 2)")->required();
  conv->add_option("--out", out_dir, "output directory");
  conv->add_option("--tol-scale", tol_scale, "multiplier for the tolerance model")->check(CLI::PositiveNumber);

  auto* mesh = app.add_subcommand("mesh", "generate and export the mesh of a configuration");
  mesh->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  mesh->add_option("--out", out_dir, "mesh file (default: <output>/mesh.txt)");
  mesh->add_option("--level", mesh_level, "refinement level")->check(CLI::Range(0, 5));

  auto* self = app.add_subcommand("selftest", "run the built-in invariant suite");
  self->add_option("--out", out_dir, "directory for selftest.json (default: current directory)");
  self->add_option("--seed", seed, "seed for the randomized suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const int workers = symcomp::parallel::configure_from_env();

  try {
    if (*run || *conv) {
      symcomp::RunConfig cfg = symcomp::load_config(config_path);
      symcomp::RunOptions opt;
      opt.log = &std::cerr;
      if (!out_dir.empty()) opt.output = out_dir;
      if (tol_scale > 0.0) opt.tol_scale = tol_scale;
      if (serial) opt.backend = symcomp::Backend::serial;
      if (*conv) {
        if (levels < 2) throw std::invalid_argument("convergence: --levels must be >= 2");
        if (levels > 5) throw std::invalid_argument("convergence: --levels must be <= 5");
        opt.refinements = levels;
      }
      std::cerr << cfg.name << ": " << workers << " worker(s)\n";
      const symcomp::RunResult res = symcomp::run_pipeline(cfg, opt);
      if (*conv) print_convergence(res);
      print_summary(res);
      return symcomp::exit_code(res);
    }
    if (*mesh) {
      symcomp::RunConfig cfg = symcomp::load_config(config_path);
      const auto lv = symcomp::build_levels(cfg, mesh_level + 1).back();
      std::filesystem::path path = out_dir.empty() ? cfg.output / "mesh.txt" : std::filesystem::path(out_dir);
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      symcomp::write_mesh_file(path.string(), *lv.mesh, lv.beta);
      std::printf("%s: %zu vertices, %zu triangles, %zu boundary edges, min angle %.2f deg, max edge %.4g\n",
                  path.string().c_str(), lv.mesh->vertex_count(), lv.mesh->triangle_count(), lv.mesh->boundary().size(),
                  lv.mesh->min_angle_degrees(), lv.mesh->max_edge_length());
      return 0;
    }
    if (*self) {
      const symcomp::SelftestResult st = symcomp::run_selftest(seed, &std::cerr);
      const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(out_dir);
      std::filesystem::create_directories(dir);
      symcomp::write_selftest_report(st, dir / "selftest.json");
      for (const auto& c : st.cases) std::printf("%s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str());
      std::printf("selftest: %zu/%zu passed\n", st.passed_count(), st.cases.size());
      return st.all_passed() ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
