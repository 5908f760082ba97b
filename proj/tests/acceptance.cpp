// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "symcomp/compare.hpp"
#include "symcomp/parallel.hpp"
#include "symcomp/pipeline.hpp"

#ifndef SYMCOMP_CONFIG_DIR
#error "SYMCOMP_CONFIG_DIR must be defined"
#endif
#ifndef SYMCOMP_CLI
#error "SYMCOMP_CLI must be defined"
#endif

using namespace symcomp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
constexpr double pi = std::numbers::pi;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(4);
  o << x;
  return o.str();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void info(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

const std::vector<std::string> kShipped{"disk_equality", "square_robin",  "square_two_arc",        "ellipse_robin",
                                        "ellipse_two_arc", "lshape_robin", "lshape_two_arc",        "square_variable_source",
                                        "cap",           "sphere_quad",   "cone_smoke"};
const std::vector<std::string> kPlanar{"square_robin",  "square_two_arc", "ellipse_robin",
                                       "ellipse_two_arc", "lshape_robin", "lshape_two_arc"};

struct Run {
  RunResult result;
  double seconds = 0.0;
};

std::map<std::string, Run>& cache() {
  static std::map<std::string, Run> runs;
  return runs;
}

const Run& run_config(const std::string& name) {
  auto it = cache().find(name);
  if (it != cache().end()) return it->second;
  const RunConfig c = load_config(fs::path(SYMCOMP_CONFIG_DIR) / (name + ".json"));
  RunOptions o;
  o.write_artifacts = false;
  const auto t0 = Clock::now();
  Run r{run_pipeline(c, o), 0.0};
  r.seconds = seconds_since(t0);
  return cache().emplace(name, std::move(r)).first->second;
}

const CheckEntry* entry(const LevelResult& lv, const std::string& id) {
  for (const auto& e : lv.checks)
    if (e.id == id) return &e;
  return nullptr;
}

double disk_exact(Vec3 p) { return (1 - p.x * p.x - p.y * p.y) / 4 + 0.5; }

// 1
Outcome disk_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  const MeshPtr m = build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), 0.05);
  const PoissonSolution s = solve_poisson_robin(m, ScalarField::constant(m, 1.0), BoundaryField::constant(*m, 1.0));
  const double solve_time = seconds_since(t0);
  double err = 0.0;
  for (std::size_t i = 0; i < m->vertex_count(); ++i) err = std::max(err, std::abs(s.u.values[i] - disk_exact(m->vertices()[i])));
  const double rel = err / 0.75;
  const double l1 = field_stats(s.u).l1;
  const double l1_rel = std::abs(l1 - 5 * pi / 8) / (5 * pi / 8);
  o.require(rel <= 0.01, "Linf/max = " + fmt(rel));
  o.require(l1_rel <= 0.01, "L1 rel err = " + fmt(l1_rel));
  const Run& r = run_config("disk_equality");
  o.require(r.seconds <= 10.0, "runtime " + fmt(r.seconds) + " s");
  o.info("Linf/max " + fmt(rel) + ", L1 rel err " + fmt(l1_rel) + ", solve " + fmt(solve_time) + " s, full run " +
         fmt(r.seconds) + " s");
  return o;
}

// 2
Outcome equality_case() {
  Outcome o;
  const RunConfig c = load_config(fs::path(SYMCOMP_CONFIG_DIR) / "disk_equality.json");
  RunOptions opt;
  opt.write_artifacts = false;
  opt.refinements = 3;
  const RunResult r = run_pipeline(c, opt);
  std::vector<double> gaps;
  for (const auto& lv : r.levels) {
    const CheckEntry* e = entry(lv, "pointwise");
    if (!e) {
      o.require(false, "pointwise entry missing at level " + std::to_string(lv.level));
      return o;
    }
    o.require(std::abs(e->margin) <= e->tolerance,
              "level " + std::to_string(lv.level) + " |margin| " + fmt(e->margin) + " > tol " + fmt(e->tolerance));
    o.require(e->max_gap <= e->tolerance, "level " + std::to_string(lv.level) + " max gap " + fmt(e->max_gap) + " > tol");
    gaps.push_back(e->max_gap);
  }
  std::string orders;
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    const double order = std::log2(gaps[k - 1] / gaps[k]);
    o.require(order >= 1.0, "order " + fmt(order) + " at step " + std::to_string(k));
    orders += (k > 1 ? "," : "") + fmt(order);
  }
  o.require(r.equality_within_tolerance, "equality not flagged");
  o.info("max |mu_u - mu_v| " + fmt(gaps.front()) + " -> " + fmt(gaps.back()) + ", orders " + orders);
  return o;
}

// 3
Outcome cap_oracle() {
  Outcome o;
  const Run& r = run_config("cap");
  const LevelResult& lv = r.result.levels.back();
  const double exact = std::tan(pi / 6) - 2 * std::log(std::cos(pi / 6));
  const double rel = std::abs(lv.u.max - exact) / exact;
  o.require(std::abs(exact - 0.86503) < 5e-6, "radial oracle " + fmt(exact));
  o.require(rel <= 0.015, "pole rel err " + fmt(rel));
  const CheckEntry* l1 = entry(lv, "l1");
  o.require(l1 && std::abs(l1->margin) <= l1->tolerance, "L1 margin not within tol");
  if (l1) o.info("pole " + fmt(lv.u.max) + " vs " + fmt(exact) + ", L1 margin " + fmt(l1->margin) + " tol " + fmt(l1->tolerance));
  return o;
}

// 4
Outcome theorem11() {
  Outcome o;
  for (const auto& name : kPlanar) {
    const Run& r = run_config(name);
    const CheckEntry* e = entry(r.result.levels.back(), "l1");
    if (!e) {
      o.require(false, name + " l1 missing");
      continue;
    }
    o.require(e->margin > e->tolerance, name + " margin " + fmt(e->margin) + " <= tol " + fmt(e->tolerance));
    o.require(r.seconds <= 60.0, name + " runtime " + fmt(r.seconds) + " s");
    o.info(name + " " + fmt(e->margin) + "/" + fmt(e->tolerance) + " (" + fmt(r.seconds) + " s)");
  }
  return o;
}

// 5
Outcome theorem12() {
  Outcome o;
  for (const auto& name : kPlanar) {
    const Run& r = run_config(name);
    const LevelResult& lv = r.result.levels.back();
    const CheckEntry* e = entry(lv, "pointwise");
    if (!e) {
      o.require(false, name + " pointwise missing");
      continue;
    }
    o.require(e->margin >= -e->tolerance, name + " margin " + fmt(e->margin));
    o.info(name + " " + fmt(e->margin));
  }
  // the ladder itself, recomputed here on one case: every one of the 64 levels
  const RunConfig c = load_config(fs::path(SYMCOMP_CONFIG_DIR) / "square_robin.json");
  const LevelProblem p = build_levels(c, 1).front();
  const PoissonSolution s = solve_poisson_robin(p.mesh, p.f, p.beta);
  const FieldStats st = field_stats(s.u);
  const double R0 = std::sqrt(p.mesh->area() / pi);
  const RadialSolution v = solve_radial(RadialProfile(Manifold::plane(), 2, {0.0, R0}, {1.0, 1.0}), Manifold::plane(), 2,
                                        R0, beta_bar(p.beta, *p.mesh, Manifold::plane()));
  const std::vector<double> ladder = level_ladder(st.boundary_min, st.max);
  int bad = 0;
  const ToleranceModel tol{ToleranceModel::kDefaultConstant, 1.0, c.h};
  for (double t : ladder)
    if (superlevel_measure_of(s.u, t) - v.profile.superlevel_measure(t) > tol(p.mesh->area())) ++bad;
  o.require(ladder.size() == 64 && bad == 0, std::to_string(bad) + " ladder levels violate on square_robin");
  return o;
}

// 6
Outcome lemma32() {
  Outcome o;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& name : kShipped) {
    const CheckEntry* e = entry(run_config(name).result.levels.back(), "min");
    if (!e) {
      o.require(false, name + " min missing");
      continue;
    }
    o.require(e->margin >= -e->tolerance, name + " margin " + fmt(e->margin));
    worst = std::min(worst, e->margin / std::max(e->tolerance, 1e-300));
  }
  o.info(std::to_string(kShipped.size()) + " configs, worst margin/tol " + fmt(worst));
  return o;
}

// 7
Outcome lemma31() {
  Outcome o;
  int checked = 0;
  for (const auto& name : kShipped) {
    const LevelResult& lv = run_config(name).result.levels.back();
    for (const char* id : {"level", "level_identity"}) {
      const CheckEntry* e = entry(lv, id);
      if (!e) continue;  // skipped for variable sources
      ++checked;
      const bool ok = std::string(id) == "level" ? e->margin >= -e->tolerance : std::abs(e->margin) <= e->tolerance;
      o.require(ok, name + " " + id + " margin " + fmt(e->margin));
    }
  }
  // equality rows of the disk for tau >= v0
  const MeshPtr m = build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), 0.05);
  const BoundaryField beta = BoundaryField::constant(*m, 1.0);
  const PoissonSolution s = solve_poisson_robin(m, ScalarField::constant(m, 1.0), beta);
  const FieldStats st = field_stats(s.u);
  const double R0 = std::sqrt(m->area() / pi);
  const RadialSolution v = solve_radial(RadialProfile(Manifold::plane(), 2, {0.0, R0}, {1.0, 1.0}), Manifold::plane(), 2,
                                        R0, beta_bar(beta, *m, Manifold::plane()));
  const ToleranceModel tol{ToleranceModel::kDefaultConstant, 1.0, 0.05};
  const auto res = verify_level_inequality(s.u, beta, 1.0, 1.0, Manifold::plane(), level_ladder(st.boundary_min, st.max), tol);
  double worst = 0.0;
  int rows = 0;
  for (const auto& row : res.rows)
    if (row.tau >= v.v0) {
      worst = std::max(worst, std::abs(row.rhs_tight - row.lhs));
      ++rows;
    }
  o.require(rows > 0 && worst <= res.tight.tolerance, "disk equality gap " + fmt(worst));
  o.info(std::to_string(checked) + " entries; disk equality max gap " + fmt(worst) + " over " + std::to_string(rows) +
         " levels, tol " + fmt(res.tight.tolerance));
  return o;
}

// 8
Outcome isoperimetric() {
  Outcome o;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& name : kShipped) {
    const CheckEntry* e = entry(run_config(name).result.levels.back(), "isoperimetric");
    if (!e) {
      o.require(false, name + " isoperimetric missing");
      continue;
    }
    o.require(e->margin >= -e->tolerance, name + " margin " + fmt(e->margin) + " tol " + fmt(e->tolerance));
    worst = std::min(worst, e->margin / e->tolerance);
  }
  o.info("worst margin/tol " + fmt(worst));
  return o;
}

double uniform01(std::mt19937_64& rng) { return std::ldexp(double(rng() >> 11), -53); }

// 9
Outcome rearrangement() {
  Outcome o;
  // single triangle with vertex values (0, 0, 1)
  const auto tri = std::make_shared<const Mesh>(Manifold::plane(), std::vector<Vec3>{{0, 0, 0}, {2, 0, 0}, {0.5, 1.5, 0}},
                                                std::vector<std::array<int, 3>>{{0, 1, 2}},
                                                std::vector<std::array<int, 2>>{{0, 1}, {1, 2}, {2, 0}}, 1.0);
  const double A = 0.5 * 2 * 1.5;
  std::vector<double> levels;
  for (int k = 0; k <= 200; ++k) levels.push_back(k / 200.0);
  const DistributionData d = distribution_function(ScalarField(tri, {0.0, 0.0, 1.0}), levels);
  double tri_err = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) tri_err = std::max(tri_err, std::abs(d.mu[k] - A * std::pow(1 - levels[k], 2)));
  o.require(tri_err <= 1e-12, "triangle error " + fmt(tri_err));

  // equimeasurability on the L-shape, theta = 1 and 0.75
  const MeshPtr l = build_mesh(shape::Polygon{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}}, Manifold::plane(), 0.05);
  const ScalarField u = ScalarField::interpolate(l, [](Vec3 p) { return 1 + p.x * p.y + 0.3 * std::sin(4 * p.x); });
  const auto star = std::make_shared<RearrangedProfile>(decreasing_rearrangement(distribution_function(u)));
  const FieldStats st = field_stats(u);
  double eq = 0.0;
  eq = std::max(eq, std::abs(star->integral(0, star->total(), [](double x) { return x; }) - st.l1) / st.l1);
  eq = std::max(eq, std::abs(star->integral(0, star->total(), [](double x) { return x * x; }) - st.l2 * st.l2) / (st.l2 * st.l2));
  for (double theta : {1.0, 0.75}) {
    const RadialProfile sh = schwarz_profile(star, theta, Manifold::plane());
    eq = std::max(eq, std::abs(theta * sh.ball_integral([](double x) { return x; }) - st.l1) / st.l1);
    eq = std::max(eq, std::abs(theta * sh.ball_integral([](double x) { return x * x; }) - st.l2 * st.l2) / (st.l2 * st.l2));
  }
  o.require(eq <= 1e-6, "equimeasurability rel err " + fmt(eq));

  // Hardy-Littlewood on 50 white-noise pairs
  const MeshPtr sq = build_mesh(shape::Polygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}, Manifold::plane(), 0.1);
  std::mt19937_64 rng(20240601);
  double hl = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 50; ++k) {
    std::vector<double> a(sq->vertex_count()), b(sq->vertex_count());
    for (auto& x : a) x = uniform01(rng);
    for (auto& x : b) x = uniform01(rng);
    hl = std::min(hl, hardy_littlewood_check(ScalarField(sq, a), ScalarField(sq, b)).margin);
  }
  o.require(hl >= -1e-8, "Hardy-Littlewood margin " + fmt(hl));
  o.info("triangle err " + fmt(tri_err) + ", equimeasurability rel err " + fmt(eq) + ", min HL margin " + fmt(hl));
  return o;
}

// 10
Outcome concentration() {
  Outcome o;
  std::mt19937_64 rng(7);
  int agree = 0, negative = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(10), meas(10);
    for (int i = 0; i < 10; ++i) {
      meas[i] = 0.05 + uniform01(rng);
      // even trials: a two-cell spike; odd trials: nearly flat
      v[i] = trial % 2 == 0 ? (i > 1 ? 0.02 * uniform01(rng) : uniform01(rng)) : 0.8 + 0.2 * uniform01(rng);
    }
    double total = 0, mass = 0;
    for (int i = 0; i < 10; ++i) total += meas[i], mass += v[i] * meas[i];
    double brute = 0.0;  // E = empty set
    for (unsigned mask = 1; mask < 1024; ++mask) {
      double s = 0, fs = 0;
      for (int i = 0; i < 10; ++i)
        if (mask >> i & 1u) s += meas[i], fs += v[i] * meas[i];
      brute = std::min(brute, std::cbrt(s / total) * mass - fs);
    }
    const double bath = std::min(0.0, concentration_check(piecewise_constant_rearrangement(v, meas), 3, total).margin);
    const bool same = (brute < -1e-12) == (bath < -1e-12) && std::abs(brute - bath) <= 1e-12;
    agree += same;
    negative += brute < -1e-12;
  }
  o.require(agree == 20, std::to_string(agree) + "/20 agree");
  o.info(std::to_string(agree) + "/20 verdicts agree, " + std::to_string(negative) + " sources violate");
  return o;
}

// 11
Outcome cone() {
  Outcome o;
  const Run& r = run_config("cone_smoke");
  const LevelResult& lv = r.result.levels.back();
  for (const char* id : {"l1", "min"}) {
    const CheckEntry* e = entry(lv, id);
    o.require(e && e->margin >= -e->tolerance, std::string(id) + " margin");
    if (e) o.info(std::string(id) + " " + fmt(e->margin) + " tol " + fmt(e->tolerance));
  }
  bool flagged = false;
  for (const auto& n : r.result.notes) flagged = flagged || n.find("smoke test only") != std::string::npos;
  o.require(flagged, "cone note missing");
  o.info("theta " + fmt(lv.theta));
  return o;
}

// 12
Outcome determinism() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / "symcomp_acceptance_selftest";
  fs::remove_all(base);
  std::vector<std::string> reports;
  double longest = 0.0;
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = base / std::to_string(k);
    const std::string cmd = std::string("\"") + SYMCOMP_CLI + "\" selftest --out \"" + dir.string() + "\" > \"" +
                            (base.string() + "_log" + std::to_string(k)) + "\" 2>&1";
    const auto t0 = Clock::now();
    const int rc = std::system(cmd.c_str());
    longest = std::max(longest, seconds_since(t0));
    o.require(rc == 0, "selftest run " + std::to_string(k) + " exit " + std::to_string(rc));
    std::ifstream in(dir / "selftest.json", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    reports.push_back(ss.str());
  }
  o.require(!reports[0].empty() && reports[0] == reports[1], "reports differ");
  o.require(longest <= 300.0, "selftest took " + fmt(longest) + " s");
  o.info("identical " + std::to_string(reports[0].size()) + "-byte reports, slowest run " + fmt(longest) + " s");
  fs::remove_all(base);
  fs::remove(base.string() + "_log0");
  fs::remove(base.string() + "_log1");
  return o;
}

}  // namespace

int main() {
  parallel::configure_from_env();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"disk oracle", disk_oracle},
      {"equality case convergence", equality_case},
      {"sphere cap oracle", cap_oracle},
      {"L1 comparison on planar domains", theorem11},
      {"distribution comparison on planar domains", theorem12},
      {"boundary minima", lemma32},
      {"integrated level inequality", lemma31},
      {"isoperimetric check", isoperimetric},
      {"rearrangement exactness", rearrangement},
      {"concentration brute force", concentration},
      {"cone smoke test", cone},
      {"selftest determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    const auto t0 = Clock::now();
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    failed += !out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " [" << fmt(seconds_since(t0))
              << " s]: " << out.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
