#include "symcomp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "symcomp/expression.hpp"
#include "symcomp/mesh_io.hpp"
#include "symcomp/radial.hpp"
#include "symcomp/rearrange.hpp"
#include "symcomp/svg.hpp"

namespace symcomp {

using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string g17(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string describe_source(const SourceSpec& s) {
  switch (s.kind) {
    case SourceSpec::Kind::constant: return "constant " + g17(s.value);
    case SourceSpec::Kind::expression: return "expression " + s.expression;
    case SourceSpec::Kind::file: return "file " + s.file.filename().string();
  }
  return "?";
}

std::string describe_beta(const BetaSpec& b) {
  switch (b.kind) {
    case BetaSpec::Kind::constant: return "constant " + g17(b.value);
    case BetaSpec::Kind::arcs: {
      std::string s = "arcs";
      for (const auto& a : b.arcs) s += " [" + g17(a.from) + "," + g17(a.to) + ")=" + g17(a.value);
      return s + " default " + g17(b.default_value);
    }
    case BetaSpec::Kind::file: return "file " + b.file.filename().string();
  }
  return "?";
}

double arc_beta(const BetaSpec& spec, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("beta.arcs: mesh carries no boundary parameters");
  for (const auto& a : spec.arcs) {
    const bool inside = a.from < a.to ? (t >= a.from && t < a.to) : (t >= a.from || t < a.to);
    if (inside) return a.value;
  }
  return spec.default_value;
}

ScalarField make_source(const RunConfig& c, const MeshPtr& mesh, const std::vector<double>& nodal) {
  switch (c.source.kind) {
    case SourceSpec::Kind::constant: return ScalarField::constant(mesh, c.source.value);
    case SourceSpec::Kind::expression: {
      const Expression e = Expression::parse(c.source.expression);
      const Domain& dom = *mesh->domain();
      std::vector<double> vals(mesh->vertex_count());
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const Vec3 p = mesh->vertices()[i];
        vals[i] = e({p.x, p.y, p.z, dom.distance_from_center(p)});
        if (!std::isfinite(vals[i]))
          throw std::invalid_argument("source.expression: non-finite value at vertex " + std::to_string(i));
      }
      return ScalarField(mesh, std::move(vals));
    }
    case SourceSpec::Kind::file: return ScalarField(mesh, nodal);
  }
  throw std::logic_error("source kind");
}

BoundaryField make_beta(const RunConfig& c, const Mesh& mesh, const std::vector<double>& per_edge) {
  switch (c.beta.kind) {
    case BetaSpec::Kind::constant: return BoundaryField::constant(mesh, c.beta.value);
    case BetaSpec::Kind::arcs:
      return BoundaryField::sample(mesh, [&](double t, Vec3) { return arc_beta(c.beta, t); });
    case BetaSpec::Kind::file: return BoundaryField{per_edge};
  }
  throw std::logic_error("beta kind");
}

bool is_constant(const std::vector<double>& v) {
  for (double x : v)
    if (x != v.front()) return false;
  return !v.empty();
}

/// Radius of the domain as a geodesic ball about its center, when it is one.
std::optional<double> ball_radius(const DomainSpec& spec) {
  if (auto d = std::get_if<shape::Disk>(&spec)) return d->radius;
  if (auto c = std::get_if<shape::SphericalCap>(&spec)) return c->radius;
  if (auto c = std::get_if<shape::ConeDisk>(&spec)) return c->radius;
  return std::nullopt;
}

// Per-level artifacts kept for output at the finest level.
struct LevelData {
  ScalarField u;
  ScalarField f;
  BoundaryField beta;
  DistributionData mu_u;
  std::shared_ptr<const RearrangedProfile> ustar, fstar;
  std::optional<RadialProfile> u_sharp, f_sharp;
  std::optional<RadialSolution> v;
  std::vector<LevelInequalityRow> level_rows;
};

bool wants(const RunConfig& c, const std::string& id) {
  for (const auto& k : c.checks)
    if (k == id) return true;
  return false;
}

LevelResult analyze(const RunConfig& c, const LevelProblem& lp, double tol_scale, const RunOptions& opt,
                    std::optional<LevelData>& keep) {
  const Mesh& mesh = *lp.mesh;
  const Manifold& m = c.manifold;
  LevelResult r;
  r.level = lp.level;
  r.h = mesh.h();
  r.vertices = mesh.vertex_count();
  r.triangles = mesh.triangle_count();
  r.area = mesh.area();
  r.boundary_length = mesh.boundary_length();
  r.theta = theta_of(m);
  const double theta = r.theta;
  const double kappa = m.kappa();
  ToleranceModel tol;
  tol.scale = tol_scale;
  tol.h = c.h / std::ldexp(1.0, lp.level);

  auto t0 = Clock::now();
  PoissonSolution sol = solve_poisson_robin(lp.mesh, lp.f, lp.beta, opt.backend);
  r.cg_iterations = sol.diagnostics.iterations;
  r.cg_residual = sol.diagnostics.relative_residual;
  r.warnings = sol.diagnostics.warnings;
  const ScalarField& u = sol.u;
  r.u = field_stats(u);
  if (opt.log) *opt.log << "  level " << lp.level << ": " << r.vertices << " vertices, solve " << seconds_since(t0) << " s\n";

  t0 = Clock::now();
  const double u0 = r.u.boundary_min;
  const std::vector<double> ladder = level_ladder(u0, r.u.max);
  // vertex values + uniform grid + the ladder, so every ladder level is tested exactly
  std::vector<double> grid = default_level_grid(u);
  grid.insert(grid.end(), ladder.begin(), ladder.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  LevelData d{u, lp.f, lp.beta, distribution_function(u, grid, opt.backend), nullptr, nullptr, {}, {}, {}, {}};
  d.ustar = std::make_shared<const RearrangedProfile>(decreasing_rearrangement(d.mu_u));
  const bool f_const = is_constant(lp.f.values);
  if (f_const) {
    const double val = lp.f.values.front(), area = mesh.area();
    d.fstar = std::make_shared<const RearrangedProfile>(piecewise_constant_rearrangement({&val, 1}, {&area, 1}));
  } else {
    d.fstar = std::make_shared<const RearrangedProfile>(decreasing_rearrangement(distribution_function(lp.f)));
  }
  d.u_sharp = schwarz_profile(d.ustar, theta, m);
  d.f_sharp = schwarz_profile(d.fstar, theta, m);
  r.R0 = inverse_ball_area(kappa, 2, mesh.area() / theta);
  r.beta_bar = beta_bar(lp.beta, mesh, m);
  d.v = solve_radial(*d.f_sharp, m, 2, r.R0, r.beta_bar);
  const RadialSolution& v = *d.v;
  r.v_center = v.profile.value(0.0);
  r.v0 = v.v0;
  r.v_l1 = v.profile.ball_integral([](double x) { return std::abs(x); });
  if (opt.log) *opt.log << "  level " << lp.level << ": symmetrization + radial solve " << seconds_since(t0) << " s\n";

  t0 = Clock::now();
  std::vector<double> interior;
  for (double t : ladder)
    if (t > u0 && t < r.u.max) interior.push_back(t);
  auto skip = [&](const std::string& id, const std::string& why) {
    if (wants(c, id)) r.skipped.push_back({id, why});
  };
  const std::string need_const = "requires a constant source term";

  if (wants(c, "positivity")) {
    CheckEntry e = inequality_entry("positivity", "positivity 0 <= min u", 0.0, r.u.min, tol(r.u.max));
    e.note = sol.diagnostics.min_on_boundary ? "minimum attained on the boundary" : "minimum attained in the interior";
    r.checks.push_back(e);
  }
  if (wants(c, "l1")) r.checks.push_back(verify_L1(r.u, v.profile, theta, mesh.area(), tol));
  if (f_const) {
    if (wants(c, "pointwise")) {
      const DistributionData mu_v = radial_distribution(v.profile, d.mu_u.levels);
      r.checks.push_back(verify_pointwise(d.mu_u, mu_v, theta, tol));
    }
    if (wants(c, "profile")) r.checks.push_back(verify_profile(*d.u_sharp, v.profile, tol));
  } else {
    skip("pointwise", need_const);
    skip("profile", need_const);
  }
  if (wants(c, "min")) r.checks.push_back(verify_min_comparison(u0, v.v0, tol));
  if (wants(c, "ordering")) r.checks.push_back(verify_ordering(u0, r.u.max, v.v0, r.v_center, tol));
  if (wants(c, "isoperimetric")) r.checks.push_back(verify_isoperimetric(u, interior, theta, m, tol));
  if (f_const) {
    if (wants(c, "level")) {
      LevelInequalityResult li = verify_level_inequality(u, lp.beta, lp.f.values.front(), theta, m, ladder, tol);
      r.checks.push_back(li.tight);
      r.checks.push_back(li.loose);
      d.level_rows = std::move(li.rows);
    }
    if (wants(c, "level_identity")) r.checks.push_back(verify_level_identity(v, lp.f.values.front(), ladder, tol));
  } else {
    skip("level", need_const);
    skip("level_identity", need_const);
  }
  if (wants(c, "theorem1_integrated"))
    r.checks.push_back(verify_theorem1_integrated(u, v, d.fstar->rescaled(theta), theta, ladder, tol));
  if (wants(c, "concentration")) {
    const ConcentrationResult cr = concentration_check(*d.fstar, 2, mesh.area());
    CheckEntry e = inequality_entry("concentration", "source concentration condition", 0.0, cr.margin, tol(1.0));
    e.at = cr.s_at_min;
    e.note = "vacuous in dimension 2";
    r.checks.push_back(e);
  }
  if (wants(c, "equimeasurability")) {
    const double ref = std::abs(r.u.integral);
    const double rhs1 = theta * d.u_sharp->ball_integral([](double x) { return x; });
    r.checks.push_back(identity_entry("equimeasurability", "equimeasurability int u = theta int u#", r.u.integral,
                                      rhs1, 1e-6 * ref));
    const double l2sq = r.u.l2 * r.u.l2;
    const double rhs2 = theta * d.u_sharp->ball_integral([](double x) { return x * x; });
    r.checks.push_back(identity_entry("equimeasurability_l2", "equimeasurability int u^2 = theta int (u#)^2", l2sq,
                                      rhs2, 1e-6 * l2sq));
  }
  if (wants(c, "hardy_littlewood")) {
    const HardyLittlewood hl = hardy_littlewood_check(lp.f, u);
    const double scale = std::abs(hl.rearranged) + 1e-300;
    r.checks.push_back(inequality_entry("hardy_littlewood", "Hardy-Littlewood int f u <= int f* u*", hl.direct,
                                        hl.rearranged, 1e-8 * scale));
    // seeded random smooth field; white noise would make every triangle
    // straddle most levels and the exact clipping quadratic in the mesh size
    std::mt19937_64 rng(c.seed);
    auto unit = [&] { return std::ldexp(static_cast<double>(rng() >> 11), -53); };
    double coef[4][5];
    for (auto& row : coef)
      for (double& x : row) x = unit();
    std::vector<double> g(mesh.vertex_count());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3 p = mesh.vertices()[i];
      double s = 1.0;
      for (const auto& k : coef) s += 0.2 * std::sin(6.0 * (k[0] - 0.5) * p.x + 6.0 * (k[1] - 0.5) * p.y + 6.0 * (k[2] - 0.5) * p.z + 6.3 * k[3]) * k[4];
      g[i] = s;
    }
    const HardyLittlewood hr = hardy_littlewood_check(ScalarField(lp.mesh, g), u);
    r.checks.push_back(inequality_entry("hardy_littlewood_random", "Hardy-Littlewood with a seeded random smooth field",
                                        hr.direct, hr.rearranged, 1e-8 * (std::abs(hr.rearranged) + 1e-300)));
  }
  if (wants(c, "monotonicity")) {
    const double worst = monotonicity_report(v.profile);
    r.checks.push_back(inequality_entry("monotonicity", "symmetrized solution is radially nonincreasing", worst, 0.0,
                                        tol(r.v_center / r.R0)));
  }
  if (wants(c, "oracle")) {
    const auto radius = ball_radius(c.domain);
    std::string why;
    if (!radius) why = "domain is not a geodesic ball";
    else if (!is_constant(lp.beta.values)) why = "beta is not constant";
    else if (c.source.kind == SourceSpec::Kind::file) why = "source is not given by a radial formula";
    else if (c.source.kind == SourceSpec::Kind::expression && !Expression::parse(c.source.expression).radial_only())
      why = "source depends on x, y or z";
    if (!why.empty()) {
      skip("oracle", why);
    } else {
      const Domain& dom = *mesh.domain();
      const int samples = 2049;
      std::vector<double> rr(samples), hv(samples);
      std::optional<Expression> ex;
      if (c.source.kind == SourceSpec::Kind::expression) ex = Expression::parse(c.source.expression);
      for (int i = 0; i < samples; ++i) {
        rr[i] = *radius * i / (samples - 1);
        hv[i] = ex ? (*ex)({0, 0, 0, rr[i]}) : c.source.value;
      }
      const Manifold own = m.kind() == ManifoldKind::sphere ? m : Manifold::plane();
      const RadialSolution oracle =
          solve_radial(RadialProfile(own, 2, rr, hv), own, 2, *radius, lp.beta.values.front());
      double err = 0.0;
      for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        const double rad = std::min(*radius, dom.distance_from_center(mesh.vertices()[i]));
        err = std::max(err, std::abs(u.values[i] - oracle.profile.value(rad)));
      }
      r.oracle_linf = err;
      CheckEntry e = identity_entry("oracle", "nodal error against the radial oracle", 0.0, err,
                                    0.01 * oracle.profile.value(0.0));
      e.note = "tolerance is 1% of the oracle maximum";
      r.checks.push_back(e);
    }
  }
  if (opt.log) *opt.log << "  level " << lp.level << ": checks " << seconds_since(t0) << " s\n";
  keep = std::move(d);
  return r;
}

ordered_json entry_json(const CheckEntry& e) {
  ordered_json j;
  j["id"] = e.id;
  j["name"] = e.name;
  j["lhs"] = e.lhs;
  j["rhs"] = e.rhs;
  j["margin"] = e.margin;
  j["tolerance"] = e.tolerance;
  j["verdict"] = to_string(e.verdict);
  j["at"] = std::isfinite(e.at) ? ordered_json(e.at) : ordered_json(nullptr);
  j["max_gap"] = std::isfinite(e.max_gap) ? ordered_json(e.max_gap) : ordered_json(nullptr);
  j["note"] = e.note;
  return j;
}

ordered_json manifold_json(const Manifold& m) {
  ordered_json j;
  j["kind"] = to_string(m.kind());
  j["kappa"] = m.kappa();
  j["fraction"] = m.cone_fraction();
  return j;
}

// Quantity whose decay gives the empirical order: the largest gap when the
// check tracks one (the worst margin may sit where both sides agree exactly).
double convergence_measure(const CheckEntry& e) { return std::isfinite(e.max_gap) ? e.max_gap : std::abs(e.margin); }

std::string convergence_svg(const RunResult& res) {
  std::map<std::string, svg::Series> by_id;
  std::vector<std::string> order;
  for (const auto& lv : res.levels)
    for (const auto& e : lv.checks) {
      if (e.id.rfind("equimeasurability", 0) == 0 || e.id.rfind("hardy_littlewood", 0) == 0 || e.id == "oracle" ||
          e.id == "concentration" || e.id == "positivity")
        continue;
      if (!by_id.count(e.id)) order.push_back(e.id);
      auto& s = by_id[e.id];
      s.label = (std::isfinite(e.max_gap) ? "max gap " : "|margin| ") + e.id;
      s.markers = true;
      s.x.push_back(lv.h);
      s.y.push_back(convergence_measure(e));
    }
  std::vector<svg::Series> series;
  for (const auto& id : order) series.push_back(by_id[id]);
  svg::Series oracle{"oracle L-inf error", {}, {}, true, true};
  svg::Series tol{"tol(h) for l1", {}, {}, true, false};
  for (const auto& lv : res.levels) {
    if (lv.oracle_linf) {
      oracle.x.push_back(lv.h);
      oracle.y.push_back(*lv.oracle_linf);
    }
    for (const auto& e : lv.checks)
      if (e.id == "l1") {
        tol.x.push_back(lv.h);
        tol.y.push_back(e.tolerance);
      }
  }
  if (!oracle.x.empty()) series.push_back(oracle);
  if (!tol.x.empty()) series.push_back(tol);
  return svg::line_chart(series, {"convergence", "h", "value", true, true, 720, 480});
}

void write_artifacts(const RunConfig& c, const RunResult& res, const LevelProblem& lp, const LevelData& d,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Mesh& mesh = *lp.mesh;
  const double theta = res.levels.back().theta;
  write_mesh_file((dir / "mesh.txt").string(), mesh, lp.beta);

  std::ostringstream sol;
  sol << "index,x,y,z,f,u\n";
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const Vec3 p = mesh.vertices()[i];
    sol << i << ',' << g17(p.x) << ',' << g17(p.y) << ',' << g17(p.z) << ',' << g17(d.f.values[i]) << ','
        << g17(d.u.values[i]) << '\n';
  }
  write_text(dir / "solution.csv", sol.str());

  const RadialProfile& vp = d.v->profile;
  std::ostringstream dist;
  dist << "t,mu_u,theta_mu_v\n";
  std::vector<double> mv;
  for (std::size_t i = 0; i < d.mu_u.levels.size(); ++i) {
    mv.push_back(theta * vp.superlevel_measure(d.mu_u.levels[i]));
    dist << g17(d.mu_u.levels[i]) << ',' << g17(d.mu_u.mu[i]) << ',' << g17(mv.back()) << '\n';
  }
  write_text(dir / "distribution.csv", dist.str());

  std::ostringstream rad;
  rad << "r,u_sharp,v,f_sharp\n";
  std::vector<double> rs, us, vs;
  for (double r : vp.r()) {
    rs.push_back(r);
    us.push_back(d.u_sharp->value(std::min(r, d.u_sharp->R0())));
    vs.push_back(vp.value(r));
    rad << g17(r) << ',' << g17(us.back()) << ',' << g17(vs.back()) << ','
        << g17(d.f_sharp->value(std::min(r, d.f_sharp->R0()))) << '\n';
  }
  write_text(dir / "radial.csv", rad.str());

  if (!d.level_rows.empty()) {
    std::ostringstream li;
    li << "tau,theta_tau,rhs_tight,rhs_loose\n";
    for (const auto& row : d.level_rows)
      li << g17(row.tau) << ',' << g17(row.lhs) << ',' << g17(row.rhs_tight) << ',' << g17(row.rhs_loose) << '\n';
    write_text(dir / "level_inequality.csv", li.str());
  }

  write_text(dir / "report.json", res.report.dump(2) + "\n");
  write_text(dir / "report.csv", report_csv(res));

  write_text(dir / "mu.svg",
             svg::line_chart({{"mu_u(t)", d.mu_u.levels, d.mu_u.mu, false, false},
                              {"theta mu_v(t)", d.mu_u.levels, mv, true, false}},
                             {c.name + ": distribution functions", "t", "measure", false, false, 640, 420}));
  write_text(dir / "profiles.svg", svg::line_chart({{"u#(r)", rs, us, false, false}, {"v(r)", rs, vs, true, false}},
                                                   {c.name + ": radial profiles", "r", "value", false, false, 640, 420}));
  if (res.levels.size() >= 2) {
    write_text(dir / "convergence.svg", convergence_svg(res));
    std::ostringstream cv;
    cv << "level,h,vertices,check,margin,tolerance,measure,order\n";
    std::map<std::string, double> prev;
    struct Row {
      std::string id;
      double margin, tolerance, measure;
    };
    for (const auto& lv : res.levels) {
      std::vector<Row> rows;
      for (const auto& e : lv.checks)
        if (e.id != "oracle") rows.push_back({e.id, e.margin, e.tolerance, convergence_measure(e)});
      if (lv.oracle_linf) rows.push_back({"oracle_linf", *lv.oracle_linf, 0.0, *lv.oracle_linf});
      for (const auto& row : rows) {
        std::string order;
        if (auto it = prev.find(row.id); it != prev.end() && it->second != 0.0 && row.measure != 0.0)
          order = g17(std::log2(it->second / row.measure));
        cv << lv.level << ',' << g17(lv.h) << ',' << lv.vertices << ',' << row.id << ',' << g17(row.margin) << ','
           << g17(row.tolerance) << ',' << g17(row.measure) << ',' << order << '\n';
        prev[row.id] = row.measure;
      }
    }
    write_text(dir / "convergence.csv", cv.str());
  }
}

}  // namespace

std::vector<LevelProblem> build_levels(const RunConfig& c, int count) {
  if (count < 1) throw std::invalid_argument("build_levels: need at least one level");
  auto domain = make_domain(c.domain, c.manifold);
  MeshPtr mesh = build_mesh(domain, c.h);

  std::vector<double> f_nodal, beta_edges;
  if (c.source.kind == SourceSpec::Kind::file) {
    f_nodal = read_number_file(c.source.file);
    if (f_nodal.size() != mesh->vertex_count())
      throw ConfigError("source.file", "expected " + std::to_string(mesh->vertex_count()) + " values (one per base-mesh vertex), found " +
                                           std::to_string(f_nodal.size()));
  }
  if (c.beta.kind == BetaSpec::Kind::file) {
    beta_edges = read_number_file(c.beta.file);
    if (beta_edges.size() != mesh->boundary().size())
      throw ConfigError("beta.file", "expected " + std::to_string(mesh->boundary().size()) +
                                         " values (one per base-mesh boundary edge), found " + std::to_string(beta_edges.size()));
  }

  std::vector<LevelProblem> out;
  for (int k = 0; k < count; ++k) {
    if (k > 0) {
      std::vector<std::array<int, 2>> parents;
      mesh = refine(*mesh, &parents);
      if (!f_nodal.empty()) {
        std::vector<double> next(parents.size());
        for (std::size_t i = 0; i < parents.size(); ++i) next[i] = 0.5 * (f_nodal[parents[i][0]] + f_nodal[parents[i][1]]);
        f_nodal = std::move(next);
      }
      if (!beta_edges.empty()) {
        std::vector<double> next;
        for (double b : beta_edges) next.insert(next.end(), {b, b});
        beta_edges = std::move(next);
      }
    }
    LevelProblem lp{k, mesh, make_source(c, mesh, f_nodal), make_beta(c, *mesh, beta_edges)};
    try {
      lp.beta.validate(*mesh);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("beta", e.what());
    }
    for (double x : lp.f.values)
      if (x < 0.0) throw ConfigError("source", "source term must be nonnegative");
    out.push_back(std::move(lp));
  }
  return out;
}

RunResult run_pipeline(const RunConfig& c, const RunOptions& opt) {
  const int refinements = opt.refinements.value_or(c.refinements);
  if (refinements < 0 || refinements > 5) throw ConfigError("mesh.refinements", "must lie in [0, 5]");
  const double tol_scale = opt.tol_scale.value_or(c.tol_scale);
  if (!(tol_scale > 0.0)) throw ConfigError("tolerance.scale", "must be > 0");

  auto t0 = Clock::now();
  std::vector<LevelProblem> problems = build_levels(c, refinements + 1);
  if (opt.log) *opt.log << "meshes built in " << seconds_since(t0) << " s\n";

  RunResult res;
  if (c.manifold.kind() == ManifoldKind::cone)
    res.notes.push_back(
        "flat cone: the metric is singular at the apex (outside the domain); this case lies beyond the smoothness "
        "hypotheses of the comparison theorems and is a smoke test only");
  std::optional<LevelData> finest;
  for (const auto& lp : problems) res.levels.push_back(analyze(c, lp, tol_scale, opt, finest));

  // verdicts across levels
  const LevelResult& last = res.levels.back();
  const LevelResult* prev = res.levels.size() >= 2 ? &res.levels[res.levels.size() - 2] : nullptr;
  for (const auto& e : last.checks) {
    FinalVerdict fv{e.id, e.name, e.verdict, e.margin, e.tolerance, std::nullopt, e.note};
    if (prev)
      for (const auto& pe : prev->checks)
        if (pe.id == e.id) {
          const double a = convergence_measure(pe), b = convergence_measure(e);
          if (a != 0.0 && b != 0.0) fv.order = std::log2(a / b);
          if (e.verdict == Verdict::violated && pe.verdict != Verdict::violated) {
            fv.verdict = Verdict::holds_within_tolerance;
            fv.note = "beyond tolerance at the finest level only; not confirmed by two consecutive levels";
          }
        }
    res.violated = res.violated || fv.verdict == Verdict::violated;
    res.verdicts.push_back(fv);
  }
  {
    bool any = false, all = true;
    for (const auto& e : last.checks)
      if (e.id == "l1" || e.id == "pointwise") {
        any = true;
        all = all && std::abs(e.margin) <= e.tolerance;
      }
    res.equality_within_tolerance = any && all;
  }

  // report
  ordered_json rep;
  rep["schema"] = "symcomp-report/1";
  ordered_json cfg;
  cfg["name"] = c.name;
  cfg["manifold"] = manifold_json(c.manifold);
  cfg["domain"] = describe(c.domain);
  cfg["source"] = describe_source(c.source);
  cfg["beta"] = describe_beta(c.beta);
  cfg["h"] = c.h;
  cfg["refinements"] = refinements;
  cfg["checks"] = c.checks;
  cfg["tolerance"] = {{"constant", ToleranceModel::kDefaultConstant}, {"scale", tol_scale}};
  cfg["seed"] = c.seed;
  rep["config"] = cfg;
  rep["notes"] = res.notes;
  ordered_json levels = ordered_json::array();
  for (const auto& lv : res.levels) {
    ordered_json j;
    j["level"] = lv.level;
    j["h"] = c.h / std::ldexp(1.0, lv.level);
    j["vertices"] = lv.vertices;
    j["triangles"] = lv.triangles;
    j["area"] = lv.area;
    j["boundary_length"] = lv.boundary_length;
    j["theta"] = lv.theta;
    j["R0"] = lv.R0;
    j["beta_bar"] = lv.beta_bar;
    j["u"] = {{"min", lv.u.min},         {"max", lv.u.max},   {"boundary_min", lv.u.boundary_min},
              {"integral", lv.u.integral}, {"l1", lv.u.l1}, {"l2", lv.u.l2}};
    j["v"] = {{"center", lv.v_center}, {"v0", lv.v0}, {"l1", lv.v_l1}};
    j["solver"] = {{"iterations", lv.cg_iterations}, {"relative_residual", lv.cg_residual}};
    j["oracle_linf"] = lv.oracle_linf ? ordered_json(*lv.oracle_linf) : ordered_json(nullptr);
    ordered_json checks = ordered_json::array();
    for (const auto& e : lv.checks) checks.push_back(entry_json(e));
    j["checks"] = checks;
    ordered_json skipped = ordered_json::array();
    for (const auto& s : lv.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
    j["skipped"] = skipped;
    j["warnings"] = lv.warnings;
    levels.push_back(j);
  }
  rep["levels"] = levels;
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : res.verdicts) {
    ordered_json j;
    j["id"] = v.id;
    j["verdict"] = to_string(v.verdict);
    j["margin"] = v.margin;
    j["tolerance"] = v.tolerance;
    j["order"] = v.order ? ordered_json(*v.order) : ordered_json(nullptr);
    j["note"] = v.note;
    verdicts.push_back(j);
  }
  rep["verdicts"] = verdicts;
  rep["equality_within_tolerance"] = res.equality_within_tolerance;
  rep["equality_note"] =
      "equality is detected numerically only; it never implies that the domain is isometric to the comparison ball";
  rep["status"] = res.violated ? "violation" : "pass";
  res.report = std::move(rep);

  if (opt.write_artifacts) {
    const std::filesystem::path dir = opt.output.value_or(c.output);
    write_artifacts(c, res, problems.back(), *finest, dir);
    if (opt.log) *opt.log << "artifacts written to " << dir.string() << "\n";
  }
  return res;
}

int exit_code(const RunResult& result) { return result.violated ? 2 : 0; }

std::string report_csv(const RunResult& result) {
  std::ostringstream o;
  o << "level,h,id,name,lhs,rhs,margin,tolerance,verdict,at,max_gap,note\n";
  for (const auto& lv : result.levels)
    for (const auto& e : lv.checks)
      o << lv.level << ',' << g17(lv.h) << ',' << e.id << ',' << csv_field(e.name) << ',' << g17(e.lhs) << ','
        << g17(e.rhs) << ',' << g17(e.margin) << ',' << g17(e.tolerance) << ',' << to_string(e.verdict) << ','
        << (std::isfinite(e.at) ? g17(e.at) : std::string()) << ','
        << (std::isfinite(e.max_gap) ? g17(e.max_gap) : std::string()) << ',' << csv_field(e.note) << '\n';
  return o.str();
}

}  // namespace symcomp
