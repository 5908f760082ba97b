#include "symcomp/compare.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "symcomp/quadrature.hpp"

namespace symcomp {

namespace {

struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  double lhs = 0.0, rhs = 0.0, at = 0.0;
  double gap = 0.0;
  void offer(double l, double r, double where) {
    gap = std::max(gap, std::abs(r - l));
    if (r - l < margin) {
      margin = r - l;
      lhs = l;
      rhs = r;
      at = where;
    }
  }
};

// Two vertices a, b straddle t in the sense (u > t) != (u > t).
Vec3 crossing(const Vec3& pa, const Vec3& pb, double ua, double ub, double t) {
  const double w = (t - ua) / (ub - ua);
  return pa + w * (pb - pa);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_within_tolerance: return "holds-within-tolerance";
    case Verdict::violated: return "violated";
  }
  return "?";
}

Verdict classify(double margin, double tolerance) {
  if (margin >= 0.0) return Verdict::holds;
  if (margin >= -tolerance) return Verdict::holds_within_tolerance;
  return Verdict::violated;
}

CheckEntry inequality_entry(std::string id, std::string name, double lhs, double rhs, double tolerance) {
  CheckEntry e;
  e.id = std::move(id);
  e.name = std::move(name);
  e.lhs = lhs;
  e.rhs = rhs;
  e.margin = rhs - lhs;
  e.tolerance = tolerance;
  e.verdict = classify(e.margin, tolerance);
  return e;
}

CheckEntry identity_entry(std::string id, std::string name, double lhs, double rhs, double tolerance) {
  CheckEntry e = inequality_entry(std::move(id), std::move(name), lhs, rhs, tolerance);
  e.margin = -std::abs(rhs - lhs);
  e.verdict = classify(e.margin, tolerance);
  return e;
}

std::vector<double> level_ladder(double u0, double umax, int count) {
  if (count < 2) throw std::invalid_argument("level_ladder: need >= 2 levels");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double lo = 0.5 * u0;
  for (int j = 0; j < count; ++j) out[j] = lo + (umax - lo) * j / (count - 1);
  return out;
}

DistributionData radial_distribution(const RadialProfile& v, std::span<const double> levels) {
  DistributionData d;
  d.levels.assign(levels.begin(), levels.end());
  d.total = v.ball_area();
  d.min_value = v.value(v.R0());
  d.max_value = v.value(0.0);
  for (double t : levels) d.mu.push_back(v.superlevel_measure(t));
  d.mu_left = d.mu;  // strictly decreasing profiles have no flat parts
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) d.mu_mid.push_back(v.superlevel_measure(0.5 * (levels[i] + levels[i + 1])));
  return d;
}

CheckEntry verify_L1(const FieldStats& u_stats, const RadialProfile& v, double theta, double domain_area,
                     const ToleranceModel& tol) {
  if (std::abs(domain_area - theta * v.ball_area()) > 1e-8 * domain_area)
    throw std::invalid_argument("verify_L1: |Omega| differs from theta |Omega#|");
  const double rhs = theta * v.ball_integral([](double x) { return std::abs(x); });
  return inequality_entry("l1", "L1 comparison ||u||_1 <= theta ||v||_1", u_stats.l1, rhs, tol(rhs));
}

CheckEntry verify_pointwise(const DistributionData& mu_u, const DistributionData& mu_v, double theta,
                            const ToleranceModel& tol) {
  if (mu_u.levels != mu_v.levels) throw std::invalid_argument("verify_pointwise: level grids are not aligned");
  Worst w;
  for (std::size_t i = 0; i < mu_u.levels.size(); ++i) w.offer(mu_u.mu[i], theta * mu_v.mu[i], mu_u.levels[i]);
  CheckEntry e = inequality_entry("pointwise", "distribution comparison mu_u(t) <= theta mu_v(t)", w.lhs, w.rhs,
                                  tol(mu_u.total));
  e.at = w.at;
  e.max_gap = w.gap;
  // the branch t < v0 is trivially tight; report the informative one too
  double above = std::numeric_limits<double>::infinity();
  const double v0 = mu_v.min_value;
  for (std::size_t i = 0; i < mu_u.levels.size(); ++i)
    if (mu_u.levels[i] > v0) above = std::min(above, theta * mu_v.mu[i] - mu_u.mu[i]);
  std::ostringstream os;
  os << "worst of " << mu_u.levels.size() << " levels; worst above v0: " << above;
  e.note = os.str();
  return e;
}

CheckEntry verify_profile(const RadialProfile& u_sharp, const RadialProfile& v, const ToleranceModel& tol) {
  Worst w;
  const double R = std::min(u_sharp.R0(), v.R0());
  for (double r : v.r()) {
    if (r > R) break;
    w.offer(u_sharp.value(r), v.value(r), r);
  }
  CheckEntry e = inequality_entry("profile", "profile comparison u#(r) <= v(r)", w.lhs, w.rhs, tol(v.value(0.0)));
  e.at = w.at;
  e.max_gap = w.gap;
  return e;
}

CheckEntry verify_min_comparison(double u0, double v0, const ToleranceModel& tol) {
  return inequality_entry("min", "boundary minima u0 <= v0", u0, v0, tol(v0));
}

CheckEntry verify_ordering(double u0, double umax, double v0, double v_center, const ToleranceModel& tol) {
  Worst w;
  w.offer(u0, v0, 0.0);
  w.offer(v0, v_center, 1.0);
  w.offer(u0, umax, 2.0);
  static const char* links[] = {"u0 <= v0", "v0 <= v(0)", "u0 <= max u"};
  CheckEntry e = inequality_entry("ordering", "ordering chain u0 <= v0 <= v(0), u0 <= max u", w.lhs, w.rhs,
                                  tol(v_center));
  e.note = std::string("tightest link: ") + links[static_cast<int>(w.at)];
  return e;
}

double level_line_length(const ScalarField& u, double t) {
  const Mesh& mesh = *u.mesh;
  double len = 0.0;
  for (const auto& tri : mesh.triangles()) {
    Vec3 pts[3];
    int np = 0;
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i], b = tri[(i + 1) % 3];
      const double ua = u.values[a], ub = u.values[b];
      if ((ua > t) != (ub > t)) pts[np++] = crossing(mesh.vertices()[a], mesh.vertices()[b], ua, ub, t);
    }
    if (np == 2) len += norm(pts[1] - pts[0]);
  }
  return len;
}

double superlevel_perimeter(const ScalarField& u, double t) {
  const Mesh& mesh = *u.mesh;
  double len = level_line_length(u, t);
  for (std::size_t e = 0; e < mesh.boundary().size(); ++e) {
    const int a = mesh.boundary()[e][0], b = mesh.boundary()[e][1];
    const double ua = u.values[a], ub = u.values[b];
    const double L = mesh.boundary_edge_length(e);
    if (ua > t && ub > t)
      len += L;
    else if ((ua > t) != (ub > t))
      len += L * (ua > t ? (ua - t) / (ua - ub) : (ub - t) / (ub - ua));
  }
  return len;
}

CheckEntry verify_isoperimetric(const ScalarField& u, std::span<const double> levels, double theta,
                                const Manifold& m, const ToleranceModel& tol) {
  const FieldStats st = field_stats(u);
  const double kappa = m.kind() == ManifoldKind::sphere ? m.kappa() : 0.0;
  Worst w;
  int used = 0;
  for (double t : levels) {
    if (t < st.boundary_min)
      throw std::invalid_argument("verify_isoperimetric: level below the boundary minimum");
    const double measure = superlevel_measure_of(u, t);
    if (!(measure > 0.0)) continue;
    const double r = inverse_ball_area(kappa, 2, measure / theta);
    w.offer(theta * ball_metrics(kappa, 2, r).perimeter, superlevel_perimeter(u, t), t);
    ++used;
  }
  const double r_sharp = inverse_ball_area(kappa, 2, u.mesh->area() / theta);
  const double scale = theta * ball_metrics(kappa, 2, r_sharp).perimeter;
  CheckEntry e = used ? inequality_entry("isoperimetric", "isoperimetric |d Omega_t| >= theta |d Omega_t#|", w.lhs,
                                         w.rhs, tol(scale))
                      : inequality_entry("isoperimetric", "isoperimetric |d Omega_t| >= theta |d Omega_t#|", 0.0,
                                         0.0, tol(scale));
  e.at = used ? w.at : std::numeric_limits<double>::quiet_NaN();
  if (used) e.max_gap = w.gap;
  e.note = std::to_string(used) + " levels";
  return e;
}

double boundary_level_integral(const ScalarField& u, const BoundaryField& beta, double t) {
  const Mesh& mesh = *u.mesh;
  beta.validate(mesh);
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.boundary().size(); ++e) {
    const double ua = u.values[mesh.boundary()[e][0]], ub = u.values[mesh.boundary()[e][1]];
    if (!(ua > 0.0) || !(ub > 0.0)) throw std::invalid_argument("boundary_level_integral: u must be positive on the boundary");
    const double L = mesh.boundary_edge_length(e);
    const double lo = std::min(ua, ub), hi = std::max(ua, ub);
    if (hi < t) continue;
    if (hi == lo) {
      sum += L / (beta.values[e] * hi);
      continue;
    }
    const double from = std::max(lo, t);
    sum += L / (beta.values[e] * (hi - lo)) * std::log(hi / from);
  }
  return sum;
}

double integrated_boundary_term(const ScalarField& u, const BoundaryField& beta, double tau) {
  const Mesh& mesh = *u.mesh;
  beta.validate(mesh);
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.boundary().size(); ++e) {
    const double ua = u.values[mesh.boundary()[e][0]], ub = u.values[mesh.boundary()[e][1]];
    if (!(ua > 0.0) || !(ub > 0.0)) throw std::invalid_argument("integrated_boundary_term: u must be positive on the boundary");
    const double L = mesh.boundary_edge_length(e);
    const double lo = std::min(ua, ub), hi = std::max(ua, ub);
    double part;  // integral over s in [0, 1] of min(u, tau) / u
    if (hi <= tau) {
      part = 1.0;
    } else if (hi == lo) {
      part = tau / hi;
    } else {
      const double cut = std::clamp(tau, lo, hi);
      part = (cut - lo) / (hi - lo) + tau / (hi - lo) * std::log(hi / cut);
    }
    sum += L * part / beta.values[e];
  }
  return sum;
}

LevelInequalityResult verify_level_inequality(const ScalarField& u, const BoundaryField& beta, double source_constant,
                                              double theta, const Manifold& m, std::span<const double> ladder,
                                              const ToleranceModel& tol) {
  const Mesh& mesh = *u.mesh;
  if (!(source_constant > 0.0)) throw std::invalid_argument("verify_level_inequality: source must be a positive constant");
  const double kappa = m.kind() == ManifoldKind::sphere ? m.kappa() : 0.0;
  const double area = mesh.area();
  const double a = iso_profile_a(kappa, 2, area / theta);
  const double c = source_constant * a * a;
  double inv_beta = 0.0;
  for (std::size_t e = 0; e < beta.values.size(); ++e) inv_beta += mesh.boundary_edge_length(e) / beta.values[e];

  LevelInequalityResult res;
  Worst tight, loose;
  for (double tau : ladder) {
    LevelInequalityRow row;
    row.tau = tau;
    row.lhs = theta * tau;
    const double mu = superlevel_measure_of(u, tau);
    row.rhs_tight = c * (area - mu + integrated_boundary_term(u, beta, tau));
    row.rhs_loose = c * (area - mu + inv_beta);
    tight.offer(row.lhs, row.rhs_tight, tau);
    loose.offer(row.lhs, row.rhs_loose, tau);
    res.rows.push_back(row);
  }
  const double scale = theta * (ladder.empty() ? 1.0 : ladder.back());
  res.tight = inequality_entry("level", "integrated level inequality (boundary term integrated)", tight.lhs, tight.rhs,
                               tol(scale));
  res.tight.at = tight.at;
  res.tight.max_gap = tight.gap;
  res.loose = inequality_entry("level_loose", "integrated level inequality (boundary term bounded by int 1/beta)",
                               loose.lhs, loose.rhs, tol(scale));
  res.loose.at = loose.at;
  res.loose.max_gap = loose.gap;
  return res;
}

CheckEntry verify_level_identity(const RadialSolution& v, double source_constant, std::span<const double> ladder,
                                 const ToleranceModel& tol) {
  const RadialProfile& p = v.profile;
  const double kappa = p.kappa();
  const double total = p.ball_area();
  auto a2 = [&](double s) {
    if (s <= 0.0) return std::pow(iso_profile_a(kappa, 2, 1e-300 + total * 1e-14), 2.0);
    const double a = iso_profile_a(kappa, 2, s);
    return a * a;
  };
  auto A = [&](double s) { return kappa == 0.0 ? a2(total) * s : quad::adaptive_gauss(a2, 0.0, s, 1e-14); };
  const double A_total = A(total);
  const double boundary = a2(total) * p.boundary_perimeter() / (v.beta_bar * v.v0);
  Worst w;
  double worst_abs = -1.0;
  for (double tau : ladder) {
    const double mu = p.superlevel_measure(tau);
    const double rhs = source_constant * (A_total - A(mu) + boundary * std::min(tau, v.v0));
    const double d = std::abs(rhs - tau);
    if (d > worst_abs) {
      worst_abs = d;
      w.lhs = tau;
      w.rhs = rhs;
      w.at = tau;
    }
  }
  CheckEntry e = identity_entry("level_identity", "level identity of the symmetrized solution", w.lhs, w.rhs,
                                tol(p.value(0.0)));
  e.at = w.at;
  e.max_gap = worst_abs;
  return e;
}

std::vector<double> compute_F(std::span<const double> sigma, const RearrangedProfile& fsharp_star, double kappa,
                              int n) {
  if (n < 2) throw std::invalid_argument("compute_F: dimension must be >= 2");
  const double total = fsharp_star.total();
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double a = iso_profile_a(kappa, n, s);
    return a * a * std::pow(s, 2.0 / n - 1.0) * fsharp_star.primitive(std::min(s, total));
  };
  std::vector<double> out(sigma.size());
  double prev_s = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] < prev_s) throw std::invalid_argument("compute_F: sigma must be nondecreasing");
    if (sigma[i] > total * (1.0 + 1e-12)) throw std::invalid_argument("compute_F: sigma exceeds the profile domain");
    if (sigma[i] > prev_s) acc += quad::adaptive_gauss(integrand, prev_s, sigma[i], 1e-13);
    out[i] = acc;
    prev_s = sigma[i];
  }
  return out;
}

CheckEntry verify_theorem1_integrated(const ScalarField& u, const RadialSolution& v,
                                      const RearrangedProfile& fsharp_star, double theta,
                                      std::span<const double> ladder, const ToleranceModel& tol) {
  const RadialProfile& p = v.profile;
  const FieldStats st = field_stats(u);
  const double total = p.ball_area();
  std::vector<double> taus;
  for (double tau : ladder)
    if (tau > v.v0) taus.push_back(tau);
  struct Point {
    double tau, mu_u, mu_v;
  };
  std::vector<Point> pts;
  std::vector<double> sig;
  for (double tau : taus) {
    const double mu_u = std::min(total, superlevel_measure_of(u, tau) / theta);
    const double mu_v = p.superlevel_measure(tau);
    pts.push_back({tau, mu_u, mu_v});
    sig.push_back(mu_u);
    sig.push_back(mu_v);
  }
  std::vector<std::size_t> order(sig.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
  std::vector<double> sorted(sig.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = sig[order[i]];
  const std::vector<double> Fs = compute_F(sorted, fsharp_star, p.kappa(), 2);
  std::vector<double> F(sig.size());
  for (std::size_t i = 0; i < order.size(); ++i) F[order[i]] = Fs[i];

  Worst w;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double int_u = (st.integral - superlevel_excess(u, pts[k].tau)) / theta;
    const double int_v = p.truncated_integral(pts[k].tau);
    w.offer(int_u - int_v, F[2 * k + 1] - F[2 * k], pts[k].tau);
  }
  const double scale = p.ball_integral([](double x) { return x; });
  if (pts.empty()) {
    CheckEntry e = inequality_entry("theorem1_integrated", "integrated L1 comparison at levels above v0", 0.0, 0.0,
                                    tol(scale));
    e.note = "no ladder level above v0";
    return e;
  }
  CheckEntry e = inequality_entry("theorem1_integrated", "integrated L1 comparison at levels above v0", w.lhs, w.rhs,
                                  tol(scale));
  e.at = w.at;
  e.max_gap = w.gap;
  e.note = std::to_string(pts.size()) + " levels";
  return e;
}

}  // namespace symcomp
