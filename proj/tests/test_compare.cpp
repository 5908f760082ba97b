#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "symcomp/compare.hpp"

using namespace symcomp;
constexpr double pi = std::numbers::pi;

namespace {

MeshPtr right_triangle() {
  return std::make_shared<const Mesh>(Manifold::plane(), std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
                                      std::vector<std::array<int, 3>>{{0, 1, 2}},
                                      std::vector<std::array<int, 2>>{{0, 1}, {1, 2}, {2, 0}}, 1.0);
}

RadialSolution disk_v(double R, double beta) {
  return solve_radial(RadialProfile(Manifold::plane(), 2, {0.0, R}, {1.0, 1.0}), Manifold::plane(), 2, R, beta);
}

}  // namespace

TEST_CASE("verdict classification") {
  CHECK(classify(0.1, 0.01) == Verdict::holds);
  CHECK(classify(-0.005, 0.01) == Verdict::holds_within_tolerance);
  CHECK(classify(-0.02, 0.01) == Verdict::violated);
  const CheckEntry e = inequality_entry("x", "x", 1.0, 3.0, 0.1);
  CHECK(e.margin == 2.0);
  const CheckEntry i = identity_entry("y", "y", 1.0, 1.05, 0.1);
  CHECK(i.margin == doctest::Approx(-0.05));
  CHECK(i.verdict == Verdict::holds_within_tolerance);
  const ToleranceModel tol{ToleranceModel::kDefaultConstant, 2.0, 0.05};
  CHECK(tol(3.0) == doctest::Approx(2.0 * 0.1 * 0.05 * 3.0));
  const auto ladder = level_ladder(0.5, 0.75, 64);
  CHECK(ladder.size() == 64);
  CHECK(ladder.front() == doctest::Approx(0.25));
  CHECK(ladder.back() == doctest::Approx(0.75));
}

TEST_CASE("boundary level integral") {
  const MeshPtr m = right_triangle();
  const BoundaryField one = BoundaryField::constant(*m, 1.0);
  const ScalarField u(m, {1.0, 2.0, 1.0});
  CHECK(boundary_level_integral(u, one, 3.0) == 0.0);
  CHECK(boundary_level_integral(u, one, 1.5) == doctest::Approx(std::log(2 / 1.5) * (1 + std::sqrt(2.0))).epsilon(1e-13));
  const ScalarField c = ScalarField::constant(m, 4.0);
  CHECK(boundary_level_integral(c, one, 0.0) == doctest::Approx(m->boundary_length() / 4).epsilon(1e-14));
  CHECK(boundary_level_integral(c, BoundaryField::constant(*m, 2.0), 0.0) == doctest::Approx(m->boundary_length() / 8));
  CHECK_THROWS(boundary_level_integral(ScalarField(m, {0.0, 1.0, 1.0}), one, 0.5));
  // integrated term: int_0^tau of the level integral, by midpoint quadrature
  // split at the jump t = 1 (the edge where u == 1 drops out)
  const double tau = 1.7;
  double q = 0.0;
  const int steps = 20000;
  for (const auto& [a, b] : {std::pair{0.0, 1.0}, std::pair{1.0, tau}})
    for (int k = 0; k < steps; ++k) q += boundary_level_integral(u, one, a + (b - a) * (k + 0.5) / steps) * (b - a) / steps;
  CHECK(integrated_boundary_term(u, one, tau) == doctest::Approx(q).epsilon(1e-6));
}

TEST_CASE("compute_F") {
  const RearrangedProfile one = piecewise_constant_rearrangement(std::vector<double>{1.0}, std::vector<double>{4.0});
  const std::vector<double> sigma{0.0, 0.5, 1.0, 2.0, 4.0};
  const auto F = compute_F(sigma, one, 0.0, 2);
  for (std::size_t k = 0; k < sigma.size(); ++k) CHECK(F[k] == doctest::Approx(sigma[k] * sigma[k] / (8 * pi)).epsilon(1e-10));
  const RearrangedProfile zero = piecewise_constant_rearrangement(std::vector<double>{0.0}, std::vector<double>{4.0});
  for (double x : compute_F(sigma, zero, 0.0, 2)) CHECK(x == 0.0);

  std::mt19937_64 rng(4);
  std::vector<double> v(6), meas(6);
  for (int i = 0; i < 6; ++i) v[i] = std::ldexp(double(rng() >> 11), -53), meas[i] = 0.5;
  const RearrangedProfile r = piecewise_constant_rearrangement(v, meas);
  std::vector<double> grid;
  for (int k = 0; k <= 60; ++k) grid.push_back(3.0 * k / 60);
  const auto G = compute_F(grid, r, 0.0, 2);
  for (std::size_t k = 1; k + 1 < G.size(); ++k) {
    CHECK(G[k] >= G[k - 1]);
    CHECK(G[k + 1] - 2 * G[k] + G[k - 1] >= -1e-12);
  }
}

TEST_CASE("disk equality verifiers") {
  const MeshPtr m = build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), 0.05);
  const BoundaryField beta = BoundaryField::constant(*m, 1.0);
  const PoissonSolution s = solve_poisson_robin(m, ScalarField::constant(m, 1.0), beta);
  const FieldStats st = field_stats(s.u);
  const double bb = beta_bar(beta, *m, Manifold::plane());
  const double R0 = std::sqrt(m->area() / pi);
  const RadialSolution v = disk_v(R0, bb);
  const ToleranceModel tol{ToleranceModel::kDefaultConstant, 1.0, 0.05};

  const CheckEntry l1 = verify_L1(st, v.profile, 1.0, m->area(), tol);
  CHECK(l1.lhs == doctest::Approx(5 * pi / 8).epsilon(0.01));
  CHECK(l1.rhs == doctest::Approx(5 * pi / 8).epsilon(0.01));
  CHECK(std::abs(l1.margin) <= l1.tolerance / 2);
  CHECK_THROWS(verify_L1(st, v.profile, 0.5, m->area(), tol));

  const std::vector<double> levels = default_level_grid(s.u);
  const DistributionData mu_u = distribution_function(s.u, levels);
  const DistributionData mu_v = radial_distribution(v.profile, levels);
  const CheckEntry pw = verify_pointwise(mu_u, mu_v, 1.0, tol);
  CHECK(std::abs(pw.margin) <= pw.tolerance);
  const std::vector<double> shifted(levels.begin() + 1, levels.end());
  CHECK_THROWS(verify_pointwise(mu_u, radial_distribution(v.profile, shifted), 1.0, tol));

  const CheckEntry mins = verify_min_comparison(st.boundary_min, v.v0, tol);
  CHECK(st.boundary_min == doctest::Approx(0.5).epsilon(0.01));
  CHECK(v.v0 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(mins.verdict != Verdict::violated);
  CHECK(verify_ordering(st.boundary_min, st.max, v.v0, v.profile.value(0.0), tol).verdict != Verdict::violated);

  const auto ladder = level_ladder(st.boundary_min, st.max);
  const LevelInequalityResult li = verify_level_inequality(s.u, beta, 1.0, 1.0, Manifold::plane(), ladder, tol);
  CHECK(li.tight.verdict != Verdict::violated);
  for (const auto& row : li.rows)
    if (row.tau >= v.v0) CHECK(std::abs(row.rhs_tight - row.lhs) <= li.tight.tolerance);
  const CheckEntry id = verify_level_identity(v, 1.0, ladder, tol);
  CHECK(std::abs(id.margin) <= 1e-6);
}

TEST_CASE("disk closed-form level inequality") {
  // mu_v(tau) = pi (3 - 4 tau) on [0.5, 0.75] for R = beta = 1
  const RadialSolution v = disk_v(1.0, 1.0);
  for (double t : {0.55, 0.6, 0.7}) CHECK(v.profile.superlevel_measure(t) == doctest::Approx(pi * (3 - 4 * t)).epsilon(1e-9));
}

TEST_CASE("isoperimetric check") {
  const MeshPtr disk = build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), 0.05);
  const ScalarField radial = ScalarField::interpolate(disk, [](Vec3 p) { return 1 - p.x * p.x - p.y * p.y; });
  const ToleranceModel tol{ToleranceModel::kDefaultConstant, 1.0, 0.05};
  const std::vector<double> levels{0.1, 0.3, 0.5, 0.7, 0.9};
  const CheckEntry e = verify_isoperimetric(radial, levels, 1.0, Manifold::plane(), tol);
  CHECK(std::abs(e.margin) <= 1e-3 * 2 * pi);
  const double t = 0.5;
  CHECK(level_line_length(radial, t) == doctest::Approx(2 * pi * std::sqrt(1 - t)).epsilon(1e-3));
  CHECK_THROWS(verify_isoperimetric(radial, std::vector<double>{-0.5}, 1.0, Manifold::plane(), tol));

  const MeshPtr ell = build_mesh(shape::Ellipse{2.0, 1.0, {}}, Manifold::plane(), 0.05);
  const ScalarField u = ScalarField::interpolate(ell, [](Vec3 p) { return 1 - p.x * p.x / 4 - p.y * p.y; });
  const CheckEntry el = verify_isoperimetric(u, std::vector<double>{0.5}, 1.0, Manifold::plane(), tol);
  CHECK(el.margin > 0.1);
  CHECK(el.verdict == Verdict::holds);
}

TEST_CASE("theorem 1 integrated diagnostic on the disk") {
  const MeshPtr m = build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), 0.05);
  const BoundaryField beta = BoundaryField::constant(*m, 1.0);
  const PoissonSolution s = solve_poisson_robin(m, ScalarField::constant(m, 1.0), beta);
  const RadialSolution v = disk_v(std::sqrt(m->area() / pi), beta_bar(beta, *m, Manifold::plane()));
  const RearrangedProfile fstar = piecewise_constant_rearrangement(std::vector<double>{1.0}, std::vector<double>{m->area()});
  const FieldStats st = field_stats(s.u);
  const ToleranceModel tol{ToleranceModel::kDefaultConstant, 1.0, 0.05};
  const CheckEntry e = verify_theorem1_integrated(s.u, v, fstar, 1.0, level_ladder(st.boundary_min, st.max), tol);
  CHECK(e.verdict != Verdict::violated);
  CHECK(std::abs(e.margin) <= e.tolerance);
}
