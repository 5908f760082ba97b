#pragma once

#include <limits>
#include <string>
#include <vector>

#include "symcomp/fem.hpp"
#include "symcomp/radial.hpp"
#include "symcomp/rearrange.hpp"

namespace symcomp {

enum class Verdict { holds, holds_within_tolerance, violated };
std::string to_string(Verdict v);

/// tol(h) = scale * constant * h * natural_scale. The constant is calibrated
/// on the disk equality case (see README).
struct ToleranceModel {
  static constexpr double kDefaultConstant = 0.1;
  double constant = kDefaultConstant;
  double scale = 1.0;
  double h = 0.0;

  double operator()(double natural_scale) const { return scale * constant * h * std::abs(natural_scale); }
};

/// One verified statement. For inequality checks margin = rhs - lhs; for
/// identities margin = -|rhs - lhs|.
struct CheckEntry {
  std::string id;
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::holds;
  double at = std::numeric_limits<double>::quiet_NaN();  // level or radius of the worst margin
  double max_gap = std::numeric_limits<double>::quiet_NaN();  // largest |rhs - lhs| over all evaluated points
  std::string note;
};

Verdict classify(double margin, double tolerance);
CheckEntry inequality_entry(std::string id, std::string name, double lhs, double rhs, double tolerance);
CheckEntry identity_entry(std::string id, std::string name, double lhs, double rhs, double tolerance);

/// 64 levels uniformly covering [u0 / 2, max u].
std::vector<double> level_ladder(double u0, double umax, int count = 64);

/// Distribution table of a radial profile on the given levels (ball measure).
DistributionData radial_distribution(const RadialProfile& v, std::span<const double> levels);

CheckEntry verify_L1(const FieldStats& u_stats, const RadialProfile& v, double theta, double domain_area,
                     const ToleranceModel& tol);
CheckEntry verify_pointwise(const DistributionData& mu_u, const DistributionData& mu_v, double theta,
                            const ToleranceModel& tol);
/// Direct comparison u#(r) <= v(r) on the sample grid of v.
CheckEntry verify_profile(const RadialProfile& u_sharp, const RadialProfile& v, const ToleranceModel& tol);
CheckEntry verify_min_comparison(double u0, double v0, const ToleranceModel& tol);
/// u0 <= v0 <= v(0) and u0 <= max u.
CheckEntry verify_ordering(double u0, double umax, double v0, double v_center, const ToleranceModel& tol);

/// Length of {u = t} inside the mesh (exact for the P1 field).
double level_line_length(const ScalarField& u, double t);
/// Perimeter of {u > t}: level line plus the part of the boundary with u > t.
double superlevel_perimeter(const ScalarField& u, double t);

CheckEntry verify_isoperimetric(const ScalarField& u, std::span<const double> levels, double theta,
                                const Manifold& m, const ToleranceModel& tol);

/// Integral of 1/(beta u) over the part of the boundary where u >= t.
double boundary_level_integral(const ScalarField& u, const BoundaryField& beta, double t);
/// Integral over t in [0, tau] of boundary_level_integral, i.e. of
/// min(u, tau) / (beta u) over the boundary.
double integrated_boundary_term(const ScalarField& u, const BoundaryField& beta, double tau);

struct LevelInequalityRow {
  double tau = 0.0;
  double lhs = 0.0;         // theta tau
  double rhs_tight = 0.0;   // with the integrated boundary term
  double rhs_loose = 0.0;   // with the full integral of 1/beta
};

struct LevelInequalityResult {
  CheckEntry tight;
  CheckEntry loose;
  std::vector<LevelInequalityRow> rows;
};

/// Integrated level-set inequality for n = 2 and constant source c:
///   theta tau <= c a^2(|Omega#|) (|Omega| - mu_u(tau) + int_0^tau B(t) dt)
///             <= c a^2(|Omega#|) (|Omega| - mu_u(tau) + int 1/beta).
LevelInequalityResult verify_level_inequality(const ScalarField& u, const BoundaryField& beta, double source_constant,
                                              double theta, const Manifold& m, std::span<const double> ladder,
                                              const ToleranceModel& tol);

/// Exact level identity of the symmetrized solution (n = 2, constant source):
///   tau = c (A(|Omega#|) - A(mu_v(tau))) + c a^2(|Omega#|) |dOmega#| min(tau, v0) / (beta_bar v0)
/// with A(s) = int_0^s a^2.
CheckEntry verify_level_identity(const RadialSolution& v, double source_constant, std::span<const double> ladder,
                                 const ToleranceModel& tol);

/// F(s) = int_0^s a^2(sigma) sigma^{2/n-1} int_0^sigma fsharp_star dsigma at increasing sigma values.
std::vector<double> compute_F(std::span<const double> sigma, const RearrangedProfile& fsharp_star, double kappa,
                              int n);

/// For ladder levels tau > v0:
///   int_0^tau mu_u/theta - int_0^tau mu_v <= F(mu_v(tau)) - F(mu_u(tau)/theta).
CheckEntry verify_theorem1_integrated(const ScalarField& u, const RadialSolution& v,
                                      const RearrangedProfile& fsharp_star, double theta,
                                      std::span<const double> ladder, const ToleranceModel& tol);

}  // namespace symcomp
