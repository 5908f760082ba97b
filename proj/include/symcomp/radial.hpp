#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "symcomp/geometry.hpp"
#include "symcomp/mesh.hpp"

namespace symcomp {

class RearrangedProfile;

/// Function of geodesic radius on a ball B_{R0} of the model space M_kappa.
///
/// Two representations share the interface: a sampled profile on a radius
/// grid (cubic Hermite when slopes are present, linear otherwise), and the
/// exact Schwarz profile h#(r) = h*(theta |B_r|) of a rearrangement.
class RadialProfile {
 public:
  RadialProfile(Manifold m, int n, std::vector<double> r, std::vector<double> values,
                std::vector<double> slopes = {});
  static RadialProfile from_rearrangement(std::shared_ptr<const RearrangedProfile> profile, double theta,
                                          const Manifold& m, int n = 2, int samples = 1025);

  const Manifold& manifold() const { return manifold_; }
  int dim() const { return n_; }
  double kappa() const { return manifold_.kappa(); }
  double R0() const { return r_.back(); }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& slopes() const { return slopes_; }
  bool is_exact() const { return static_cast<bool>(source_); }

  double value(double r) const;
  /// Derivative of the sampled interpolant.
  double slope(double r) const;
  /// Measure of {phi > t} in M_kappa (not multiplied by theta).
  double superlevel_measure(double t) const;
  /// Integral of g(phi) over the ball B_{R0}.
  double ball_integral(const std::function<double(double)>& g) const;
  double ball_integral(const std::function<double(double)>& g, double ra, double rb) const;
  /// Integral of phi over the ball B_r.
  double mass(double r) const;
  /// Integral of min(phi, tau) over the ball.
  double truncated_integral(double tau) const;
  double ball_area() const;
  double boundary_perimeter() const;

 private:
  std::size_t interval(double r) const;
  double area_of_radius(double r) const;
  double perimeter_of_radius(double r) const;
  double radius_of_area(double a) const;
  double sampled_value(std::size_t i, double r) const;
  std::vector<double> breakpoints() const;

  Manifold manifold_;
  int n_;
  std::vector<double> r_, values_, slopes_;
  std::vector<double> mass_;  // sampled: mass at each grid radius
  std::shared_ptr<const RearrangedProfile> source_;
  double theta_ = 1.0;
};

/// theta |dOmega#| / (sum over boundary edges of length / beta).
double beta_bar(const BoundaryField& beta, const Mesh& mesh, const Manifold& m);

struct RadialSolution {
  RadialProfile profile;
  double R0 = 0.0;
  double beta_bar = 0.0;
  double v0 = 0.0;        // phi(R0)
  double slope_R0 = 0.0;  // phi'(R0)
  double source_mass = 0.0;  // integral of h over the ball
};

/// Solves (sn^{n-1} phi')' = -sn^{n-1} h on [0, R0] with phi'(0) = 0 and
/// phi'(R0) + beta_bar phi(R0) = 0. `h` must be nonnegative, nonincreasing
/// and not identically zero.
RadialSolution solve_radial(const RadialProfile& h, const Manifold& m, int n, double R0, double beta_bar,
                            int intervals = 4096);

/// Largest difference quotient of consecutive samples.
double monotonicity_report(const RadialProfile& v);

/// phi(r) = (R^2 - r^2)/4 + R/(2 beta): the flat disk with f = 1.
RadialProfile closed_form_disk(double R, double beta, int samples = 1001);

/// Largest relative residual of the level identity
///   |B_r| h-mass(r) = perimeter(r) |phi'(r)| ... in the form
///   mu^{(2n-2)/n} = a^2(mu) (-mu') int_0^mu h*
/// at `levels` interior levels of the solution.
double level_identity_residual(const RadialSolution& sol, const RadialProfile& h, int levels = 64);

}  // namespace symcomp
