#pragma once

// Closed-form metric quantities of the model spaces M_kappa (plane for
// kappa = 0, round sphere for kappa > 0) and of flat cones.

#include <string>

namespace symcomp {

enum class ManifoldKind { plane, sphere, cone };

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

/// Ambient geometry of a run. Construct through the factories, which enforce
/// the kind/curvature/cone-fraction invariants.
class Manifold {
 public:
  static Manifold plane(int dim = 2);
  static Manifold sphere(double kappa, int dim = 2);
  static Manifold cone(double angle_fraction, int dim = 2);
  /// Generic constructor used by parsers; validates like the factories.
  static Manifold make(ManifoldKind kind, double kappa, double angle_fraction, int dim = 2);

  ManifoldKind kind() const { return kind_; }
  /// Curvature of the comparison space form (0 for plane and cone).
  double kappa() const { return kappa_; }
  double cone_fraction() const { return cone_fraction_; }
  int dim() const { return dim_; }
  /// Volume of the Euclidean unit ball in dimension dim().
  double omega() const;

  bool operator==(const Manifold&) const = default;

 private:
  Manifold(ManifoldKind kind, double kappa, double fraction, int dim)
      : kind_(kind), kappa_(kappa), cone_fraction_(fraction), dim_(dim) {}

  ManifoldKind kind_;
  double kappa_;
  double cone_fraction_;
  int dim_;
};

struct BallSpec {
  double radius = 0.0;
  double area = 0.0;       // n-volume
  double perimeter = 0.0;  // (n-1)-volume
};

/// Volume of the Euclidean unit ball in R^n.
double unit_ball_volume(int n);

/// pi / sqrt(kappa) for kappa > 0, +inf otherwise.
double myers_radius(double kappa);

/// Total volume of M_kappa (finite only for kappa > 0).
double space_form_volume(double kappa, int n);

/// sin(sqrt(kappa) r)/sqrt(kappa) for kappa > 0, r for kappa = 0.
double sn(double kappa, double r);

/// d/dr sn(kappa, r).
double sn_prime(double kappa, double r);

BallSpec ball_metrics(double kappa, int n, double r);

/// Radius of the geodesic ball of volume `area` in M_kappa.
double inverse_ball_area(double kappa, int n, double area);

/// Isoperimetric profile a(s) = s^{(n-1)/n} / |dB_s|.
double iso_profile_a(double kappa, int n, double s);

/// Asymptotic volume ratio of the manifold (|M|/|M_kappa| when compact).
double theta_of(const Manifold& m);

}  // namespace symcomp
