#include "symcomp/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "symcomp/quadrature.hpp"

namespace symcomp {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dim(int n) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
}

void check_kappa(double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::domain_error("curvature must be finite and >= 0");
}

// Clamps r into [0, pi/sqrt(kappa)], rejecting anything beyond rounding noise.
double checked_radius(double kappa, double r) {
  if (!(r >= 0.0)) throw std::domain_error("radius must be >= 0");
  const double bound = myers_radius(kappa);
  if (r > bound) {
    if (r > bound * (1.0 + 1e-13)) throw std::domain_error("radius exceeds the Myers bound pi/sqrt(kappa)");
    return bound;
  }
  return r;
}

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::plane: return "plane";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::cone: return "cone";
  }
  return "unknown";
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
  if (name == "plane") return ManifoldKind::plane;
  if (name == "sphere") return ManifoldKind::sphere;
  if (name == "cone") return ManifoldKind::cone;
  throw std::invalid_argument("unknown manifold kind '" + name + "'");
}

Manifold Manifold::plane(int dim) {
  check_dim(dim);
  return Manifold(ManifoldKind::plane, 0.0, 1.0, dim);
}

Manifold Manifold::sphere(double kappa, int dim) {
  check_dim(dim);
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("sphere requires kappa > 0");
  return Manifold(ManifoldKind::sphere, kappa, 1.0, dim);
}

Manifold Manifold::cone(double angle_fraction, int dim) {
  check_dim(dim);
  if (!(angle_fraction > 0.0 && angle_fraction <= 1.0))
    throw std::invalid_argument("cone angle fraction must lie in (0, 1]");
  return Manifold(ManifoldKind::cone, 0.0, angle_fraction, dim);
}

Manifold Manifold::make(ManifoldKind kind, double kappa, double angle_fraction, int dim) {
  switch (kind) {
    case ManifoldKind::plane:
      if (kappa != 0.0 || angle_fraction != 1.0)
        throw std::invalid_argument("plane requires kappa = 0 and fraction = 1");
      return plane(dim);
    case ManifoldKind::sphere:
      if (angle_fraction != 1.0) throw std::invalid_argument("sphere requires fraction = 1");
      return sphere(kappa, dim);
    case ManifoldKind::cone:
      if (kappa != 0.0) throw std::invalid_argument("cone requires kappa = 0");
      return cone(angle_fraction, dim);
  }
  throw std::invalid_argument("unknown manifold kind");
}

double Manifold::omega() const { return unit_ball_volume(dim_); }

double unit_ball_volume(int n) {
  check_dim(n);
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double myers_radius(double kappa) {
  check_kappa(kappa);
  return kappa > 0.0 ? kPi / std::sqrt(kappa) : std::numeric_limits<double>::infinity();
}

double space_form_volume(double kappa, int n) {
  check_dim(n);
  check_kappa(kappa);
  if (kappa == 0.0) return std::numeric_limits<double>::infinity();
  return ball_metrics(kappa, n, myers_radius(kappa)).area;
}

double sn(double kappa, double r) {
  check_kappa(kappa);
  r = checked_radius(kappa, r);
  if (kappa == 0.0) return r;
  const double k = std::sqrt(kappa);
  const double x = k * r;
  if (x < 1e-4) {
    const double x2 = x * x;
    return r * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0));
  }
  return std::sin(x) / k;
}

double sn_prime(double kappa, double r) {
  check_kappa(kappa);
  r = checked_radius(kappa, r);
  if (kappa == 0.0) return 1.0;
  return std::cos(std::sqrt(kappa) * r);
}

BallSpec ball_metrics(double kappa, int n, double r) {
  check_dim(n);
  check_kappa(kappa);
  r = checked_radius(kappa, r);
  const double omega = unit_ball_volume(n);
  BallSpec ball;
  ball.radius = r;
  if (kappa == 0.0) {
    ball.area = omega * std::pow(r, n);
    ball.perimeter = n * omega * std::pow(r, n - 1);
    return ball;
  }
  const double s = sn(kappa, r);
  ball.perimeter = n * omega * std::pow(s, n - 1);
  if (n == 2) {
    // 2 pi (1 - cos(k r)) / kappa written without cancellation
    const double half = std::sin(0.5 * std::sqrt(kappa) * r);
    ball.area = 4.0 * kPi * half * half / kappa;
    return ball;
  }
  const double scale = n * omega;
  ball.area = quad::adaptive_gauss(
      [&](double rho) { return scale * std::pow(sn(kappa, rho), n - 1); }, 0.0, r, 1e-12);
  return ball;
}

double inverse_ball_area(double kappa, int n, double area) {
  check_dim(n);
  check_kappa(kappa);
  if (!(area >= 0.0)) throw std::domain_error("volume must be >= 0");
  if (area == 0.0) return 0.0;
  const double omega = unit_ball_volume(n);
  if (kappa == 0.0) {
    if (!std::isfinite(area)) throw std::domain_error("volume must be finite");
    return std::pow(area / omega, 1.0 / n);
  }
  const double total = space_form_volume(kappa, n);
  if (area > total) {
    if (area > total * (1.0 + 1e-12)) throw std::domain_error("volume exceeds the total volume of M_kappa");
    return myers_radius(kappa);
  }
  const double k = std::sqrt(kappa);
  if (n == 2) {
    const double arg = std::sqrt(kappa * area / (4.0 * kPi));
    return 2.0 * std::asin(std::min(arg, 1.0)) / k;
  }
  // Bracketed Newton on the monotone volume function.
  double lo = 0.0;
  double hi = myers_radius(kappa);
  double r = std::pow(area / omega, 1.0 / n);
  if (r >= hi) r = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    const BallSpec b = ball_metrics(kappa, n, r);
    const double diff = b.area - area;
    if (std::abs(diff) <= 1e-14 * area) return r;
    if (diff > 0.0) hi = r; else lo = r;
    double next = b.perimeter > 0.0 ? r - diff / b.perimeter : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * hi) return 0.5 * (lo + hi);
    r = next;
  }
  return r;
}

double iso_profile_a(double kappa, int n, double s) {
  check_dim(n);
  check_kappa(kappa);
  if (!(s > 0.0)) throw std::domain_error("iso_profile_a requires s > 0");
  const double omega = unit_ball_volume(n);
  if (kappa == 0.0) return 1.0 / (n * std::pow(omega, 1.0 / n));
  const double total = space_form_volume(kappa, n);
  if (s > total * (1.0 + 1e-12)) throw std::domain_error("iso_profile_a: s exceeds |M_kappa|");
  const double r = inverse_ball_area(kappa, n, std::min(s, total));
  const double perimeter = ball_metrics(kappa, n, r).perimeter;
  if (perimeter <= 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(s, (n - 1.0) / n) / perimeter;
}

double theta_of(const Manifold& m) {
  switch (m.kind()) {
    case ManifoldKind::plane: return 1.0;
    case ManifoldKind::sphere: return 1.0;
    case ManifoldKind::cone: return m.cone_fraction();
  }
  return 1.0;
}

}  // namespace symcomp
