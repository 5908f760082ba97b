#pragma once

// Bounded domains on the supported geometries. Every domain is described by
// a closed, counterclockwise boundary curve in a flat meshing chart and an
// embedding of that chart into R^2 (plane, cone chart) or onto the sphere of
// radius 1/sqrt(kappa) in R^3.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "symcomp/geometry.hpp"
#include "symcomp/vec.hpp"

namespace symcomp {

namespace shape {

struct Disk {
  double radius = 1.0;
  Vec2 center{};
};

struct Ellipse {
  double a = 1.0;  // semi-axis along x
  double b = 1.0;  // semi-axis along y
  Vec2 center{};
};

struct Polygon {
  std::vector<Vec2> vertices;
};

/// Geodesic disk of radius r0 around the north pole.
struct SphericalCap {
  double radius = 1.0;
};

/// Polygon with great-circle edges; vertices are directions (normalized
/// internally), and must lie in an open hemisphere.
struct GeodesicPolygon {
  std::vector<Vec3> vertices;
};

/// {r_inner <= |x| <= r_outer, angle_begin <= arg x <= angle_end}; angles in
/// radians of the (unrolled) chart.
struct AnnularSector {
  double r_inner = 0.5;
  double r_outer = 1.0;
  double angle_begin = 0.0;
  double angle_end = 1.0;
};

/// Disk in the unrolled cone chart with center at polar coordinates
/// (center_distance, center_angle).
struct ConeDisk {
  double radius = 1.0;
  double center_distance = 2.0;
  double center_angle = 1.0;
};

}  // namespace shape

using DomainSpec = std::variant<shape::Disk, shape::Ellipse, shape::Polygon, shape::SphericalCap,
                                shape::GeodesicPolygon, shape::AnnularSector, shape::ConeDisk>;

std::string describe(const DomainSpec& spec);

/// One smooth piece of a boundary curve, parametrized on [0, 1].
struct CurvePiece {
  enum class Kind { segment, arc, ellipse, great_arc } kind = Kind::segment;
  Vec2 a{}, b{};          // segment endpoints
  Vec2 center{};          // arc / ellipse
  double rx = 0.0, ry = 0.0;
  double angle0 = 0.0, angle1 = 0.0;  // arc / ellipse angular range
  // great_arc: unit endpoints and the stereographic frame of the chart
  Vec3 from{}, to{}, pole{}, e1{}, e2{};
  double sphere_radius = 0.0;

  Vec2 at(double u) const;
  double chart_length() const;
};

class Domain {
 public:
  Domain(DomainSpec spec, Manifold manifold);

  const DomainSpec& spec() const { return spec_; }
  const Manifold& manifold() const { return manifold_; }

  /// Boundary point in the meshing chart for parameter t in [0, 1).
  Vec2 chart_boundary(double t) const;
  /// Boundary point in the embedding.
  Vec3 boundary_point(double t) const { return embed(chart_boundary(t)); }
  /// Parameters of the piece starts (corners are always sampled).
  const std::vector<double>& piece_starts() const { return starts_; }
  const std::vector<CurvePiece>& pieces() const { return pieces_; }

  Vec3 embed(Vec2 chart) const;
  /// Reference point used by radial source expressions.
  Vec3 center() const { return center_; }
  /// Geodesic distance from center() to an embedded point.
  double distance_from_center(Vec3 p) const;

  /// Analytic area where known in closed form.
  std::optional<double> exact_area() const;

 private:
  enum class Chart { flat, stereographic };

  DomainSpec spec_;
  Manifold manifold_;
  std::vector<CurvePiece> pieces_;
  std::vector<double> starts_;
  double total_length_ = 0.0;
  Chart chart_ = Chart::flat;
  double sphere_radius_ = 0.0;
  Vec3 axis_{}, e1_{}, e2_{};
  Vec3 center_{};
};

/// Validates `spec` against `m` and builds the domain. Throws
/// std::invalid_argument on an invalid combination.
std::shared_ptr<const Domain> make_domain(const DomainSpec& spec, const Manifold& m);

}  // namespace symcomp
