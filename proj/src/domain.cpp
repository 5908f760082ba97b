#include "symcomp/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "symcomp/quadrature.hpp"

namespace symcomp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

void check_simple_polygon(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if (norm(poly[(i + 1) % n] - poly[i]) <= 0.0) throw std::invalid_argument("polygon has repeated vertices");
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
        throw std::invalid_argument("polygon is self-intersecting");
    }
  }
  if (std::abs(signed_area(poly)) <= 0.0) throw std::invalid_argument("polygon has zero area");
}

std::vector<CurvePiece> polygon_pieces(std::vector<Vec2> poly) {
  check_simple_polygon(poly);
  if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  std::vector<CurvePiece> pieces;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    CurvePiece p;
    p.kind = CurvePiece::Kind::segment;
    p.a = poly[i];
    p.b = poly[(i + 1) % poly.size()];
    pieces.push_back(p);
  }
  return pieces;
}

CurvePiece full_ellipse(Vec2 center, double rx, double ry) {
  CurvePiece p;
  p.kind = CurvePiece::Kind::ellipse;
  p.center = center;
  p.rx = rx;
  p.ry = ry;
  p.angle0 = 0.0;
  p.angle1 = kTwoPi;
  return p;
}

CurvePiece arc(double radius, double a0, double a1) {
  CurvePiece p;
  p.kind = CurvePiece::Kind::arc;
  p.rx = p.ry = radius;
  p.angle0 = a0;
  p.angle1 = a1;
  return p;
}

CurvePiece segment(Vec2 a, Vec2 b) {
  CurvePiece p;
  p.kind = CurvePiece::Kind::segment;
  p.a = a;
  p.b = b;
  return p;
}

double polar_angle(Vec2 p) {
  double a = std::atan2(p.y, p.x);
  if (a < 0.0) a += kTwoPi;
  return a;
}

Vec3 any_perpendicular(Vec3 n) {
  const Vec3 trial = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  return normalized(trial - dot(trial, n) * n);
}

}  // namespace

std::string describe(const DomainSpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const shape::Disk& d) { os << "disk(R=" << d.radius << ")"; },
                 [&](const shape::Ellipse& e) { os << "ellipse(a=" << e.a << ", b=" << e.b << ")"; },
                 [&](const shape::Polygon& p) { os << "polygon(" << p.vertices.size() << " vertices)"; },
                 [&](const shape::SphericalCap& c) { os << "spherical_cap(r0=" << c.radius << ")"; },
                 [&](const shape::GeodesicPolygon& p) {
                   os << "geodesic_polygon(" << p.vertices.size() << " vertices)";
                 },
                 [&](const shape::AnnularSector& s) {
                   os << "annular_sector(r=[" << s.r_inner << ", " << s.r_outer << "], angle=[" << s.angle_begin
                      << ", " << s.angle_end << "])";
                 },
                 [&](const shape::ConeDisk& d) {
                   os << "cone_disk(R=" << d.radius << ", center=(" << d.center_distance << ", "
                      << d.center_angle << "))";
                 },
             },
             spec);
  return os.str();
}

Vec2 CurvePiece::at(double u) const {
  switch (kind) {
    case Kind::segment: return a + u * (b - a);
    case Kind::great_arc: {
      const double omega = std::atan2(norm(cross(from, to)), dot(from, to));
      const Vec3 w = (std::sin((1.0 - u) * omega) / std::sin(omega)) * from + (std::sin(u * omega) / std::sin(omega)) * to;
      const double scale = 2.0 * sphere_radius / (1.0 + dot(w, pole));
      return {scale * dot(w, e1), scale * dot(w, e2)};
    }
    case Kind::arc:
    case Kind::ellipse: {
      const double ang = angle0 + u * (angle1 - angle0);
      return {center.x + rx * std::cos(ang), center.y + ry * std::sin(ang)};
    }
  }
  return a;
}

double CurvePiece::chart_length() const {
  switch (kind) {
    case Kind::segment: return norm(b - a);
    case Kind::great_arc: {
      double len = 0.0;
      Vec2 prev = at(0.0);
      for (int i = 1; i <= 512; ++i) {
        const Vec2 cur = at(i / 512.0);
        len += norm(cur - prev);
        prev = cur;
      }
      return len;
    }
    case Kind::arc: return rx * std::abs(angle1 - angle0);
    case Kind::ellipse:
      return quad::adaptive_gauss(
          [&](double ang) { return std::hypot(rx * std::sin(ang), ry * std::cos(ang)); }, angle0, angle1,
          1e-13);
  }
  return 0.0;
}

Domain::Domain(DomainSpec spec, Manifold manifold) : spec_(std::move(spec)), manifold_(manifold) {
  if (manifold_.dim() != 2) throw std::invalid_argument("meshing requires a 2-dimensional manifold");
  const ManifoldKind kind = manifold_.kind();
  const bool on_sphere = kind == ManifoldKind::sphere;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(describe(spec_) + ": " + msg);
  };

  std::visit(
      Overloaded{
          [&](const shape::Disk& d) {
            require(!on_sphere, "use spherical_cap on the sphere");
            require(d.radius > 0.0, "radius must be > 0");
            pieces_.push_back(full_ellipse(d.center, d.radius, d.radius));
            center_ = {d.center.x, d.center.y, 0.0};
          },
          [&](const shape::Ellipse& e) {
            require(!on_sphere, "ellipse is planar only");
            require(e.a > 0.0 && e.b > 0.0, "semi-axes must be > 0");
            pieces_.push_back(full_ellipse(e.center, e.a, e.b));
            center_ = {e.center.x, e.center.y, 0.0};
          },
          [&](const shape::Polygon& p) {
            require(!on_sphere, "use geodesic_polygon on the sphere");
            pieces_ = polygon_pieces(p.vertices);
            // area centroid
            double a = 0.0, cx = 0.0, cy = 0.0;
            for (const CurvePiece& piece : pieces_) {
              const double w = cross(piece.a, piece.b);
              a += w;
              cx += (piece.a.x + piece.b.x) * w;
              cy += (piece.a.y + piece.b.y) * w;
            }
            center_ = {cx / (3.0 * a), cy / (3.0 * a), 0.0};
          },
          [&](const shape::SphericalCap& c) {
            require(on_sphere, "spherical_cap requires the sphere");
            sphere_radius_ = 1.0 / std::sqrt(manifold_.kappa());
            require(c.radius > 0.0 && c.radius < kPi * sphere_radius_, "cap radius must lie in (0, pi/sqrt(kappa))");
            chart_ = Chart::stereographic;
            axis_ = {0, 0, 1};
            e1_ = {1, 0, 0};
            e2_ = {0, 1, 0};
            const double rho = 2.0 * sphere_radius_ * std::tan(0.5 * c.radius / sphere_radius_);
            pieces_.push_back(full_ellipse({0, 0}, rho, rho));
            center_ = sphere_radius_ * axis_;
          },
          [&](const shape::GeodesicPolygon& p) {
            require(on_sphere, "geodesic_polygon requires the sphere");
            require(p.vertices.size() >= 3, "needs at least 3 vertices");
            sphere_radius_ = 1.0 / std::sqrt(manifold_.kappa());
            chart_ = Chart::stereographic;
            std::vector<Vec3> dirs;
            Vec3 sum{};
            for (const Vec3& v : p.vertices) {
              require(norm(v) > 0.0, "vertex direction must be nonzero");
              dirs.push_back(normalized(v));
              sum = sum + dirs.back();
            }
            require(norm(sum) > 1e-12, "vertices are not contained in an open hemisphere");
            axis_ = normalized(sum);
            for (const Vec3& v : dirs)
              require(dot(v, axis_) > 1e-6, "vertices must lie in an open hemisphere around their mean");
            e1_ = any_perpendicular(axis_);
            e2_ = cross(axis_, e1_);
            // Great circles are straight in the gnomonic chart: check simplicity
            // and orientation there, then mesh in the conformal stereographic chart.
            std::vector<Vec2> gnomonic;
            for (const Vec3& v : dirs) {
              const double w = dot(v, axis_);
              gnomonic.push_back({dot(v, e1_) / w, dot(v, e2_) / w});
            }
            check_simple_polygon(gnomonic);
            if (signed_area(gnomonic) < 0.0) std::reverse(dirs.begin(), dirs.end());
            for (std::size_t i = 0; i < dirs.size(); ++i) {
              CurvePiece piece;
              piece.kind = CurvePiece::Kind::great_arc;
              piece.from = dirs[i];
              piece.to = dirs[(i + 1) % dirs.size()];
              piece.pole = axis_;
              piece.e1 = e1_;
              piece.e2 = e2_;
              piece.sphere_radius = sphere_radius_;
              pieces_.push_back(piece);
            }
            center_ = sphere_radius_ * axis_;
          },
          [&](const shape::AnnularSector& s) {
            require(!on_sphere, "annular_sector is a flat-chart shape");
            require(s.r_inner >= 0.0 && s.r_outer > s.r_inner, "need 0 <= r_inner < r_outer");
            require(s.angle_end > s.angle_begin && s.angle_end - s.angle_begin < kTwoPi,
                    "angle range must be nonempty and shorter than a full turn");
            const Vec2 ob{s.r_outer * std::cos(s.angle_begin), s.r_outer * std::sin(s.angle_begin)};
            const Vec2 oe{s.r_outer * std::cos(s.angle_end), s.r_outer * std::sin(s.angle_end)};
            const Vec2 ib{s.r_inner * std::cos(s.angle_begin), s.r_inner * std::sin(s.angle_begin)};
            const Vec2 ie{s.r_inner * std::cos(s.angle_end), s.r_inner * std::sin(s.angle_end)};
            pieces_.push_back(arc(s.r_outer, s.angle_begin, s.angle_end));
            pieces_.push_back(segment(oe, ie));
            if (s.r_inner > 0.0) pieces_.push_back(arc(s.r_inner, s.angle_end, s.angle_begin));
            pieces_.push_back(segment(ib, ob));
            const double rm = 0.5 * (s.r_inner + s.r_outer);
            const double am = 0.5 * (s.angle_begin + s.angle_end);
            center_ = {rm * std::cos(am), rm * std::sin(am), 0.0};
          },
          [&](const shape::ConeDisk& d) {
            require(kind == ManifoldKind::cone, "cone_disk requires the cone");
            require(d.radius > 0.0, "radius must be > 0");
            const Vec2 c{d.center_distance * std::cos(d.center_angle), d.center_distance * std::sin(d.center_angle)};
            pieces_.push_back(full_ellipse(c, d.radius, d.radius));
            center_ = {c.x, c.y, 0.0};
          },
      },
      spec_);

  if (kind == ManifoldKind::cone) {
    // Domain must avoid the apex neighborhood and stay inside the open
    // sector (0, 2 pi fraction) so that the seam is never crossed.
    const double sector = kTwoPi * manifold_.cone_fraction();
    std::vector<Vec2> samples;
    for (const CurvePiece& piece : pieces_)
      for (int i = 0; i < 256; ++i) samples.push_back(piece.at(i / 256.0));
    double diameter = 0.0;
    for (std::size_t i = 0; i < samples.size(); i += 4)
      for (std::size_t j = i + 4; j < samples.size(); j += 4) diameter = std::max(diameter, norm(samples[i] - samples[j]));
    for (const Vec2& p : samples) {
      require(norm(p) >= 0.05 * diameter, "domain comes within 0.05 diameter of the cone apex");
      const double ang = polar_angle(p);
      require(ang > 0.0 && ang < sector, "domain crosses the cone seam");
    }
    // apex outside: winding number of the boundary around the origin is zero
    double winding = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Vec2 a = samples[i];
      const Vec2 b = samples[(i + 1) % samples.size()];
      winding += std::atan2(cross(a, b), dot(a, b));
    }
    require(std::abs(winding) < kPi, "domain contains the cone apex");
  }

  starts_.reserve(pieces_.size() + 1);
  double acc = 0.0;
  for (const CurvePiece& piece : pieces_) {
    starts_.push_back(acc);
    acc += piece.chart_length();
  }
  total_length_ = acc;
  for (double& s : starts_) s /= total_length_;
}

Vec2 Domain::chart_boundary(double t) const {
  t -= std::floor(t);
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  const std::size_t k = static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
  const double t0 = starts_[k];
  const double t1 = k + 1 < starts_.size() ? starts_[k + 1] : 1.0;
  const double u = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
  return pieces_[k].at(u);
}

Vec3 Domain::embed(Vec2 q) const {
  switch (chart_) {
    case Chart::flat: return {q.x, q.y, 0.0};
    case Chart::stereographic: {
      const double rho = norm(q);
      if (rho == 0.0) return sphere_radius_ * axis_;
      const double psi = 2.0 * std::atan(0.5 * rho / sphere_radius_);
      const Vec3 dir = (q.x / rho) * e1_ + (q.y / rho) * e2_;
      return sphere_radius_ * (std::sin(psi) * dir + std::cos(psi) * axis_);
    }
  }
  return {};
}

double Domain::distance_from_center(Vec3 p) const {
  if (chart_ == Chart::flat) return norm(p - center_);
  return sphere_radius_ * std::atan2(norm(cross(center_, p)), dot(center_, p));
}

std::optional<double> Domain::exact_area() const {
  return std::visit(
      Overloaded{
          [&](const shape::Disk& d) -> std::optional<double> { return kPi * d.radius * d.radius; },
          [&](const shape::Ellipse& e) -> std::optional<double> { return kPi * e.a * e.b; },
          [&](const shape::Polygon& p) -> std::optional<double> { return std::abs(signed_area(p.vertices)); },
          [&](const shape::SphericalCap& c) -> std::optional<double> {
            return ball_metrics(manifold_.kappa(), 2, c.radius).area;
          },
          [&](const shape::GeodesicPolygon& p) -> std::optional<double> {
            std::vector<Vec3> v;
            for (const Vec3& x : p.vertices) v.push_back(normalized(x));
            double excess = 0.0;
            for (std::size_t i = 1; i + 1 < v.size(); ++i) {
              const Vec3 a = v[0], b = v[i], c = v[i + 1];
              excess += 2.0 * std::atan2(dot(a, cross(b, c)), 1.0 + dot(a, b) + dot(b, c) + dot(c, a));
            }
            return std::abs(excess) * sphere_radius_ * sphere_radius_;
          },
          [&](const shape::AnnularSector& s) -> std::optional<double> {
            return 0.5 * (s.angle_end - s.angle_begin) * (s.r_outer * s.r_outer - s.r_inner * s.r_inner);
          },
          [&](const shape::ConeDisk& d) -> std::optional<double> { return kPi * d.radius * d.radius; },
      },
      spec_);
}

std::shared_ptr<const Domain> make_domain(const DomainSpec& spec, const Manifold& m) {
  return std::make_shared<const Domain>(spec, m);
}

}  // namespace symcomp
