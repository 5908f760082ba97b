#include "symcomp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <unordered_map>

#include "symcomp/delaunay.hpp"

namespace symcomp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

double angle_at(Vec3 p, Vec3 q, Vec3 r) {
  const Vec3 u = q - p;
  const Vec3 v = r - p;
  return std::atan2(norm(cross(u, v)), dot(u, v));
}

// Deterministic hash to [0, 1) used for lattice jitter.
double hash01(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

bool inside_polygon(const std::vector<Vec2>& poly, Vec2 p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * d));
}

double distance_to_polygon(const std::vector<Vec2>& poly, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    best = std::min(best, distance_to_segment(p, poly[i], poly[(i + 1) % poly.size()]));
  return best;
}

struct BoundarySamples {
  std::vector<double> params;
  std::vector<Vec2> chart;
};

BoundarySamples sample_boundary(const Domain& dom, double h) {
  BoundarySamples out;
  const auto& starts = dom.piece_starts();
  const std::size_t np = starts.size();
  constexpr int kSub = 1024;
  for (std::size_t k = 0; k < np; ++k) {
    const double t0 = starts[k];
    const double t1 = k + 1 < np ? starts[k + 1] : 1.0;
    const CurvePiece& piece = dom.pieces()[k];
    std::vector<double> cum(kSub + 1, 0.0);
    Vec3 prev = dom.embed(piece.at(0.0));
    for (int i = 1; i <= kSub; ++i) {
      const Vec3 cur = dom.embed(piece.at(static_cast<double>(i) / kSub));
      cum[i] = cum[i - 1] + norm(cur - prev);
      prev = cur;
    }
    const double length = cum.back();
    int count = std::max(1, static_cast<int>(std::ceil(length / h - 1e-9)));
    if (np == 1) count = std::max(count, 8);
    for (int j = 0; j < count; ++j) {
      const double target = length * j / count;
      auto it = std::lower_bound(cum.begin(), cum.end(), target);
      std::size_t i = static_cast<std::size_t>(std::distance(cum.begin(), it));
      double u;
      if (i == 0) {
        u = 0.0;
      } else {
        const double w = (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
        u = (static_cast<double>(i - 1) + w) / kSub;
      }
      const double t = t0 + u * (t1 - t0);
      out.params.push_back(t);
      out.chart.push_back(piece.at(u));
    }
  }
  return out;
}

std::vector<std::array<int, 3>> triangulate_inside(const std::vector<Vec2>& pts, const std::vector<Vec2>& poly) {
  auto tris = delaunay_triangulate(pts);
  std::erase_if(tris, [&](const std::array<int, 3>& t) {
    const Vec2 c = (1.0 / 3.0) * (pts[t[0]] + pts[t[1]] + pts[t[2]]);
    return !inside_polygon(poly, c);
  });
  return tris;
}

void require_boundary_edges(const std::vector<std::array<int, 3>>& tris, int nb) {
  std::unordered_map<std::uint64_t, int> directed;
  for (const auto& t : tris)
    for (int i = 0; i < 3; ++i) directed[edge_key(t[i], t[(i + 1) % 3])] = 1;
  for (int i = 0; i < nb; ++i) {
    const int j = (i + 1) % nb;
    if (!directed.count(edge_key(i, j))) {
      std::ostringstream os;
      os << "mesher could not recover boundary edge " << i << " -> " << j;
      throw MeshError(os.str());
    }
  }
}

}  // namespace

double triangle_area(Vec3 a, Vec3 b, Vec3 c) { return 0.5 * norm(cross(b - a, c - a)); }

Mesh::Mesh(Manifold manifold, std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<std::array<int, 2>> boundary, double h, std::vector<double> boundary_params,
           std::shared_ptr<const Domain> domain)
    : manifold_(manifold),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)),
      h_(h),
      boundary_params_(std::move(boundary_params)),
      domain_(std::move(domain)) {
  if (boundary_params_.empty()) boundary_params_.assign(vertices_.size(), kNaN);
  validate();
}

void Mesh::validate() {
  const int nv = static_cast<int>(vertices_.size());
  if (manifold_.dim() != 2) throw MeshError("meshes are 2-dimensional");
  if (nv < 3) throw MeshError("mesh needs at least 3 vertices");
  if (triangles_.empty()) throw MeshError("mesh has no triangles");
  if (!(h_ > 0.0)) throw MeshError("mesh size h must be > 0");
  if (boundary_params_.size() != vertices_.size()) throw MeshError("boundary parameter count mismatch");
  for (int i = 0; i < nv; ++i) {
    const Vec3& p = vertices_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw MeshError("vertex " + std::to_string(i) + " has non-finite coordinates");
  }
  if (manifold_.kind() == ManifoldKind::sphere) {
    const double r = sphere_radius();
    for (int i = 0; i < nv; ++i)
      if (std::abs(norm(vertices_[i]) - r) > 1e-9 * r)
        throw MeshError("vertex " + std::to_string(i) + " is not on the sphere");
  } else {
    for (int i = 0; i < nv; ++i)
      if (vertices_[i].z != 0.0) throw MeshError("vertex " + std::to_string(i) + " is not planar");
  }

  for (std::size_t t = 0; t < triangles_.size(); ++t)
    for (int v : triangles_[t])
      if (v < 0 || v >= nv)
        throw MeshError("triangle " + std::to_string(t) + ": vertex index " + std::to_string(v) + " out of range");

  areas_.resize(triangles_.size());
  total_area_ = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    areas_[t] = triangle_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    total_area_ += areas_[t];
  }
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    const Vec3 a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
    if (areas_[t] < 1e-14 * total_area_) throw MeshError("triangle " + std::to_string(t) + " is degenerate");
    const Vec3 nrm = cross(b - a, c - a);
    const double orientation =
        manifold_.kind() == ManifoldKind::sphere ? dot(nrm, a + b + c) : nrm.z;
    if (orientation <= 0.0) throw MeshError("triangle " + std::to_string(t) + " is not counterclockwise");
  }

  // Directed edges: each at most once, each undirected edge in at most two triangles.
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(3 * triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i], b = tri[(i + 1) % 3];
      if (a == b) throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
      if (!directed.emplace(edge_key(a, b), static_cast<int>(t)).second)
        throw MeshError("edge " + std::to_string(a) + "-" + std::to_string(b) +
                        " is shared inconsistently (non-manifold or misoriented)");
    }
  }

  // Boundary chain: closed, consecutive, and made of the unmatched directed edges.
  if (boundary_.empty()) throw MeshError("boundary not closed: empty boundary chain");
  for (std::size_t e = 0; e < boundary_.size(); ++e) {
    for (int v : boundary_[e])
      if (v < 0 || v >= nv)
        throw MeshError("boundary edge " + std::to_string(e) + ": vertex index " + std::to_string(v) +
                        " out of range");
    const auto& next = boundary_[(e + 1) % boundary_.size()];
    if (boundary_[e][1] != next[0]) throw MeshError("boundary not closed at edge " + std::to_string(e));
  }
  std::size_t unmatched = 0;
  for (const auto& [key, t] : directed) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (!directed.count(edge_key(b, a))) ++unmatched;
  }
  on_boundary_.assign(vertices_.size(), 0);
  std::vector<char> seen(vertices_.size(), 0);
  for (std::size_t e = 0; e < boundary_.size(); ++e) {
    const int a = boundary_[e][0], b = boundary_[e][1];
    if (!directed.count(edge_key(a, b)) || directed.count(edge_key(b, a)))
      throw MeshError("boundary not closed: edge " + std::to_string(e) + " (" + std::to_string(a) + " " +
                      std::to_string(b) + ") is not an outward boundary edge of the triangulation");
    if (seen[a]) throw MeshError("boundary not closed: vertex " + std::to_string(a) + " visited twice");
    seen[a] = 1;
    on_boundary_[a] = 1;
  }
  if (unmatched != boundary_.size())
    throw MeshError("boundary chain does not form exactly one closed loop (" + std::to_string(unmatched) +
                    " boundary edges in the triangulation, " + std::to_string(boundary_.size()) + " in the chain)");

  if (manifold_.kind() == ManifoldKind::cone) {
    double diameter = 0.0;
    for (const auto& e1 : boundary_)
      for (const auto& e2 : boundary_)
        diameter = std::max(diameter, norm(vertices_[e1[0]] - vertices_[e2[0]]));
    for (int i = 0; i < nv; ++i)
      if (norm(vertices_[i]) < 0.05 * diameter)
        throw MeshError("vertex " + std::to_string(i) + " lies within 0.05 diameter of the cone apex");
  }
}

double Mesh::sphere_radius() const {
  return manifold_.kind() == ManifoldKind::sphere ? 1.0 / std::sqrt(manifold_.kappa()) : 0.0;
}

double Mesh::boundary_edge_length(std::size_t e) const {
  return norm(vertices_[boundary_[e][1]] - vertices_[boundary_[e][0]]);
}

double Mesh::boundary_length() const {
  double total = 0.0;
  for (std::size_t e = 0; e < boundary_.size(); ++e) total += boundary_edge_length(e);
  return total;
}

double Mesh::min_angle_degrees() const {
  double best = 180.0;
  for (const auto& t : triangles_) {
    const Vec3 a = vertices_[t[0]], b = vertices_[t[1]], c = vertices_[t[2]];
    best = std::min({best, angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
  }
  return best * 180.0 / std::numbers::pi;
}

double Mesh::max_edge_length() const {
  double best = 0.0;
  for (const auto& t : triangles_)
    for (int i = 0; i < 3; ++i) best = std::max(best, norm(vertices_[t[(i + 1) % 3]] - vertices_[t[i]]));
  return best;
}

double boundary_edge_param(const Mesh& mesh, std::size_t e) {
  const auto& params = mesh.boundary_params();
  double ta = params[mesh.boundary()[e][0]];
  double tb = params[mesh.boundary()[e][1]];
  if (!std::isfinite(ta) || !std::isfinite(tb)) return kNaN;
  if (tb < ta) tb += 1.0;  // edge wraps through t = 0
  const double t = 0.5 * (ta + tb);
  return t - std::floor(t);
}

BoundaryField BoundaryField::constant(const Mesh& mesh, double beta) {
  return BoundaryField{std::vector<double>(mesh.boundary().size(), beta)};
}

BoundaryField BoundaryField::sample(const Mesh& mesh, const std::function<double(double, Vec3)>& beta) {
  BoundaryField field;
  field.values.reserve(mesh.boundary().size());
  for (std::size_t e = 0; e < mesh.boundary().size(); ++e) {
    const auto& edge = mesh.boundary()[e];
    const Vec3 mid = 0.5 * (mesh.vertices()[edge[0]] + mesh.vertices()[edge[1]]);
    field.values.push_back(beta(boundary_edge_param(mesh, e), mid));
  }
  return field;
}

void BoundaryField::validate(const Mesh& mesh, bool allow_zero) const {
  if (values.size() != mesh.boundary().size())
    throw std::invalid_argument("boundary field has " + std::to_string(values.size()) + " values for " +
                                std::to_string(mesh.boundary().size()) + " boundary edges");
  for (std::size_t e = 0; e < values.size(); ++e)
    if (!(values[e] > 0.0 || (allow_zero && values[e] == 0.0)) || !std::isfinite(values[e]))
      throw std::invalid_argument("beta must be positive and finite (edge " + std::to_string(e) + ", value " +
                                  std::to_string(values[e]) + ")");
}

MeshPtr build_mesh(const DomainSpec& spec, const Manifold& m, double h) { return build_mesh(make_domain(spec, m), h); }

MeshPtr build_mesh(const std::shared_ptr<const Domain>& domain, double h) {
  if (!domain) throw std::invalid_argument("build_mesh: null domain");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("build_mesh: h must be > 0");
  const Domain& dom = *domain;

  const BoundarySamples samples = sample_boundary(dom, h);
  const std::vector<Vec2>& poly = samples.chart;
  const int nb = static_cast<int>(poly.size());

  // Interior points: jittered hexagonal lattice clear of the boundary.
  double xmin = poly[0].x, xmax = poly[0].x, ymin = poly[0].y, ymax = poly[0].y;
  for (const Vec2& p : poly) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double dy = 0.5 * std::sqrt(3.0) * h;
  const int rows = static_cast<int>(std::ceil((ymax - ymin) / dy)) + 1;
  const int cols = static_cast<int>(std::ceil((xmax - xmin) / h)) + 2;
  std::vector<Vec2> pts = poly;
  for (int j = 0; j < rows; ++j) {
    const double y = ymin + (j + 0.5) * dy;
    for (int c = 0; c < cols; ++c) {
      const int i = (j % 2 == 0) ? c : cols - 1 - c;  // snake order keeps insertion local
      const std::uint64_t id = static_cast<std::uint64_t>(j) * 1000003ULL + static_cast<std::uint64_t>(i);
      Vec2 p{xmin + (i + (j % 2 == 0 ? 0.25 : 0.75)) * h, y};
      p.x += 1e-6 * h * (hash01(2 * id) - 0.5);
      p.y += 1e-6 * h * (hash01(2 * id + 1) - 0.5);
      if (!inside_polygon(poly, p)) continue;
      if (distance_to_polygon(poly, p) < 0.45 * h) continue;
      pts.push_back(p);
    }
  }

  auto tris = triangulate_inside(pts, poly);
  require_boundary_edges(tris, nb);

  // Laplacian smoothing of interior points, retriangulating after each sweep.
  for (int sweep = 0; sweep < 4; ++sweep) {
    std::vector<Vec2> sum(pts.size(), Vec2{});
    std::vector<int> count(pts.size(), 0);
    for (const auto& t : tris)
      for (int i = 0; i < 3; ++i)
        for (int k = 1; k < 3; ++k) {
          sum[t[i]] = sum[t[i]] + pts[t[(i + k) % 3]];
          ++count[t[i]];
        }
    std::vector<Vec2> moved = pts;
    for (std::size_t i = static_cast<std::size_t>(nb); i < pts.size(); ++i) {
      if (count[i] == 0) continue;
      const Vec2 target = (1.0 / count[i]) * sum[i];
      if (inside_polygon(poly, target) && distance_to_polygon(poly, target) >= 0.3 * h) moved[i] = target;
    }
    pts = std::move(moved);
    tris = triangulate_inside(pts, poly);
    require_boundary_edges(tris, nb);
  }

  std::vector<char> used(pts.size(), 0);
  for (const auto& t : tris)
    for (int v : t) used[v] = 1;
  // Drop unreferenced points (can only happen for points the filter isolated).
  std::vector<int> remap(pts.size(), -1);
  std::vector<Vec3> vertices;
  std::vector<double> params;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!used[i]) {
      if (static_cast<int>(i) < nb) throw MeshError("mesher lost a boundary vertex");
      continue;
    }
    remap[i] = static_cast<int>(vertices.size());
    vertices.push_back(dom.embed(pts[i]));
    params.push_back(static_cast<int>(i) < nb ? samples.params[i] : kNaN);
  }
  for (auto& t : tris)
    for (int& v : t) v = remap[v];
  std::vector<std::array<int, 2>> boundary;
  for (int i = 0; i < nb; ++i) boundary.push_back({i, (i + 1) % nb});

  auto mesh = std::make_shared<const Mesh>(dom.manifold(), std::move(vertices), std::move(tris), std::move(boundary),
                                           h, std::move(params), domain);
  const double min_angle = mesh->min_angle_degrees();
  const double max_edge = mesh->max_edge_length();
  if (min_angle < 20.0 || max_edge > 1.5 * h) {
    std::ostringstream os;
    os << "mesh quality check failed for " << describe(dom.spec()) << " at h=" << h << ": min angle " << min_angle
       << " deg, max edge " << max_edge;
    throw MeshError(os.str());
  }
  return mesh;
}

MeshPtr refine(const Mesh& mesh, std::vector<std::array<int, 2>>* parents) {
  const auto& verts = mesh.vertices();
  const auto& params = mesh.boundary_params();
  const bool sphere = mesh.manifold().kind() == ManifoldKind::sphere;
  const double radius = mesh.sphere_radius();
  const Domain* dom = mesh.domain().get();

  std::vector<Vec3> vertices = verts;
  std::vector<double> new_params = params;
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(3 * mesh.triangle_count());
  if (parents) {
    parents->clear();
    for (int v = 0; v < static_cast<int>(verts.size()); ++v) parents->push_back({v, v});
  }

  std::unordered_map<std::uint64_t, char> is_boundary;
  for (const auto& e : mesh.boundary()) is_boundary[edge_key(std::min(e[0], e[1]), std::max(e[0], e[1]))] = 1;

  auto mid = [&](int a, int b) {
    const std::uint64_t key = edge_key(std::min(a, b), std::max(a, b));
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec3 p = 0.5 * (verts[a] + verts[b]);
    double param = kNaN;
    if (is_boundary.count(key)) {
      double ta = params[a], tb = params[b];
      if (dom && std::isfinite(ta) && std::isfinite(tb)) {
        if (tb < ta) tb += 1.0;  // triangle edges run along the boundary direction
        param = 0.5 * (ta + tb);
        param -= std::floor(param);
        p = dom->boundary_point(param);
      }
    }
    if (sphere && !std::isfinite(param)) p = radius * normalized(p);
    const int idx = static_cast<int>(vertices.size());
    vertices.push_back(p);
    new_params.push_back(param);
    midpoint.emplace(key, idx);
    if (parents) parents->push_back({a, b});
    return idx;
  };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.triangle_count());
  for (const auto& t : mesh.triangles()) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    tris.push_back({a, ab, ca});
    tris.push_back({ab, b, bc});
    tris.push_back({ca, bc, c});
    tris.push_back({ab, bc, ca});
  }
  std::vector<std::array<int, 2>> boundary;
  boundary.reserve(2 * mesh.boundary().size());
  for (const auto& e : mesh.boundary()) {
    const int m = midpoint.at(edge_key(std::min(e[0], e[1]), std::max(e[0], e[1])));
    boundary.push_back({e[0], m});
    boundary.push_back({m, e[1]});
  }
  return std::make_shared<const Mesh>(mesh.manifold(), std::move(vertices), std::move(tris), std::move(boundary),
                                      0.5 * mesh.h(), std::move(new_params), mesh.domain());
}

}  // namespace symcomp
