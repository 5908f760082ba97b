#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "symcomp/mesh.hpp"
#include "symcomp/mesh_io.hpp"

using namespace symcomp;
constexpr double pi = std::numbers::pi;

namespace {

void check_structure(const Mesh& m, double h) {
  CHECK(m.min_angle_degrees() >= 20.0);
  CHECK(m.max_edge_length() <= 1.5 * h);
  // boundary closure for planar meshes
  if (m.manifold().kind() != ManifoldKind::sphere) {
    double sx = 0, sy = 0;
    for (const auto& e : m.boundary()) {
      sx += m.vertices()[e[1]].x - m.vertices()[e[0]].x;
      sy += m.vertices()[e[1]].y - m.vertices()[e[0]].y;
    }
    CHECK(std::abs(sx) < 1e-12);
    CHECK(std::abs(sy) < 1e-12);
  }
}

}  // namespace

TEST_CASE("disk mesh") {
  const MeshPtr m = build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), 0.1);
  check_structure(*m, 0.1);
  CHECK(m->area() == doctest::Approx(pi).epsilon(0.01));
  CHECK(std::abs(m->area() - pi) <= 2 * 0.1 * 0.1 * pi);
}

TEST_CASE("square mesh is exact") {
  const MeshPtr m = build_mesh(shape::Polygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}, Manifold::plane(), 0.25);
  check_structure(*m, 0.25);
  CHECK(std::abs(m->area() - 1.0) < 1e-10);
  CHECK(m->boundary_length() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("L-shape, ellipse, annular sector") {
  const MeshPtr L =
      build_mesh(shape::Polygon{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}}, Manifold::plane(), 0.1);
  check_structure(*L, 0.1);
  CHECK(std::abs(L->area() - 3.0) < 1e-10);
  const MeshPtr E = build_mesh(shape::Ellipse{2.0, 1.0, {}}, Manifold::plane(), 0.1);
  check_structure(*E, 0.1);
  CHECK(E->area() == doctest::Approx(2 * pi).epsilon(0.01));
  const MeshPtr A = build_mesh(shape::AnnularSector{0.5, 1.0, 0.0, 2.0}, Manifold::plane(), 0.08);
  check_structure(*A, 0.08);
  CHECK(A->area() == doctest::Approx(0.5 * 2.0 * (1.0 - 0.25)).epsilon(0.01));
}

TEST_CASE("spherical cap mesh") {
  const MeshPtr m = build_mesh(shape::SphericalCap{pi / 3}, Manifold::sphere(1.0), 0.05);
  check_structure(*m, 0.05);
  CHECK(m->area() == doctest::Approx(pi).epsilon(0.01));
  for (const auto& v : m->vertices()) CHECK(std::abs(std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z) - 1.0) < 1e-12);
  // smaller sphere: kappa = 4, radius 1/2
  const MeshPtr s = build_mesh(shape::SphericalCap{0.5}, Manifold::sphere(4.0), 0.05);
  CHECK(s->area() == doctest::Approx(ball_metrics(4.0, 2, 0.5).area).epsilon(0.01));
}

TEST_CASE("geodesic polygon mesh") {
  const MeshPtr m = build_mesh(shape::GeodesicPolygon{{{1, 0, 1.2}, {0, 1, 1.2}, {-1, 0, 1.2}, {0, -1, 1.2}}},
                               Manifold::sphere(1.0), 0.06);
  check_structure(*m, 0.06);
  // spherical excess of the quadrilateral
  auto unit = [](Vec3 v) {
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    return Vec3{v.x / n, v.y / n, v.z / n};
  };
  const Vec3 a = unit({1, 0, 1.2}), b = unit({0, 1, 1.2}), c = unit({-1, 0, 1.2});
  // triangle abc area by l'Huilier-free formula: tan(E/2) = |a.(b x c)| / (1 + a.b + b.c + c.a)
  auto tri = [](Vec3 p, Vec3 q, Vec3 r) {
    const double triple = p.x * (q.y * r.z - q.z * r.y) - p.y * (q.x * r.z - q.z * r.x) + p.z * (q.x * r.y - q.y * r.x);
    const double d = 1 + p.x * q.x + p.y * q.y + p.z * q.z + q.x * r.x + q.y * r.y + q.z * r.z + r.x * p.x + r.y * p.y + r.z * p.z;
    return 2 * std::atan2(std::abs(triple), d);
  };
  const double exact = 2 * tri(a, b, c);
  CHECK(m->area() == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("cone disk mesh avoids the apex") {
  const Manifold cone = Manifold::cone(0.75);
  const MeshPtr m = build_mesh(shape::ConeDisk{1.0, 2.0, 0.75 * pi}, cone, 0.1);
  check_structure(*m, 0.1);
  CHECK(m->area() == doctest::Approx(pi).epsilon(0.01));
  // a disk through the apex is rejected
  CHECK_THROWS(build_mesh(shape::ConeDisk{1.0, 0.5, 0.75 * pi}, cone, 0.1));
  // a disk crossing the seam is rejected
  CHECK_THROWS(build_mesh(shape::ConeDisk{1.0, 2.0, 0.1}, cone, 0.1));
}

TEST_CASE("invalid specs") {
  CHECK_THROWS(build_mesh(shape::Disk{-1.0, {}}, Manifold::plane(), 0.1));
  CHECK_THROWS(build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), 0.0));
  CHECK_THROWS(build_mesh(shape::SphericalCap{1.0}, Manifold::plane(), 0.1));
  CHECK_THROWS(build_mesh(shape::Disk{1.0, {}}, Manifold::sphere(1.0), 0.1));
  CHECK_THROWS(build_mesh(shape::Polygon{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}, Manifold::plane(), 0.1));  // self-intersecting
}

TEST_CASE("refinement") {
  const MeshPtr m = build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), 0.2);
  std::vector<std::array<int, 2>> parents;
  const MeshPtr r = refine(*m, &parents);
  CHECK(r->triangle_count() == 4 * m->triangle_count());
  CHECK(r->boundary().size() == 2 * m->boundary().size());
  CHECK(r->h() == doctest::Approx(0.1));
  CHECK(parents.size() == r->vertex_count());
  for (std::size_t i = 0; i < m->vertex_count(); ++i) CHECK(parents[i] == std::array<int, 2>{int(i), int(i)});
  // interior midpoints sit at the midpoint of their parents
  for (std::size_t i = m->vertex_count(); i < r->vertex_count(); ++i) {
    if (r->is_boundary_vertex(int(i))) continue;
    const Vec3 a = m->vertices()[parents[i][0]], b = m->vertices()[parents[i][1]];
    CHECK(std::abs(r->vertices()[i].x - 0.5 * (a.x + b.x)) < 1e-15);
  }
  // boundary midpoints lie on the circle
  for (const auto& e : r->boundary()) {
    const Vec3 p = r->vertices()[e[0]];
    CHECK(std::abs(std::hypot(p.x, p.y) - 1.0) < 1e-12);
  }
  // area error decreases by a factor >= 3.5 per refinement
  MeshPtr cur = m;
  double err = std::abs(cur->area() - pi);
  for (int k = 0; k < 3; ++k) {
    cur = refine(*cur);
    const double e = std::abs(cur->area() - pi);
    CHECK(err / e >= 3.5);
    err = e;
  }
}

TEST_CASE("sphere refinement stays on the sphere") {
  const MeshPtr m = build_mesh(shape::SphericalCap{pi / 3}, Manifold::sphere(1.0), 0.1);
  const MeshPtr r = refine(*m);
  for (const auto& v : r->vertices()) CHECK(std::abs(std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z) - 1.0) < 1e-12);
  CHECK(std::abs(r->area() - pi) < std::abs(m->area() - pi));
}

TEST_CASE("mesh file round trip") {
  for (const MeshPtr& m : {build_mesh(shape::Ellipse{2.0, 1.0, {}}, Manifold::plane(), 0.2),
                           build_mesh(shape::SphericalCap{1.0}, Manifold::sphere(1.0), 0.2)}) {
    BoundaryField beta = BoundaryField::sample(*m, [](double t, Vec3) { return 1.0 + t; });
    const std::string text = export_mesh(*m, beta);
    const ImportedMesh back = import_mesh(text);
    CHECK(back.mesh->vertices() == m->vertices());
    CHECK(back.mesh->triangles() == m->triangles());
    CHECK(back.mesh->boundary() == m->boundary());
    CHECK(back.beta.values == beta.values);
    CHECK(export_mesh(*back.mesh, back.beta) == text);
  }
}

TEST_CASE("mesh file errors") {
  const std::string good =
      "symcomp-mesh v1\nmanifold plane 0 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\nboundary 3\n0 1 1\n1 2 1\n2 0 1\n";
  CHECK_NOTHROW(import_mesh(good));
  std::string dangling = good;
  dangling.replace(dangling.find("0 1 2"), 5, "0 1 7");
  try {
    import_mesh(dangling);
    FAIL("expected an error");
  } catch (const MeshError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("triangle record 0") != std::string::npos);
    CHECK(msg.find("7") != std::string::npos);
  }
  std::string open_chain = good;
  open_chain.replace(open_chain.find("2 0 1\n"), 6, "2 1 1\n");
  try {
    import_mesh(open_chain);
    FAIL("expected an error");
  } catch (const MeshError& e) {
    CHECK(std::string(e.what()).find("boundary not closed") != std::string::npos);
  }
  CHECK_THROWS_AS(import_mesh("symcomp-mesh v2\n"), MeshError);
  CHECK_THROWS_AS(import_mesh(good.substr(0, 40)), MeshError);
}

TEST_CASE("boundary field validation") {
  const MeshPtr m = build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), 0.3);
  BoundaryField b = BoundaryField::constant(*m, 1.0);
  CHECK_NOTHROW(b.validate(*m));
  b.values[0] = -1.0;
  CHECK_THROWS_AS(b.validate(*m), std::invalid_argument);
  b.values.pop_back();
  CHECK_THROWS_AS(b.validate(*m), std::invalid_argument);
}
