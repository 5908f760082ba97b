#include "symcomp/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symcomp {

namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
};

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

// > 0 when p lies strictly inside the circumcircle of the ccw triangle abc.
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  const double adx = a.x - p.x, ady = a.y - p.y;
  const double bdx = b.x - p.x, bdy = b.y - p.y;
  const double cdx = c.x - p.x, cdy = c.y - p.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

struct BoundaryEdge {
  int a, b;
  int outer;
  int inner;  // cavity triangle that owned the edge
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Vec2> input) {
  const int n = static_cast<int>(input.size());
  if (n < 3) throw std::invalid_argument("delaunay: need at least 3 points");

  std::vector<Vec2> pts(input.begin(), input.end());
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const Vec2& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double d = std::max({xmax - xmin, ymax - ymin, 1e-300});
  const Vec2 c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  pts.push_back({c.x - 40.0 * d, c.y - 30.0 * d});
  pts.push_back({c.x + 40.0 * d, c.y - 30.0 * d});
  pts.push_back({c.x, c.y + 40.0 * d});

  std::vector<Tri> tris;
  tris.reserve(2 * static_cast<std::size_t>(n) + 8);
  tris.push_back({{n, n + 1, n + 2}, {-1, -1, -1}});
  std::vector<int> free_slots;
  std::vector<char> alive{1};
  std::vector<unsigned> stamp{0};
  unsigned current = 0;

  std::vector<int> cavity;
  std::vector<int> stack;
  std::vector<BoundaryEdge> rim;
  std::vector<int> created;
  int hint = 0;

  auto locate = [&](Vec2 p) {
    int t = hint;
    const std::size_t max_steps = 4 * tris.size() + 64;
    for (std::size_t step = 0; step < max_steps; ++step) {
      const Tri& tri = tris[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = static_cast<int>((k + step) % 3);
        if (orient(pts[tri.v[(i + 1) % 3]], pts[tri.v[(i + 2) % 3]], p) < 0.0) {
          next = tri.nb[i];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Walk did not terminate (numerical cycling); fall back to a scan.
    for (std::size_t i = 0; i < tris.size(); ++i) {
      if (!alive[i]) continue;
      const Tri& tri = tris[i];
      if (orient(pts[tri.v[0]], pts[tri.v[1]], p) >= 0 && orient(pts[tri.v[1]], pts[tri.v[2]], p) >= 0 &&
          orient(pts[tri.v[2]], pts[tri.v[0]], p) >= 0)
        return static_cast<int>(i);
    }
    throw std::runtime_error("delaunay: point location failed");
  };

  for (int pi = 0; pi < n; ++pi) {
    const Vec2 p = pts[pi];
    const int start = locate(p);
    ++current;
    cavity.clear();
    rim.clear();
    stack.assign(1, start);
    stamp[start] = current;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      cavity.push_back(t);
      for (int i = 0; i < 3; ++i) {
        const int nb = tris[t].nb[i];
        const int a = tris[t].v[(i + 1) % 3];
        const int b = tris[t].v[(i + 2) % 3];
        if (nb >= 0 && stamp[nb] == current) continue;  // already in the cavity
        // Edges that p does not strictly see from inside are always crossed;
        // this keeps every new triangle counterclockwise.
        const bool bad = nb >= 0 && (orient(pts[a], pts[b], p) <= 0.0 ||
                                     incircle(pts[tris[nb].v[0]], pts[tris[nb].v[1]], pts[tris[nb].v[2]], p) > 0.0);
        if (bad) {
          stamp[nb] = current;
          stack.push_back(nb);
        } else {
          rim.push_back({a, b, nb, t});
        }
      }
    }
    // A rim edge reached from both sides would mean the neighbour joined the
    // cavity later; drop such edges.
    std::erase_if(rim, [&](const BoundaryEdge& e) { return e.outer >= 0 && stamp[e.outer] == current; });

    for (int t : cavity) {
      alive[t] = 0;
      free_slots.push_back(t);
    }
    created.clear();
    for (const BoundaryEdge& e : rim) {
      int slot;
      if (!free_slots.empty()) {
        slot = free_slots.back();
        free_slots.pop_back();
      } else {
        slot = static_cast<int>(tris.size());
        tris.push_back({});
        alive.push_back(0);
        stamp.push_back(0);
      }
      tris[slot] = {{pi, e.a, e.b}, {e.outer, -1, -1}};
      alive[slot] = 1;
      stamp[slot] = 0;
      if (e.outer >= 0) {
        Tri& o = tris[e.outer];
        for (int j = 0; j < 3; ++j)
          if (o.nb[j] == e.inner && o.v[(j + 1) % 3] == e.b && o.v[(j + 2) % 3] == e.a) o.nb[j] = slot;
      }
      created.push_back(slot);
    }
    for (int s : created) {
      Tri& t = tris[s];
      for (int o : created) {
        if (o == s) continue;
        if (tris[o].v[1] == t.v[2]) t.nb[1] = o;  // edge (b, p)
        if (tris[o].v[2] == t.v[1]) t.nb[2] = o;  // edge (p, a)
      }
    }
    hint = created.empty() ? 0 : created.back();
  }

  std::vector<std::array<int, 3>> out;
  out.reserve(tris.size());
  for (std::size_t i = 0; i < tris.size(); ++i) {
    if (!alive[i]) continue;
    const auto& v = tris[i].v;
    if (v[0] >= n || v[1] >= n || v[2] >= n) continue;
    out.push_back(v);
  }
  return out;
}

}  // namespace symcomp
