#pragma once

#include <array>
#include <span>
#include <vector>

#include "symcomp/vec.hpp"

namespace symcomp {

/// Bowyer-Watson Delaunay triangulation of distinct points, inserted in the
/// given order. Returns counterclockwise triangles covering the convex hull.
std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Vec2> points);

}  // namespace symcomp
