#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "symcomp/domain.hpp"
#include "symcomp/geometry.hpp"
#include "symcomp/vec.hpp"

namespace symcomp {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Triangulation of a bounded domain. Triangles are counterclockwise (seen
/// from outside the sphere on curved meshes); `boundary` is one closed chain
/// of directed edges with the domain on the left. Immutable once built; the
/// constructor checks every structural invariant and throws MeshError.
class Mesh {
 public:
  Mesh(Manifold manifold, std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles,
       std::vector<std::array<int, 2>> boundary, double h, std::vector<double> boundary_params = {},
       std::shared_ptr<const Domain> domain = nullptr);

  const Manifold& manifold() const { return manifold_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<std::array<int, 2>>& boundary() const { return boundary_; }
  /// Target edge length the mesh was generated for.
  double h() const { return h_; }
  /// Domain the mesh was generated from; null for imported meshes.
  const std::shared_ptr<const Domain>& domain() const { return domain_; }
  /// Boundary-curve parameter per vertex (NaN where unknown or interior).
  const std::vector<double>& boundary_params() const { return boundary_params_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  const std::vector<double>& triangle_areas() const { return areas_; }
  double area() const { return total_area_; }
  double boundary_edge_length(std::size_t e) const;
  double boundary_length() const;
  bool is_boundary_vertex(int v) const { return on_boundary_[static_cast<std::size_t>(v)] != 0; }
  /// Geodesic radius 1/sqrt(kappa) for sphere meshes, 0 otherwise.
  double sphere_radius() const;

  double min_angle_degrees() const;
  double max_edge_length() const;

 private:
  void validate();

  Manifold manifold_;
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 2>> boundary_;
  double h_;
  std::vector<double> boundary_params_;
  std::shared_ptr<const Domain> domain_;
  std::vector<double> areas_;
  std::vector<char> on_boundary_;
  double total_area_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

double triangle_area(Vec3 a, Vec3 b, Vec3 c);

/// Robin coefficient: one positive value per boundary edge, sampled at the
/// edge midpoint.
struct BoundaryField {
  std::vector<double> values;

  static BoundaryField constant(const Mesh& mesh, double beta);
  /// `beta(t, midpoint)` where t is the boundary parameter of the edge
  /// midpoint (NaN when the mesh does not carry parameters).
  static BoundaryField sample(const Mesh& mesh, const std::function<double(double, Vec3)>& beta);

  /// Throws std::invalid_argument unless the field fits `mesh` and is
  /// positive (nonnegative with allow_zero).
  void validate(const Mesh& mesh, bool allow_zero = false) const;
};

/// Boundary parameter of the midpoint of boundary edge e, or NaN.
double boundary_edge_param(const Mesh& mesh, std::size_t e);

/// Builds a quality mesh (max edge <= 1.5 h, min angle >= 20 degrees).
MeshPtr build_mesh(const std::shared_ptr<const Domain>& domain, double h);
MeshPtr build_mesh(const DomainSpec& spec, const Manifold& m, double h);

/// Splits every triangle 1 -> 4 at edge midpoints. Boundary midpoints are
/// placed on the exact boundary curve when the domain is known; interior
/// midpoints on the sphere are reprojected onto it. When `parents` is given
/// it receives, for every vertex of the refined mesh, the two coarse vertices
/// it was created from ({v, v} for coarse vertices). Boundary edge e of the
/// coarse mesh becomes edges 2e and 2e + 1.
MeshPtr refine(const Mesh& mesh, std::vector<std::array<int, 2>>* parents = nullptr);

}  // namespace symcomp
