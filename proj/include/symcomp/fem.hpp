#pragma once

#include <functional>
#include <string>
#include <vector>

#include "symcomp/mesh.hpp"
#include "symcomp/sparse.hpp"

namespace symcomp {

/// Piecewise-linear field given by its nodal values.
struct ScalarField {
  MeshPtr mesh;
  std::vector<double> values;

  ScalarField(MeshPtr mesh, std::vector<double> values);
  static ScalarField constant(MeshPtr mesh, double c);
  static ScalarField interpolate(MeshPtr mesh, const std::function<double(Vec3)>& f);
};

struct LinearSystem {
  CsrMatrix a;
  std::vector<double> b;
};

enum class Backend { serial, parallel };

/// Stiffness plus Robin boundary mass and the P1 load. beta may vanish here
/// (giving a singular operator); the solver requires beta > 0.
LinearSystem assemble(const Mesh& mesh, const ScalarField& f, const BoundaryField& beta,
                      Backend backend = Backend::parallel);

/// True when constants are (numerically) in the kernel of A.
bool has_constant_nullvector(const LinearSystem& sys);

struct SolveDiagnostics {
  int iterations = 0;
  double relative_residual = 0.0;
  bool positive = true;            // all nodal values > 0
  bool min_on_boundary = true;     // global minimum attained at a boundary vertex
  std::vector<std::string> warnings;
};

struct PoissonSolution {
  ScalarField u;
  LinearSystem system;
  SolveDiagnostics diagnostics;
};

/// Solves -Lap u = f with du/dnu + beta u = 0. Requires f >= 0, f != 0 and
/// beta > 0; throws std::invalid_argument otherwise and std::runtime_error if
/// the solver does not reach a relative residual of 1e-10.
PoissonSolution solve_poisson_robin(const MeshPtr& mesh, const ScalarField& f, const BoundaryField& beta,
                                    Backend backend = Backend::parallel);

struct FieldStats {
  double min = 0.0;
  double max = 0.0;
  double boundary_min = 0.0;
  double boundary_max = 0.0;
  double integral = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Integrals are exact for the piecewise-linear field.
FieldStats field_stats(const ScalarField& u);

/// ||A u - b|| / ||b||.
double residual_check(const LinearSystem& sys, const ScalarField& u);

/// Exact area of {u > t}.
double superlevel_measure_of(const ScalarField& u, double t);
/// Exact integral of (u - tau)^+ over the mesh.
double superlevel_excess(const ScalarField& u, double tau);

/// Exact integral of f g.
double integral_product(const ScalarField& f, const ScalarField& g);

}  // namespace symcomp
