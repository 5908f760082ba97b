#pragma once

// Hot loops in two variants: `serial` is the straightforward reference,
// `parallel` is the OpenMP version used by the pipeline. Assembly and SpMV
// are bitwise identical between the two; the superlevel measure agrees to
// rounding and is independent of the thread count.

#include <span>
#include <vector>

#include "symcomp/mesh.hpp"
#include "symcomp/sparse.hpp"

namespace symcomp::kernels {

/// Sparsity pattern of the P1 operator: vertex adjacency plus diagonal.
CsrMatrix p1_pattern(const Mesh& mesh);

/// Local element matrices, 9 entries per triangle (row-major), and boundary
/// edge mass matrices (4 entries per edge).
std::vector<double> element_stiffness(const Mesh& mesh);
std::vector<double> edge_mass(const Mesh& mesh, std::span<const double> beta);

namespace serial {
CsrMatrix assemble_operator(const Mesh& mesh, std::span<const double> beta);
std::vector<double> assemble_load(const Mesh& mesh, std::span<const double> f);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
/// mu(t) = area{u > t} at each level, summed triangle by triangle.
std::vector<double> superlevel_measure(const Mesh& mesh, std::span<const double> u, std::span<const double> levels);
}  // namespace serial

namespace parallel {
CsrMatrix assemble_operator(const Mesh& mesh, std::span<const double> beta);
std::vector<double> assemble_load(const Mesh& mesh, std::span<const double> f);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
/// Levels must be nondecreasing.
std::vector<double> superlevel_measure(const Mesh& mesh, std::span<const double> u, std::span<const double> levels);
}  // namespace parallel

/// Exact area of {u > t} on one triangle of area `area` with vertex values
/// sorted as lo <= mid <= hi.
double triangle_superlevel_area(double area, double lo, double mid, double hi, double t);

}  // namespace symcomp::kernels
