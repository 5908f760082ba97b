#include "symcomp/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symcomp/kernels.hpp"

namespace symcomp {

namespace {

// Integral of (u - tau)^+ over one triangle with sorted values lo <= mid <= hi.
double triangle_excess(double area, double lo, double mid, double hi, double tau) {
  if (tau >= hi) return 0.0;
  double s = 0.0;
  if (hi > mid) {
    const double start = std::max(tau, mid);
    const double d = hi - start;
    s += d * d * d / (3.0 * (hi - lo) * (hi - mid));
  }
  if (mid > lo && tau < mid) {
    const double start = std::max(tau, lo);
    const double x = mid - lo;
    const double y = start - lo;
    s += (mid - start) - (x * x * x - y * y * y) / (3.0 * x * (hi - lo));
  }
  if (tau < lo) s += lo - tau;
  return area * s;
}

}  // namespace

ScalarField::ScalarField(MeshPtr m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {
  if (!mesh) throw std::invalid_argument("field without mesh");
  if (values.size() != mesh->vertex_count())
    throw std::invalid_argument("field has " + std::to_string(values.size()) + " values for " +
                                std::to_string(mesh->vertex_count()) + " vertices");
  for (double x : values)
    if (!std::isfinite(x)) throw std::invalid_argument("field has non-finite values");
}

ScalarField ScalarField::constant(MeshPtr mesh, double c) {
  const std::size_t n = mesh ? mesh->vertex_count() : 0;
  return ScalarField(std::move(mesh), std::vector<double>(n, c));
}

ScalarField ScalarField::interpolate(MeshPtr mesh, const std::function<double(Vec3)>& f) {
  if (!mesh) throw std::invalid_argument("field without mesh");
  std::vector<double> v;
  v.reserve(mesh->vertex_count());
  for (const Vec3& p : mesh->vertices()) v.push_back(f(p));
  return ScalarField(std::move(mesh), std::move(v));
}

LinearSystem assemble(const Mesh& mesh, const ScalarField& f, const BoundaryField& beta, Backend backend) {
  if (f.mesh.get() != &mesh) throw std::invalid_argument("assemble: source lives on a different mesh");
  beta.validate(mesh, /*allow_zero=*/true);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
    if (mesh.triangle_areas()[t] < 1e-14 * mesh.area())
      throw std::invalid_argument("assemble: degenerate triangle " + std::to_string(t));
  LinearSystem sys;
  if (backend == Backend::serial) {
    sys.a = kernels::serial::assemble_operator(mesh, beta.values);
    sys.b = kernels::serial::assemble_load(mesh, f.values);
  } else {
    sys.a = kernels::parallel::assemble_operator(mesh, beta.values);
    sys.b = kernels::parallel::assemble_load(mesh, f.values);
  }
  return sys;
}

bool has_constant_nullvector(const LinearSystem& sys) {
  double scale = 0.0;
  for (double v : sys.a.val) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < sys.a.rows; ++i) {
    double s = 0.0;
    for (int k = sys.a.row_ptr[i]; k < sys.a.row_ptr[i + 1]; ++k) s += sys.a.val[k];
    if (std::abs(s) > 1e-12 * scale) return false;
  }
  return true;
}

PoissonSolution solve_poisson_robin(const MeshPtr& mesh, const ScalarField& f, const BoundaryField& beta,
                                    Backend backend) {
  if (!mesh) throw std::invalid_argument("solve: null mesh");
  beta.validate(*mesh);
  bool nonzero = false;
  for (double x : f.values) {
    if (x < 0.0) throw std::invalid_argument("solve: source f must be nonnegative");
    nonzero = nonzero || x > 0.0;
  }
  if (!nonzero) throw std::invalid_argument("solve: source f is identically zero");

  LinearSystem sys = assemble(*mesh, f, beta, backend);
  const std::size_t n = mesh->vertex_count();
  std::vector<double> x(n, 0.0);
  const int cap = static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));
  const CgResult cg = conjugate_gradient(sys.a, sys.b, x, 1e-10, cap, backend == Backend::parallel);
  if (!cg.converged)
    throw std::runtime_error("solve: conjugate gradients did not converge in " + std::to_string(cg.iterations) +
                             " iterations (relative residual " + std::to_string(cg.relative_residual) + ")");

  PoissonSolution sol{ScalarField(mesh, std::move(x)), std::move(sys), {}};
  sol.diagnostics.iterations = cg.iterations;
  sol.diagnostics.relative_residual = cg.relative_residual;
  const FieldStats st = field_stats(sol.u);
  sol.diagnostics.positive = st.min > 0.0;
  sol.diagnostics.min_on_boundary = st.boundary_min == st.min;
  if (!sol.diagnostics.positive) sol.diagnostics.warnings.push_back("solution is not strictly positive");
  if (!sol.diagnostics.min_on_boundary)
    sol.diagnostics.warnings.push_back("minimum is attained at an interior vertex");
  return sol;
}

FieldStats field_stats(const ScalarField& u) {
  const Mesh& mesh = *u.mesh;
  FieldStats st;
  st.min = *std::min_element(u.values.begin(), u.values.end());
  st.max = *std::max_element(u.values.begin(), u.values.end());
  st.boundary_min = std::numeric_limits<double>::infinity();
  st.boundary_max = -std::numeric_limits<double>::infinity();
  for (const auto& e : mesh.boundary()) {
    st.boundary_min = std::min(st.boundary_min, u.values[e[0]]);
    st.boundary_max = std::max(st.boundary_max, u.values[e[0]]);
  }
  double l2sq = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double a = mesh.triangle_areas()[t];
    double v[3] = {u.values[tri[0]], u.values[tri[1]], u.values[tri[2]]};
    const double sum = v[0] + v[1] + v[2];
    st.integral += a * sum / 3.0;
    l2sq += a / 12.0 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + sum * sum);
    std::sort(v, v + 3);
    if (v[0] >= 0.0)
      st.l1 += a * sum / 3.0;
    else if (v[2] <= 0.0)
      st.l1 -= a * sum / 3.0;
    else
      st.l1 += triangle_excess(a, v[0], v[1], v[2], 0.0) + triangle_excess(a, -v[2], -v[1], -v[0], 0.0);
  }
  st.l2 = std::sqrt(l2sq);
  return st;
}

double residual_check(const LinearSystem& sys, const ScalarField& u) {
  if (u.values.size() != sys.b.size()) throw std::invalid_argument("residual_check: size mismatch");
  std::vector<double> r(sys.b.size());
  kernels::serial::spmv(sys.a, u.values, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sys.b[i];
  const double bn = norm2(sys.b);
  return bn > 0.0 ? norm2(r) / bn : norm2(r);
}

double superlevel_measure_of(const ScalarField& u, double t) {
  const Mesh& mesh = *u.mesh;
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh.triangles().size(); ++k) {
    const auto& tri = mesh.triangles()[k];
    double v[3] = {u.values[tri[0]], u.values[tri[1]], u.values[tri[2]]};
    std::sort(v, v + 3);
    sum += kernels::triangle_superlevel_area(mesh.triangle_areas()[k], v[0], v[1], v[2], t);
  }
  return sum;
}

double superlevel_excess(const ScalarField& u, double tau) {
  const Mesh& mesh = *u.mesh;
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    double v[3] = {u.values[tri[0]], u.values[tri[1]], u.values[tri[2]]};
    std::sort(v, v + 3);
    s += triangle_excess(mesh.triangle_areas()[t], v[0], v[1], v[2], tau);
  }
  return s;
}

double integral_product(const ScalarField& f, const ScalarField& g) {
  if (f.mesh != g.mesh) throw std::invalid_argument("integral_product: fields live on different meshes");
  const Mesh& mesh = *f.mesh;
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    double fg = 0.0, fs = 0.0, gs = 0.0;
    for (int i = 0; i < 3; ++i) {
      fg += f.values[tri[i]] * g.values[tri[i]];
      fs += f.values[tri[i]];
      gs += g.values[tri[i]];
    }
    s += mesh.triangle_areas()[t] / 12.0 * (fg + fs * gs);
  }
  return s;
}

}  // namespace symcomp
