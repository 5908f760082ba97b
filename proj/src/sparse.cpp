#include "symcomp/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symcomp/kernels.hpp"

namespace symcomp {

long CsrMatrix::find(int i, int j) const {
  const auto begin = col.begin() + row_ptr[i];
  const auto end = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return -1;
  return static_cast<long>(it - col.begin());
}

double CsrMatrix::at(int i, int j) const {
  const long k = find(i, j);
  return k < 0 ? 0.0 : val[static_cast<std::size_t>(k)];
}

bool CsrMatrix::is_symmetric() const {
  for (int i = 0; i < rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const long kt = find(col[k], i);
      if (kt < 0 || val[static_cast<std::size_t>(kt)] != val[k]) return false;
    }
  return true;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(rows), 0.0);
  for (int i = 0; i < rows; ++i) d[i] = at(i, i);
  return d;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::vector<double>& x, double rel_tol,
                            int max_iterations, bool parallel_spmv) {
  const std::size_t n = static_cast<std::size_t>(a.rows);
  if (b.size() != n || x.size() != n) throw std::invalid_argument("conjugate_gradient: size mismatch");
  auto spmv = [&](std::span<const double> in, std::span<double> out) {
    if (parallel_spmv)
      kernels::parallel::spmv(a, in, out);
    else
      kernels::serial::spmv(a, in, out);
  };

  CgResult res;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw std::runtime_error("conjugate_gradient: nonpositive diagonal entry");
    d = 1.0 / d;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  auto true_residual = [&]() {
    spmv(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    return norm2(r) / bnorm;
  };

  res.relative_residual = true_residual();
  if (res.relative_residual <= rel_tol) {
    res.converged = true;
    return res;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iterations; ++it) {
    spmv(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw std::runtime_error("conjugate_gradient: operator is not positive definite");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    res.iterations = it;
    // The recursive residual drifts; confirm with the true one before stopping.
    if (norm2(r) <= 0.5 * rel_tol * bnorm) {
      res.relative_residual = true_residual();
      if (res.relative_residual <= rel_tol) {
        res.converged = true;
        return res;
      }
      // residual replacement: restart from the true residual (now in r)
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      p = z;
      rz = dot(r, z);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.relative_residual = true_residual();
  res.converged = res.relative_residual <= rel_tol;
  return res;
}

}  // namespace symcomp
