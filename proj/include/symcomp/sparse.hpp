#pragma once

#include <span>
#include <vector>

namespace symcomp {

/// Compressed sparse row matrix with sorted column indices per row.
struct CsrMatrix {
  int rows = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  /// Index of entry (i, j) in col/val, or -1 if structurally zero.
  long find(int i, int j) const;
  double at(int i, int j) const;
  /// Exact (bitwise) symmetry check.
  bool is_symmetric() const;
  std::vector<double> diagonal() const;
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;  // true residual ||b - Ax|| / ||b||
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients. `x` holds the initial guess on
/// entry. Converged means the true relative residual is <= rel_tol.
CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::vector<double>& x, double rel_tol,
                            int max_iterations, bool parallel_spmv = true);

double norm2(std::span<const double> v);

}  // namespace symcomp
