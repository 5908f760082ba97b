#include "symcomp/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace symcomp::kernels {

namespace {

void check_sizes(const Mesh& mesh, std::span<const double> beta) {
  if (beta.size() != mesh.boundary().size()) throw std::invalid_argument("beta size does not match boundary");
}

// For each CSR entry, the positions in the element / edge local matrices that
// contribute to it, in element order followed by edge order.
struct Contributions {
  std::vector<int> ptr;    // per CSR entry
  std::vector<long> item;  // >= 0: element-matrix slot, < 0: -(edge slot) - 1
};

Contributions operator_contributions(const Mesh& mesh, const CsrMatrix& pattern) {
  const std::size_t nnz = pattern.nnz();
  std::vector<int> count(nnz + 1, 0);
  std::vector<long> slot_entry;
  slot_entry.reserve(9 * mesh.triangle_count() + 4 * mesh.boundary().size());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) slot_entry.push_back(pattern.find(tri[i], tri[j]));
  }
  for (const auto& e : mesh.boundary())
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) slot_entry.push_back(pattern.find(e[i], e[j]));
  for (long k : slot_entry) ++count[static_cast<std::size_t>(k) + 1];
  Contributions c;
  c.ptr.assign(nnz + 1, 0);
  for (std::size_t k = 0; k < nnz; ++k) c.ptr[k + 1] = c.ptr[k] + count[k + 1];
  c.item.resize(slot_entry.size());
  std::vector<int> fill(c.ptr.begin(), c.ptr.end() - 1);
  const long element_slots = static_cast<long>(9 * mesh.triangle_count());
  for (long s = 0; s < static_cast<long>(slot_entry.size()); ++s) {
    const std::size_t k = static_cast<std::size_t>(slot_entry[s]);
    c.item[fill[k]++] = s < element_slots ? s : -(s - element_slots) - 1;
  }
  return c;
}

}  // namespace

double triangle_superlevel_area(double area, double lo, double mid, double hi, double t) {
  if (t < lo) return area;
  if (t >= hi) return 0.0;
  if (t < mid) {
    const double d = t - lo;
    return area * (1.0 - d * d / ((mid - lo) * (hi - lo)));
  }
  const double d = hi - t;
  return area * d * d / ((hi - lo) * (hi - mid));
}

CsrMatrix p1_pattern(const Mesh& mesh) {
  const int n = static_cast<int>(mesh.vertex_count());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) adj[i].push_back(i);
  for (const auto& t : mesh.triangles())
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) adj[t[i]].push_back(t[j]);
  CsrMatrix a;
  a.rows = n;
  a.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    a.row_ptr[i + 1] = a.row_ptr[i] + static_cast<int>(row.size());
  }
  a.col.reserve(static_cast<std::size_t>(a.row_ptr[n]));
  for (const auto& row : adj) a.col.insert(a.col.end(), row.begin(), row.end());
  a.val.assign(a.col.size(), 0.0);
  return a;
}

std::vector<double> element_stiffness(const Mesh& mesh) {
  const auto& v = mesh.vertices();
  const auto& tris = mesh.triangles();
  const auto& areas = mesh.triangle_areas();
  std::vector<double> k(9 * tris.size());
  const long nt = static_cast<long>(tris.size());
#pragma omp parallel for schedule(static)
  for (long t = 0; t < nt; ++t) {
    const auto& tri = tris[t];
    // e[i] is the edge opposite vertex i
    const Vec3 e[3] = {v[tri[2]] - v[tri[1]], v[tri[0]] - v[tri[2]], v[tri[1]] - v[tri[0]]};
    const double scale = 1.0 / (4.0 * areas[t]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) k[9 * t + 3 * i + j] = scale * dot(e[i], e[j]);
  }
  return k;
}

std::vector<double> edge_mass(const Mesh& mesh, std::span<const double> beta) {
  check_sizes(mesh, beta);
  std::vector<double> m(4 * beta.size());
  for (std::size_t e = 0; e < beta.size(); ++e) {
    const double c = beta[e] * mesh.boundary_edge_length(e) / 6.0;
    m[4 * e + 0] = 2.0 * c;
    m[4 * e + 1] = c;
    m[4 * e + 2] = c;
    m[4 * e + 3] = 2.0 * c;
  }
  return m;
}

namespace serial {

CsrMatrix assemble_operator(const Mesh& mesh, std::span<const double> beta) {
  check_sizes(mesh, beta);
  CsrMatrix a = p1_pattern(mesh);
  const std::vector<double> k = element_stiffness(mesh);
  const std::vector<double> m = edge_mass(mesh, beta);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a.val[static_cast<std::size_t>(a.find(tri[i], tri[j]))] += k[9 * t + 3 * i + j];
  }
  for (std::size_t e = 0; e < mesh.boundary().size(); ++e) {
    const auto& edge = mesh.boundary()[e];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) a.val[static_cast<std::size_t>(a.find(edge[i], edge[j]))] += m[4 * e + 2 * i + j];
  }
  return a;
}

std::vector<double> assemble_load(const Mesh& mesh, std::span<const double> f) {
  if (f.size() != mesh.vertex_count()) throw std::invalid_argument("load size does not match mesh");
  std::vector<double> b(mesh.vertex_count(), 0.0);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double w = mesh.triangle_areas()[t] / 12.0;
    const double sum = f[tri[0]] + f[tri[1]] + f[tri[2]];
    for (int i = 0; i < 3; ++i) b[tri[i]] += w * (f[tri[i]] + sum);
  }
  return b;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

std::vector<double> superlevel_measure(const Mesh& mesh, std::span<const double> u, std::span<const double> levels) {
  if (u.size() != mesh.vertex_count()) throw std::invalid_argument("field size does not match mesh");
  std::vector<double> mu(levels.size(), 0.0);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      const auto& tri = mesh.triangles()[t];
      double v[3] = {u[tri[0]], u[tri[1]], u[tri[2]]};
      std::sort(v, v + 3);
      s += triangle_superlevel_area(mesh.triangle_areas()[t], v[0], v[1], v[2], levels[l]);
    }
    mu[l] = s;
  }
  return mu;
}

}  // namespace serial

namespace parallel {

CsrMatrix assemble_operator(const Mesh& mesh, std::span<const double> beta) {
  check_sizes(mesh, beta);
  CsrMatrix a = p1_pattern(mesh);
  const std::vector<double> k = element_stiffness(mesh);
  const std::vector<double> m = edge_mass(mesh, beta);
  const Contributions c = operator_contributions(mesh, a);
  const long nnz = static_cast<long>(a.nnz());
  // Each entry sums its contributions in the serial scatter order.
#pragma omp parallel for schedule(static)
  for (long e = 0; e < nnz; ++e) {
    double s = 0.0;
    for (int q = c.ptr[e]; q < c.ptr[e + 1]; ++q) {
      const long item = c.item[q];
      s += item >= 0 ? k[static_cast<std::size_t>(item)] : m[static_cast<std::size_t>(-item - 1)];
    }
    a.val[static_cast<std::size_t>(e)] = s;
  }
  return a;
}

std::vector<double> assemble_load(const Mesh& mesh, std::span<const double> f) {
  if (f.size() != mesh.vertex_count()) throw std::invalid_argument("load size does not match mesh");
  const std::size_t nv = mesh.vertex_count();
  const auto& tris = mesh.triangles();
  std::vector<int> ptr(nv + 1, 0);
  for (const auto& t : tris)
    for (int v : t) ++ptr[static_cast<std::size_t>(v) + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<int> slot(ptr.back());
  std::vector<int> fill(ptr.begin(), ptr.end() - 1);
  for (std::size_t t = 0; t < tris.size(); ++t)
    for (int i = 0; i < 3; ++i) slot[fill[tris[t][i]]++] = static_cast<int>(3 * t + i);
  std::vector<double> local(3 * tris.size());
  const long nt = static_cast<long>(tris.size());
#pragma omp parallel for schedule(static)
  for (long t = 0; t < nt; ++t) {
    const auto& tri = tris[t];
    const double w = mesh.triangle_areas()[t] / 12.0;
    const double sum = f[tri[0]] + f[tri[1]] + f[tri[2]];
    for (int i = 0; i < 3; ++i) local[3 * t + i] = w * (f[tri[i]] + sum);
  }
  std::vector<double> b(nv, 0.0);
  const long n = static_cast<long>(nv);
#pragma omp parallel for schedule(static)
  for (long v = 0; v < n; ++v) {
    double s = 0.0;
    for (int q = ptr[v]; q < ptr[v + 1]; ++q) s += local[slot[q]];
    b[v] = s;
  }
  return b;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

std::vector<double> superlevel_measure(const Mesh& mesh, std::span<const double> u, std::span<const double> levels) {
  if (u.size() != mesh.vertex_count()) throw std::invalid_argument("field size does not match mesh");
  if (!std::is_sorted(levels.begin(), levels.end())) throw std::invalid_argument("levels must be sorted");
  const std::size_t nt = mesh.triangle_count();
  struct Sorted {
    double lo, mid, hi, area;
  };
  std::vector<Sorted> tri(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& idx = mesh.triangles()[t];
    double v[3] = {u[idx[0]], u[idx[1]], u[idx[2]]};
    std::sort(v, v + 3);
    tri[t] = {v[0], v[1], v[2], mesh.triangle_areas()[t]};
  }
  // Order by minimum value; full-area contributions come from suffix sums.
  std::vector<int> order(nt);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return tri[a].lo < tri[b].lo; });
  std::vector<double> lows(nt), suffix(nt + 1, 0.0);
  for (std::size_t i = 0; i < nt; ++i) lows[i] = tri[order[i]].lo;
  for (std::size_t i = nt; i-- > 0;) suffix[i] = suffix[i + 1] + tri[order[i]].area;

  const std::size_t nl = levels.size();
  std::vector<double> mu(nl, 0.0);
  constexpr std::size_t kChunk = 64;
  const long chunks = static_cast<long>((nl + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(dynamic, 1)
  for (long ch = 0; ch < chunks; ++ch) {
    const std::size_t l0 = static_cast<std::size_t>(ch) * kChunk;
    const std::size_t l1 = std::min(nl, l0 + kChunk);
    const double t_first = levels[l0];
    const double t_last = levels[l1 - 1];
    // Triangles with lo <= t_last can straddle a level of this chunk.
    const std::size_t limit =
        static_cast<std::size_t>(std::upper_bound(lows.begin(), lows.end(), t_last) - lows.begin());
    for (std::size_t i = 0; i < limit; ++i) {
      const Sorted& s = tri[order[i]];
      if (s.hi <= t_first) continue;
      // levels in [lo, hi) within the chunk
      const auto first = std::lower_bound(levels.begin() + l0, levels.begin() + l1, s.lo);
      const auto last = std::lower_bound(first, levels.begin() + l1, s.hi);
      for (auto it = first; it != last; ++it)
        mu[static_cast<std::size_t>(it - levels.begin())] += triangle_superlevel_area(s.area, s.lo, s.mid, s.hi, *it);
    }
    for (std::size_t l = l0; l < l1; ++l) {
      const std::size_t above =
          static_cast<std::size_t>(std::upper_bound(lows.begin(), lows.end(), levels[l]) - lows.begin());
      mu[l] += suffix[above];
    }
  }
  return mu;
}

}  // namespace parallel

}  // namespace symcomp::kernels
