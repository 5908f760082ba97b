#include "symcomp/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "symcomp/kernels.hpp"
#include "symcomp/quadrature.hpp"

namespace symcomp {

namespace {

using Segment = RearrangedProfile::Segment;

double q_at(const Segment& s, double x) { return s.q0 + x * (s.qb + x * s.qc); }

double smoothstep(double x) { return x * x * (3.0 - 2.0 * x); }

const quad::GaussRule& rule8() {
  static const quad::GaussRule& r = quad::gauss_legendre_rule(8);
  return r;
}

}  // namespace

std::vector<double> default_level_grid(const ScalarField& u, int uniform) {
  if (uniform < 2) throw std::invalid_argument("level grid: need at least 2 uniform levels");
  std::vector<double> levels = u.values;
  const auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
  const double a = *lo, b = *hi;
  if (b > a)
    for (int i = 0; i < uniform; ++i) levels.push_back(a + (b - a) * i / (uniform - 1));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

DistributionData distribution_function(const ScalarField& u, std::span<const double> levels, Backend backend) {
  if (levels.empty()) throw std::invalid_argument("distribution_function: empty level grid");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i] > levels[i - 1]))
      throw std::invalid_argument("distribution_function: levels must be strictly increasing");
  const Mesh& mesh = *u.mesh;
  DistributionData d;
  d.levels.assign(levels.begin(), levels.end());
  d.total = mesh.area();
  d.min_value = *std::min_element(u.values.begin(), u.values.end());
  d.max_value = *std::max_element(u.values.begin(), u.values.end());

  std::vector<double> mids(levels.size() > 1 ? levels.size() - 1 : 0);
  for (std::size_t i = 0; i < mids.size(); ++i) mids[i] = 0.5 * (levels[i] + levels[i + 1]);
  if (backend == Backend::serial) {
    d.mu = kernels::serial::superlevel_measure(mesh, u.values, levels);
    d.mu_mid = kernels::serial::superlevel_measure(mesh, u.values, mids);
  } else {
    d.mu = kernels::parallel::superlevel_measure(mesh, u.values, levels);
    d.mu_mid = kernels::parallel::superlevel_measure(mesh, u.values, mids);
  }

  // |{u = t}| > 0 only on triangles where u is constant.
  std::map<double, double> flat;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double v = u.values[tri[0]];
    if (u.values[tri[1]] == v && u.values[tri[2]] == v) flat[v] += mesh.triangle_areas()[t];
  }
  d.mu_left = d.mu;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto it = flat.find(levels[l]);
    if (it != flat.end()) d.mu_left[l] += it->second;
  }
  return d;
}

DistributionData distribution_function(const ScalarField& u) {
  const std::vector<double> levels = default_level_grid(u);
  return distribution_function(u, levels);
}

RearrangedProfile::RearrangedProfile(std::vector<Segment> segments, double total, double max_value)
    : segments_(std::move(segments)), total_(total), max_value_(max_value) {
  if (!(total_ > 0.0)) throw std::invalid_argument("rearranged profile: total measure must be > 0");
  if (segments_.empty()) throw std::invalid_argument("rearranged profile: no segments");
  cumulative_.resize(segments_.size() + 1, 0.0);
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const Segment& s = segments_[k];
    double part;
    if (s.plateau) {
      part = s.t_lo * (s.s1 - s.s0);
    } else {
      // int h* ds over the segment = int_0^1 t(x) (-q'(x)) dx, a cubic in x.
      part = quad::gauss_legendre(
          [&](double x) { return (s.t_lo + x * (s.t_hi - s.t_lo)) * -(s.qb + 2.0 * s.qc * x); }, 0.0, 1.0, 4);
    }
    cumulative_[k + 1] = cumulative_[k] + part;
  }
}

double RearrangedProfile::min_value() const { return segments_.back().t_lo; }

std::size_t RearrangedProfile::find_segment(double s) const {
  // first segment with s1 >= s, i.e. s in (s0, s1]
  const auto it = std::lower_bound(segments_.begin(), segments_.end(), s,
                                   [](const Segment& seg, double x) { return seg.s1 < x; });
  return std::min<std::size_t>(static_cast<std::size_t>(it - segments_.begin()), segments_.size() - 1);
}

double RearrangedProfile::invert(const Segment& seg, double s) const {
  // Largest x in [0, 1] with q(x) >= s (q is nonincreasing up to rounding).
  if (q_at(seg, 1.0) >= s) return 1.0;
  if (!(seg.q0 >= s)) return 0.0;
  const double scale = std::abs(seg.q0) + std::abs(seg.qb) + std::abs(seg.qc);
  double x = -1.0;
  const double c0 = seg.q0 - s;
  if (std::abs(seg.qc) <= 1e-14 * scale) {
    if (seg.qb < 0.0) x = -c0 / seg.qb;
  } else {
    const double disc = seg.qb * seg.qb - 4.0 * seg.qc * c0;
    if (disc >= 0.0) {
      const double q = -0.5 * (seg.qb + std::copysign(std::sqrt(disc), seg.qb));
      const double r1 = q / seg.qc;
      const double r2 = q != 0.0 ? c0 / q : -1.0;
      const bool ok1 = r1 >= -1e-12 && r1 <= 1.0 + 1e-12;
      const bool ok2 = r2 >= -1e-12 && r2 <= 1.0 + 1e-12;
      if (ok1 && ok2)
        x = std::max(r1, r2);
      else if (ok1)
        x = r1;
      else if (ok2)
        x = r2;
    }
  }
  if (x >= -1e-12 && x <= 1.0 + 1e-12) {
    x = std::clamp(x, 0.0, 1.0);
    if (std::abs(q_at(seg, x) - s) <= 1e-13 * scale) return x;
  }
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double m = 0.5 * (lo + hi);
    (q_at(seg, m) >= s ? lo : hi) = m;
  }
  return lo;
}

double RearrangedProfile::value(double s) const {
  if (!(s >= 0.0 && s <= total_ * (1.0 + 1e-14)))
    throw std::out_of_range("rearranged profile: s outside [0, |Omega|]");
  if (s == 0.0) return max_value_;
  const Segment& seg = segments_[find_segment(s)];
  if (seg.plateau) return seg.t_lo;
  return seg.t_lo + invert(seg, s) * (seg.t_hi - seg.t_lo);
}

std::vector<double> RearrangedProfile::sample(std::span<const double> s_grid) const {
  std::vector<double> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) out.push_back(value(s));
  return out;
}

double RearrangedProfile::measure_above(double t) const {
  if (t >= max_value_) return 0.0;
  // segments are ordered by decreasing value; find the first reaching <= t
  const auto it = std::partition_point(segments_.begin(), segments_.end(),
                                       [&](const Segment& seg) { return seg.t_lo > t; });
  if (it == segments_.end()) return total_;
  const Segment& seg = *it;
  if (seg.plateau || t >= seg.t_hi) return seg.s0;
  const double x = (t - seg.t_lo) / (seg.t_hi - seg.t_lo);
  return std::clamp(q_at(seg, x), seg.s0, seg.s1);
}

double RearrangedProfile::integral(double a, double b, const std::function<double(double)>& g) const {
  a = std::clamp(a, 0.0, total_);
  b = std::clamp(b, 0.0, total_);
  if (b <= a) return 0.0;
  const auto& rule = rule8();
  double sum = 0.0;
  for (std::size_t k = find_segment(a); k < segments_.size(); ++k) {
    const Segment& seg = segments_[k];
    if (seg.s0 >= b) break;
    const double lo = std::max(a, seg.s0);
    const double hi = std::min(b, seg.s1);
    if (hi <= lo) continue;
    if (seg.plateau) {
      sum += g(seg.t_lo) * (hi - lo);
      continue;
    }
    const double x0 = hi >= seg.s1 ? 0.0 : invert(seg, hi);
    const double x1 = lo <= seg.s0 ? 1.0 : invert(seg, lo);
    const double mid = 0.5 * (x0 + x1), half = 0.5 * (x1 - x0);
    double part = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = mid + half * rule.nodes[i];
      part += rule.weights[i] * g(seg.t_lo + x * (seg.t_hi - seg.t_lo)) * -(seg.qb + 2.0 * seg.qc * x);
    }
    sum += part * half;
  }
  return sum;
}

double RearrangedProfile::primitive(double s) const {
  s = std::clamp(s, 0.0, total_);
  if (s == 0.0) return 0.0;
  const std::size_t k = find_segment(s);
  const Segment& seg = segments_[k];
  double part;
  if (seg.plateau) {
    part = seg.t_lo * (s - seg.s0);
  } else if (s >= seg.s1) {
    part = cumulative_[k + 1] - cumulative_[k];
  } else {
    const double x0 = invert(seg, s);
    part = quad::gauss_legendre(
        [&](double x) { return (seg.t_lo + x * (seg.t_hi - seg.t_lo)) * -(seg.qb + 2.0 * seg.qc * x); }, x0, 1.0, 4);
  }
  return cumulative_[k] + part;
}

RearrangedProfile RearrangedProfile::rescaled(double theta) const {
  if (!(theta > 0.0)) throw std::invalid_argument("rescaled: theta must be > 0");
  std::vector<Segment> segs = segments_;
  for (Segment& s : segs) {
    s.s0 /= theta;
    s.s1 /= theta;
    s.q0 /= theta;
    s.qb /= theta;
    s.qc /= theta;
  }
  return RearrangedProfile(std::move(segs), total_ / theta, max_value_);
}

RearrangedProfile decreasing_rearrangement(const DistributionData& d) {
  const std::size_t L = d.levels.size();
  if (L == 0 || d.mu.size() != L || d.mu_left.size() != L || d.mu_mid.size() + 1 != L)
    throw std::invalid_argument("decreasing_rearrangement: inconsistent distribution table");
  if (d.levels.front() > d.min_value || d.levels.back() < d.max_value)
    throw std::invalid_argument("decreasing_rearrangement: level grid must cover [min, max] of the field");
  std::vector<Segment> segs;
  double s = 0.0;  // running end, keeps the breakpoints monotone
  auto push_plateau = [&](double value, double end) {
    end = std::min(end, d.total);
    if (end > s) {
      Segment seg;
      seg.s0 = s;
      seg.s1 = end;
      seg.t_lo = seg.t_hi = value;
      seg.plateau = true;
      segs.push_back(seg);
      s = end;
    }
  };
  for (std::size_t k = L; k-- > 0;) {
    push_plateau(d.levels[k], d.mu_left[k]);
    if (k == 0) break;
    const double mlo = std::min(d.mu[k - 1], d.total);
    if (mlo > s) {
      const double mhi = s;  // left limit at levels[k] (after clamping)
      Segment seg;
      seg.s0 = mhi;
      seg.s1 = mlo;
      seg.t_lo = d.levels[k - 1];
      seg.t_hi = d.levels[k];
      seg.q0 = mlo;
      const double dq = mhi - mlo;
      seg.qb = 4.0 * (std::clamp(d.mu_mid[k - 1], mhi, mlo) - mlo) - dq;
      seg.qc = dq - seg.qb;
      segs.push_back(seg);
      s = mlo;
    }
  }
  push_plateau(d.levels.front(), d.total);
  if (segs.empty()) throw std::invalid_argument("decreasing_rearrangement: zero total measure");
  return RearrangedProfile(std::move(segs), d.total, d.max_value);
}

RearrangedProfile piecewise_constant_rearrangement(std::span<const double> values, std::span<const double> measures) {
  if (values.size() != measures.size() || values.empty())
    throw std::invalid_argument("piecewise_constant_rearrangement: need matching nonempty inputs");
  std::map<double, double, std::greater<>> by_value;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (measures[i] < 0.0) throw std::invalid_argument("piecewise_constant_rearrangement: negative measure");
    by_value[values[i]] += measures[i];
  }
  std::vector<Segment> segs;
  double s = 0.0;
  for (const auto& [v, m] : by_value) {
    if (m <= 0.0) continue;
    Segment seg;
    seg.s0 = s;
    seg.s1 = s + m;
    seg.t_lo = seg.t_hi = v;
    seg.plateau = true;
    segs.push_back(seg);
    s += m;
  }
  return RearrangedProfile(std::move(segs), s, segs.empty() ? 0.0 : segs.front().t_lo);
}

double product_integral(const RearrangedProfile& a, const RearrangedProfile& b) {
  const double total = std::min(a.total(), b.total());
  std::vector<double> cuts{0.0, total};
  for (const auto& s : a.segments())
    if (s.s1 < total) cuts.push_back(s.s1);
  for (const auto& s : b.segments())
    if (s.s1 < total) cuts.push_back(s.s1);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto& rule = rule8();
  auto identity = [](double x) { return x; };
  double sum = 0.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c], hi = cuts[c + 1];
    while (a.segments()[ia].s1 <= lo && ia + 1 < a.segments().size()) ++ia;
    while (b.segments()[ib].s1 <= lo && ib + 1 < b.segments().size()) ++ib;
    const auto& sa = a.segments()[ia];
    const auto& sb = b.segments()[ib];
    if (sa.plateau) {
      sum += sa.t_lo * b.integral(lo, hi, identity);
    } else if (sb.plateau) {
      sum += sb.t_lo * a.integral(lo, hi, identity);
    } else {
      double part = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double xi = 0.5 * (rule.nodes[k] + 1.0);
        const double s = lo + (hi - lo) * smoothstep(xi);
        part += 0.5 * rule.weights[k] * a.value(s) * b.value(s) * 6.0 * xi * (1.0 - xi);
      }
      sum += part * (hi - lo);
    }
  }
  return sum;
}

RadialProfile schwarz_profile(const std::shared_ptr<const RearrangedProfile>& p, double theta, const Manifold& m) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("schwarz_profile: theta must lie in (0, 1]");
  return RadialProfile::from_rearrangement(p, theta, m, 2);
}

HardyLittlewood hardy_littlewood_check(const ScalarField& f, const ScalarField& g) {
  if (f.mesh != g.mesh) throw std::invalid_argument("hardy_littlewood_check: fields live on different meshes");
  for (double x : f.values)
    if (x < 0.0) throw std::invalid_argument("hardy_littlewood_check: f must be nonnegative");
  for (double x : g.values)
    if (x < 0.0) throw std::invalid_argument("hardy_littlewood_check: g must be nonnegative");
  const RearrangedProfile fs = decreasing_rearrangement(distribution_function(f));
  const RearrangedProfile gs = decreasing_rearrangement(distribution_function(g));
  HardyLittlewood out;
  out.rearranged = product_integral(fs, gs);
  out.direct = integral_product(f, g);
  out.margin = out.rearranged - out.direct;
  return out;
}

ConcentrationResult concentration_check(const RearrangedProfile& fstar, int n, double total) {
  if (n < 2) throw std::invalid_argument("concentration_check: dimension must be >= 2");
  if (!(total > 0.0)) throw std::invalid_argument("concentration_check: total measure must be > 0");
  const double exponent = (n - 2.0) / n;
  const double mass = fstar.primitive(fstar.total());
  std::vector<double> grid{0.0};
  for (const auto& seg : fstar.segments()) {
    if (!seg.plateau)
      for (int k = 1; k < 4; ++k) grid.push_back(seg.s0 + (seg.s1 - seg.s0) * k / 4.0);
    grid.push_back(seg.s1);
  }
  ConcentrationResult best{std::numeric_limits<double>::infinity(), 0.0};
  for (double s : grid) {
    const double margin = std::pow(std::min(s, total) / total, exponent) * mass - fstar.primitive(s);
    if (margin < best.margin) best = {margin, s};
  }
  return best;
}

double superlevel_integral(const ScalarField& u, const ScalarField& f, double t) {
  if (u.mesh != f.mesh) throw std::invalid_argument("superlevel_integral: fields live on different meshes");
  const Mesh& mesh = *u.mesh;
  double sum = 0.0;
  for (const auto& tri : mesh.triangles()) {
    Vec3 poly[4];
    double fv[4];
    int np = 0;
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i], b = tri[(i + 1) % 3];
      const double ua = u.values[a], ub = u.values[b];
      if (ua > t) {
        poly[np] = mesh.vertices()[a];
        fv[np++] = f.values[a];
      }
      if ((ua > t) != (ub > t)) {
        const double w = (t - ua) / (ub - ua);
        poly[np] = mesh.vertices()[a] + w * (mesh.vertices()[b] - mesh.vertices()[a]);
        fv[np++] = f.values[a] + w * (f.values[b] - f.values[a]);
      }
    }
    for (int k = 1; k + 1 < np; ++k) {
      const double area = triangle_area(poly[0], poly[k], poly[k + 1]);
      sum += area * (fv[0] + fv[k] + fv[k + 1]) / 3.0;
    }
  }
  return sum;
}

}  // namespace symcomp
