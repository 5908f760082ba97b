#include "symcomp/radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symcomp/quadrature.hpp"
#include "symcomp/rearrange.hpp"

namespace symcomp {

namespace {

// The comparison space: flat cones compare with the plane.
Manifold model_space(const Manifold& m, int n) {
  return m.kind() == ManifoldKind::sphere ? Manifold::sphere(m.kappa(), n) : Manifold::plane(n);
}

double smoothstep(double x) { return x * x * (3.0 - 2.0 * x); }

// Integral over [a, b] with the substitution r = a + (b - a) smoothstep(xi),
// which tames square-root behavior at both ends.
template <class F>
double smooth_gauss(F&& f, double a, double b, int order = 8) {
  const auto& rule = quad::gauss_legendre_rule(order);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double xi = 0.5 * (rule.nodes[k] + 1.0);
    const double w = 0.5 * rule.weights[k];
    const double r = a + (b - a) * smoothstep(xi);
    s += w * f(r) * (b - a) * 6.0 * xi * (1.0 - xi);
  }
  return s;
}

}  // namespace

RadialProfile::RadialProfile(Manifold m, int n, std::vector<double> r, std::vector<double> values,
                             std::vector<double> slopes)
    : manifold_(model_space(m, n)), n_(n), r_(std::move(r)), values_(std::move(values)), slopes_(std::move(slopes)) {
  if (n_ < 2) throw std::invalid_argument("radial profile: dimension must be >= 2");
  if (r_.size() < 2 || values_.size() != r_.size())
    throw std::invalid_argument("radial profile: need >= 2 samples and one value per radius");
  if (!slopes_.empty() && slopes_.size() != r_.size())
    throw std::invalid_argument("radial profile: slope count mismatch");
  if (r_.front() != 0.0) throw std::invalid_argument("radial profile: grid must start at r = 0");
  for (std::size_t i = 1; i < r_.size(); ++i)
    if (!(r_[i] > r_[i - 1])) throw std::invalid_argument("radial profile: grid must be strictly increasing");
  if (manifold_.kappa() > 0.0 && r_.back() > myers_radius(manifold_.kappa()) * (1.0 + 1e-13))
    throw std::domain_error("radial profile: R0 exceeds the Myers bound");
  mass_.assign(r_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < r_.size(); ++i)
    mass_[i + 1] = mass_[i] + quad::gauss_legendre(
                                  [&](double rho) { return sampled_value(i, rho) * perimeter_of_radius(rho); },
                                  r_[i], r_[i + 1], 8);
}

RadialProfile RadialProfile::from_rearrangement(std::shared_ptr<const RearrangedProfile> profile, double theta,
                                                const Manifold& m, int n, int samples) {
  if (!profile) throw std::invalid_argument("radial profile: null rearrangement");
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("radial profile: theta must lie in (0, 1]");
  if (samples < 2) throw std::invalid_argument("radial profile: need >= 2 samples");
  const Manifold model = model_space(m, n);
  const double area = profile->total() / theta;
  if (model.kappa() > 0.0 && area > space_form_volume(model.kappa(), n) * (1.0 + 1e-12))
    throw std::domain_error("radial profile: |Omega|/theta exceeds the volume of the model space");
  const double R0 = inverse_ball_area(model.kappa(), n, area);
  std::vector<double> r(static_cast<std::size_t>(samples)), v(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    r[i] = R0 * i / (samples - 1);
    const double s = std::min(profile->total(), theta * ball_metrics(model.kappa(), n, r[i]).area);
    v[i] = profile->value(s);
  }
  RadialProfile out(model, n, std::move(r), std::move(v));
  out.source_ = std::move(profile);
  out.theta_ = theta;
  return out;
}

double RadialProfile::area_of_radius(double r) const { return ball_metrics(manifold_.kappa(), n_, r).area; }
double RadialProfile::perimeter_of_radius(double r) const {
  return ball_metrics(manifold_.kappa(), n_, r).perimeter;
}
double RadialProfile::radius_of_area(double a) const {
  return inverse_ball_area(manifold_.kappa(), n_, std::clamp(a, 0.0, ball_area()));
}
double RadialProfile::ball_area() const { return area_of_radius(R0()); }
double RadialProfile::boundary_perimeter() const { return perimeter_of_radius(R0()); }

std::size_t RadialProfile::interval(double r) const {
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t i = static_cast<std::size_t>(std::distance(r_.begin(), it));
  return std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, r_.size() - 2);
}

double RadialProfile::sampled_value(std::size_t i, double r) const {
  const double h = r_[i + 1] - r_[i];
  const double t = (r - r_[i]) / h;
  if (slopes_.empty()) return values_[i] + t * (values_[i + 1] - values_[i]);
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] + (-2 * t3 + 3 * t2) * values_[i + 1] +
         (t3 - t2) * h * slopes_[i + 1];
}

double RadialProfile::value(double r) const {
  r = std::clamp(r, 0.0, R0());
  if (source_) return source_->value(std::min(source_->total(), theta_ * area_of_radius(r)));
  return sampled_value(interval(r), r);
}

double RadialProfile::slope(double r) const {
  r = std::clamp(r, 0.0, R0());
  const std::size_t i = interval(r);
  const double h = r_[i + 1] - r_[i];
  if (source_ || slopes_.empty()) return (values_[i + 1] - values_[i]) / h;
  const double t = (r - r_[i]) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) / h * values_[i] + (3 * t2 - 4 * t + 1) * slopes_[i] + (-6 * t2 + 6 * t) / h * values_[i + 1] +
         (3 * t2 - 2 * t) * slopes_[i + 1];
}

double RadialProfile::superlevel_measure(double t) const {
  if (source_) return std::min(ball_area(), source_->measure_above(t) / theta_);
  // Nonincreasing profile: {phi > t} is the ball of radius sup{r : phi(r) > t}.
  if (!(values_.front() > t)) return 0.0;
  if (values_.back() > t) return ball_area();
  // first sample with value <= t
  std::size_t hi = 1;
  {
    std::size_t lo = 0, up = values_.size() - 1;
    while (up - lo > 1) {
      const std::size_t mid = (lo + up) / 2;
      (values_[mid] > t ? lo : up) = mid;
    }
    hi = up;
  }
  const std::size_t i = hi - 1;
  double a = r_[i], b = r_[hi];
  for (int it = 0; it < 200 && b - a > 1e-16 * (1.0 + b); ++it) {
    const double m = 0.5 * (a + b);
    (sampled_value(i, m) > t ? a : b) = m;
  }
  return area_of_radius(0.5 * (a + b));
}

double RadialProfile::mass(double r) const {
  r = std::clamp(r, 0.0, R0());
  if (source_) return source_->primitive(std::min(source_->total(), theta_ * area_of_radius(r))) / theta_;
  const std::size_t i = interval(r);
  if (r == r_[i]) return mass_[i];
  return mass_[i] + quad::gauss_legendre(
                        [&](double rho) { return sampled_value(i, rho) * perimeter_of_radius(rho); }, r_[i], r, 8);
}

std::vector<double> RadialProfile::breakpoints() const {
  if (!source_) return r_;
  std::vector<double> b{0.0};
  for (const auto& seg : source_->segments()) {
    const double r = radius_of_area(seg.s1 / theta_);
    if (r > b.back()) b.push_back(r);
  }
  if (b.back() < R0()) b.push_back(R0());
  b.back() = R0();
  return b;
}

double RadialProfile::ball_integral(const std::function<double(double)>& g, double ra, double rb) const {
  ra = std::clamp(ra, 0.0, R0());
  rb = std::clamp(rb, 0.0, R0());
  if (rb <= ra) return 0.0;
  const std::vector<double> b = breakpoints();
  auto lo = std::upper_bound(b.begin(), b.end(), ra);
  double s = 0.0;
  double left = ra;
  for (auto it = lo; left < rb; ++it) {
    const double right = it == b.end() ? rb : std::min(*it, rb);
    if (right > left)
      s += smooth_gauss([&](double r) { return g(value(r)) * perimeter_of_radius(r); }, left, right);
    left = right;
    if (it == b.end()) break;
  }
  return s;
}

double RadialProfile::ball_integral(const std::function<double(double)>& g) const {
  return ball_integral(g, 0.0, R0());
}

double RadialProfile::truncated_integral(double tau) const {
  const double mu = superlevel_measure(tau);
  const double r_tau = radius_of_area(mu);
  return tau * mu + ball_integral([](double x) { return x; }, r_tau, R0());
}

double beta_bar(const BoundaryField& beta, const Mesh& mesh, const Manifold& m) {
  beta.validate(mesh);
  double inv = 0.0;
  for (std::size_t e = 0; e < beta.values.size(); ++e) inv += mesh.boundary_edge_length(e) / beta.values[e];
  if (!(inv > 0.0)) throw std::invalid_argument("beta_bar: boundary has zero length");
  const double theta = theta_of(m);
  const Manifold model = model_space(m, 2);
  const double r_sharp = inverse_ball_area(model.kappa(), 2, mesh.area() / theta);
  return theta * ball_metrics(model.kappa(), 2, r_sharp).perimeter / inv;
}

RadialSolution solve_radial(const RadialProfile& h, const Manifold& m, int n, double R0, double beta_bar,
                            int intervals) {
  const Manifold model = model_space(m, n);
  const double kappa = model.kappa();
  if (!(beta_bar > 0.0) || !std::isfinite(beta_bar)) throw std::invalid_argument("solve_radial: beta_bar must be > 0");
  if (!(R0 > 0.0)) throw std::invalid_argument("solve_radial: R0 must be > 0");
  if (kappa > 0.0 && R0 > myers_radius(kappa) * (1.0 + 1e-13))
    throw std::domain_error("solve_radial: R0 exceeds the Myers bound");
  if (R0 > h.R0() * (1.0 + 1e-12)) throw std::invalid_argument("solve_radial: source profile is shorter than R0");
  if (h.dim() != n || !(h.manifold() == model)) throw std::invalid_argument("solve_radial: source lives on another space");
  if (intervals < 16) throw std::invalid_argument("solve_radial: too few intervals");
  R0 = std::min(R0, h.R0());

  bool nonzero = false;
  for (double x : h.values()) {
    if (x < 0.0) throw std::invalid_argument("solve_radial: source has negative values");
    nonzero = nonzero || x > 0.0;
  }
  if (!nonzero) throw std::invalid_argument("solve_radial: source is identically zero");

  const double h0 = h.value(0.0);
  const double r_series = 1e-6 * R0;
  // phi'(r) = -mass(r) / |dB_r|; the 0/0 at the origin is replaced by its
  // series -h(0) r / n.
  auto dphi = [&](double r) {
    if (r <= r_series) return -h0 * r / n;
    return -h.mass(r) / ball_metrics(kappa, n, r).perimeter;
  };

  const std::size_t N = static_cast<std::size_t>(intervals);
  std::vector<double> r(N + 1), phi(N + 1), slope(N + 1);
  for (std::size_t i = 0; i <= N; ++i) r[i] = R0 * static_cast<double>(i) / static_cast<double>(N);
  r[N] = R0;
  std::vector<double> piece(N);
  for (std::size_t i = 0; i < N; ++i) piece[i] = quad::adaptive_simpson(dphi, r[i], r[i + 1], 1e-13);
  for (std::size_t i = 0; i <= N; ++i) slope[i] = dphi(r[i]);
  slope[0] = 0.0;
  phi[N] = -slope[N] / beta_bar;
  for (std::size_t i = N; i-- > 0;) phi[i] = phi[i + 1] - piece[i];

  RadialSolution sol{RadialProfile(model, n, r, phi, slope), R0, beta_bar, phi[N], slope[N], h.mass(R0)};
  return sol;
}

double monotonicity_report(const RadialProfile& v) {
  double worst = -std::numeric_limits<double>::infinity();
  const auto& r = v.r();
  const auto& x = v.values();
  for (std::size_t i = 0; i + 1 < r.size(); ++i) worst = std::max(worst, (x[i + 1] - x[i]) / (r[i + 1] - r[i]));
  return worst;
}

RadialProfile closed_form_disk(double R, double beta, int samples) {
  if (!(R > 0.0) || !(beta > 0.0)) throw std::invalid_argument("closed_form_disk: R and beta must be > 0");
  if (samples < 2) throw std::invalid_argument("closed_form_disk: need >= 2 samples");
  std::vector<double> r(static_cast<std::size_t>(samples)), v(r.size()), d(r.size());
  for (int i = 0; i < samples; ++i) {
    r[i] = R * i / (samples - 1);
    v[i] = (R * R - r[i] * r[i]) / 4.0 + R / (2.0 * beta);
    d[i] = -r[i] / 2.0;
  }
  r.back() = R;
  return RadialProfile(Manifold::plane(2), 2, std::move(r), std::move(v), std::move(d));
}

double level_identity_residual(const RadialSolution& sol, const RadialProfile& h, int levels) {
  const RadialProfile& v = sol.profile;
  const int n = v.dim();
  const double kappa = v.kappa();
  const double top = v.value(0.0);
  double worst = 0.0;
  for (int j = 1; j <= levels; ++j) {
    const double t = sol.v0 + (top - sol.v0) * j / (levels + 1.0);
    const double mu = v.superlevel_measure(t);
    const double r = inverse_ball_area(kappa, n, mu);
    const double perim = ball_metrics(kappa, n, r).perimeter;
    const double a = iso_profile_a(kappa, n, mu);
    const double lhs = std::pow(mu, (2.0 * n - 2.0) / n);
    const double rhs = a * a * (perim / std::abs(v.slope(r))) * h.mass(r);
    worst = std::max(worst, std::abs(lhs - rhs) / lhs);
  }
  return worst;
}

}  // namespace symcomp
