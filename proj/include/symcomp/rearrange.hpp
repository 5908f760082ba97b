#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "symcomp/fem.hpp"
#include "symcomp/radial.hpp"

namespace symcomp {

/// Distribution function mu(t) = |{u > t}| on a strictly increasing level
/// grid. mu_left holds the left limits |{u >= t}| and mu_mid the values at
/// midpoints between consecutive levels; with every vertex value among the
/// levels, mu is exactly quadratic between levels and these three tables
/// determine it.
struct DistributionData {
  std::vector<double> levels;
  std::vector<double> mu;
  std::vector<double> mu_left;
  std::vector<double> mu_mid;
  double total = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
};

/// `uniform` equally spaced levels on [min, max] merged with every vertex value.
std::vector<double> default_level_grid(const ScalarField& u, int uniform = 512);

DistributionData distribution_function(const ScalarField& u, std::span<const double> levels,
                                       Backend backend = Backend::parallel);
DistributionData distribution_function(const ScalarField& u);

/// Decreasing rearrangement h*(s) = inf{t : mu(t) < s} on [0, |Omega|].
class RearrangedProfile {
 public:
  struct Segment {
    double s0 = 0.0, s1 = 0.0;      // s-range, s0 < s1
    double t_lo = 0.0, t_hi = 0.0;  // values at s1 and s0
    bool plateau = false;
    // smooth: mu(t_lo + x (t_hi - t_lo)) = q0 + qb x + qc x^2 on x in [0, 1]
    double q0 = 0.0, qb = 0.0, qc = 0.0;
  };

  RearrangedProfile(std::vector<Segment> segments, double total, double max_value);

  double total() const { return total_; }
  double max_value() const { return max_value_; }
  double min_value() const;
  const std::vector<Segment>& segments() const { return segments_; }

  /// h*(s); throws std::out_of_range outside [0, total].
  double value(double s) const;
  std::vector<double> sample(std::span<const double> s_grid) const;
  /// |{s : h*(s) > t}|, which equals mu(t).
  double measure_above(double t) const;
  /// Integral of g(h*(s)) over [a, b].
  double integral(double a, double b, const std::function<double(double)>& g) const;
  /// Integral of h* over [0, s].
  double primitive(double s) const;
  /// Profile of s -> h*(theta s) on [0, total/theta].
  RearrangedProfile rescaled(double theta) const;

 private:
  std::size_t find_segment(double s) const;
  double invert(const Segment& seg, double s) const;

  std::vector<Segment> segments_;
  std::vector<double> cumulative_;  // primitive at each segment start
  double total_ = 0.0;
  double max_value_ = 0.0;
};

RearrangedProfile decreasing_rearrangement(const DistributionData& d);
/// Rearrangement of a step function taking values[i] on a set of measure measures[i].
RearrangedProfile piecewise_constant_rearrangement(std::span<const double> values, std::span<const double> measures);

/// Integral over [0, min(total)] of a*(s) b*(s).
double product_integral(const RearrangedProfile& a, const RearrangedProfile& b);

/// h#(r) = h*(theta |B_r|) on the ball of area |Omega| / theta.
RadialProfile schwarz_profile(const std::shared_ptr<const RearrangedProfile>& p, double theta, const Manifold& m);

struct HardyLittlewood {
  double rearranged = 0.0;  // int f* g*
  double direct = 0.0;      // int f g
  double margin = 0.0;
};
HardyLittlewood hardy_littlewood_check(const ScalarField& f, const ScalarField& g);

struct ConcentrationResult {
  double margin = 0.0;  // min over s of (s/|Omega|)^{(n-2)/n} int f - int_0^s f*
  double s_at_min = 0.0;
};
ConcentrationResult concentration_check(const RearrangedProfile& fstar, int n, double total);

/// Exact integral of f over {u > t} (clipping each triangle).
double superlevel_integral(const ScalarField& u, const ScalarField& f, double t);

}  // namespace symcomp
