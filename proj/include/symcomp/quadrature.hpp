#pragma once

// One-dimensional quadrature rules shared by the geometry, radial and
// rearrangement modules.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace symcomp::quad {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` points (Newton iteration on P_n).
const GaussRule& gauss_legendre_rule(int order);

template <class F>
double gauss_legendre(F&& f, double a, double b, int order) {
  const GaussRule& rule = gauss_legendre_rule(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth, int& budget) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (--budget < 0) throw QuadratureError("adaptive Simpson: evaluation budget exhausted");
  if (depth <= 0) {
    if (std::abs(delta) > 15.0 * tol)
      throw QuadratureError("adaptive Simpson: maximum recursion depth reached");
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, budget) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, budget);
}

}  // namespace detail

/// Adaptive Simpson with an absolute error target on [a, b].
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  int budget = 2'000'000;
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth, budget);
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 constants).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F& f, double a, double b, double& kronrod, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  kronrod = resk * h;
  error = std::abs((resk - resg) * h);
}

template <class F>
double gk_recurse(F& f, double a, double b, double tol, int depth) {
  double value = 0.0;
  double error = 0.0;
  gk15(f, a, b, value, error);
  if (error <= tol) return value;
  if (depth <= 0) throw QuadratureError("adaptive Gauss-Kronrod: maximum recursion depth reached");
  const double m = 0.5 * (a + b);
  return gk_recurse(f, a, m, 0.5 * tol, depth - 1) + gk_recurse(f, m, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (G7/K15) with an absolute error target on [a, b].
template <class F>
double adaptive_gauss(F&& f, double a, double b, double abs_tol, int max_depth = 40) {
  if (a == b) return 0.0;
  return detail::gk_recurse(f, a, b, abs_tol, max_depth);
}

}  // namespace symcomp::quad
