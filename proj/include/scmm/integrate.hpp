#pragma once

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <vector>

namespace scmm {

inline constexpr int kPanelNodes = 20;

// Gauss-Legendre nodes and weights on [-1, 1], ascending.
inline const std::pair<std::array<double, kPanelNodes>, std::array<double, kPanelNodes>>& gauss_legendre_rule() {
  static const auto rule = [] {
    using G = boost::math::quadrature::gauss<double, kPanelNodes>;
    std::array<double, kPanelNodes> x{}, w{};
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    const int half = kPanelNodes / 2;
    for (int i = 0; i < half; ++i) {
      x[half - 1 - i] = -ab[i];
      w[half - 1 - i] = wt[i];
      x[half + i] = ab[i];
      w[half + i] = wt[i];
    }
    return std::make_pair(x, w);
  }();
  return rule;
}

// Adaptive Gauss-Kronrod on [a, b]; works for real or complex integrands.
// Singular endpoints are fine as long as the integrand is not evaluated there.
template <class F>
auto integrate(F&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 30) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 21>::integrate(f, a, b, max_depth, tol, &err);
}

// Double-exponential rule for integrands singular at one or both ends.
template <class F>
auto integrate_ends(F&& f, double a, double b, double tol = 1e-14) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  std::decay_t<F> g(f);
  return rule.integrate(g, a, b, tol);
}

// Integral over [a, b] split at interior breakpoints (log kinks, singularities).
template <class F>
auto integrate_split(F&& f, double a, double b, std::vector<double> breaks, double tol = 1e-13) {
  std::sort(breaks.begin(), breaks.end());
  decltype(f(a)) total{};
  double lo = a;
  for (double c : breaks) {
    if (c <= lo || c >= b) continue;
    total += integrate(f, lo, c, tol);
    lo = c;
  }
  total += integrate(f, lo, b, tol);
  return total;
}

}  // namespace scmm
