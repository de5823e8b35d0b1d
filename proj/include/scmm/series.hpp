#pragma once

#include <complex>
#include <vector>

namespace scmm {

// Coefficients s_0..s_order of prod_r (1 - r u)^{gamma_r} around u = 0.
template <class T>
std::vector<T> product_power_series(const std::vector<T>& roots, const std::vector<double>& gammas, int order) {
  std::vector<T> out(order + 1, T(0));
  out[0] = T(1);
  std::vector<T> factor(order + 1);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    // Binomial series of (1 - r u)^gamma.
    factor[0] = T(1);
    for (int m = 1; m <= order; ++m)
      factor[m] = factor[m - 1] * (-roots[i]) * T((gammas[i] - (m - 1)) / m);
    std::vector<T> next(order + 1, T(0));
    for (int a = 0; a <= order; ++a) {
      if (out[a] == T(0)) continue;
      for (int b = 0; a + b <= order; ++b) next[a + b] += out[a] * factor[b];
    }
    out.swap(next);
  }
  return out;
}

// Ascending coefficients.
template <class T, class X>
auto poly_eval(const std::vector<T>& c, X x) {
  decltype(T() * X()) acc = 0;
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * x + c[j];
  return acc;
}

template <class T>
std::vector<T> poly_derivative(const std::vector<T>& c) {
  std::vector<T> d;
  for (std::size_t j = 1; j < c.size(); ++j) d.push_back(c[j] * T(static_cast<double>(j)));
  return d;
}

// Ascending coefficients of lead * prod (z - r).
template <class T>
std::vector<T> poly_from_roots(T lead, const std::vector<T>& roots) {
  std::vector<T> c{lead};
  for (const T& r : roots) {
    std::vector<T> next(c.size() + 1, T(0));
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= c[j] * r;
    }
    c.swap(next);
  }
  return c;
}

// Roots of a real polynomial with ascending coefficients (trailing zeros trimmed).
std::vector<std::complex<double>> poly_roots(std::vector<double> coeffs);

}  // namespace scmm
