#include "scmm/series.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace scmm {

std::vector<std::complex<double>> poly_roots(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  const int deg = static_cast<int>(coeffs.size()) - 1;
  std::vector<std::complex<double>> roots;
  if (deg < 1) return roots;
  // Exact zero roots first; the companion matrix smears multiple roots.
  std::size_t lead_zeros = 0;
  while (coeffs[lead_zeros] == 0.0) ++lead_zeros;
  roots.assign(lead_zeros, 0.0);
  coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<long>(lead_zeros));
  const int d = static_cast<int>(coeffs.size()) - 1;
  if (d < 1) return roots;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -coeffs[i] / coeffs[d];
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  for (int i = 0; i < d; ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    // Newton polish.
    for (int it = 0; it < 3; ++it) {
      std::complex<double> p = 0.0, dp = 0.0;
      for (int j = d; j >= 0; --j) {
        dp = dp * z + p;
        p = p * z + coeffs[j];
      }
      if (dp == 0.0) break;
      const std::complex<double> step = p / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
    }
    roots.push_back(z);
  }
  return roots;
}

}  // namespace scmm
