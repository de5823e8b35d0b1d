#pragma once

namespace scmm {

struct AiryValue {
  double ai = 0.0;
  double aip = 0.0;  // Ai'
};

// Maclaurin series in long double for |x| <= 8, asymptotic expansions beyond.
AiryValue airy(double x);
double airy_ai(double x);
double airy_ai_prime(double x);

// J_nu(x) for x >= 0 and nu > -2 (negative integer orders by reflection).
// Power series, or the Hankel expansion once x > 15 and x > nu^2.
double bessel_j(double nu, double x);
// dJ_nu/dx; infinite at x = 0 for 0 < nu < 1.
double bessel_j_prime(double nu, double x);

}  // namespace scmm
