#include "scmm/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "scmm/errors.hpp"

namespace scmm {

namespace {

using ld = long double;

constexpr double kSeriesLimit = 8.0;
const ld kPiL = std::numbers::pi_v<ld>;
// Ai(0) = 3^{-2/3}/Gamma(2/3), -Ai'(0) = 3^{-1/3}/Gamma(1/3).
const ld kAi0 = std::pow(3.0L, -2.0L / 3.0L) / std::tgamma(2.0L / 3.0L);
const ld kAip0 = std::pow(3.0L, -1.0L / 3.0L) / std::tgamma(1.0L / 3.0L);

AiryValue airy_series(double xd) {
  const ld x = xd, x3 = x * x * x;
  const ld eps = std::numeric_limits<ld>::epsilon();
  // f = sum x^{3k} / ((2*3)(5*6)...), g = sum x^{3k+1} / ((3*4)(6*7)...), and derivatives.
  ld tf = 1, tg = x, tdf = x * x / 2, tdg = 1;
  ld f = tf, g = tg, df = tdf, dg = tdg;
  for (int k = 1; k < 200; ++k) {
    tf *= x3 / ((3 * k - 1) * (3.0L * k));
    tg *= x3 / ((3.0L * k) * (3 * k + 1));
    tdg *= x3 / ((3 * k - 2) * (3.0L * k));
    if (k > 1) tdf *= x3 / ((3 * k - 3) * (3 * k - 1.0L));
    f += tf;
    g += tg;
    dg += tdg;
    if (k > 1) df += tdf;
    const ld big = std::max({std::abs(tf), std::abs(tg), std::abs(tdf), std::abs(tdg)});
    if (big < eps * 1e-3L) break;
  }
  return {static_cast<double>(kAi0 * f - kAip0 * g), static_cast<double>(kAi0 * df - kAip0 * dg)};
}

// Coefficients u_k, v_k of the large-argument expansions.
struct UV {
  ld u[64];
  ld v[64];
  UV() {
    u[0] = v[0] = 1;
    for (int k = 1; k < 64; ++k) {
      u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0L * k);
      v[k] = -u[k] * (6 * k + 1) / (6 * k - 1);
    }
  }
};
const UV kUV;

// Sum of s_k c_k z^{-k} over k with the given parity stride, stopped at the smallest term.
ld asym_sum(const ld* c, ld z, int start, int stride, bool alternate) {
  ld sum = 0, last = std::numeric_limits<ld>::infinity();
  int sign = 1;
  for (int k = start; k < 64; k += stride) {
    const ld term = c[k] * std::pow(z, -static_cast<ld>(k));
    if (std::abs(term) > last) break;
    sum += sign * term;
    last = std::abs(term);
    if (alternate) sign = -sign;
  }
  return sum;
}

AiryValue airy_asymptotic(double xd) {
  const ld x = std::abs(static_cast<ld>(xd));
  const ld zeta = 2.0L / 3.0L * x * std::sqrt(x);
  const ld q = std::pow(x, 0.25L);
  if (xd > 0) {
    const ld e = std::exp(-zeta) / (2 * std::sqrt(kPiL));
    const ld su = asym_sum(kUV.u, -zeta, 0, 1, false);
    const ld sv = asym_sum(kUV.v, -zeta, 0, 1, false);
    return {static_cast<double>(e / q * su), static_cast<double>(-e * q * sv)};
  }
  const ld s = std::sin(zeta + kPiL / 4), c = std::cos(zeta + kPiL / 4);
  const ld ue = asym_sum(kUV.u, zeta, 0, 2, true), uo = asym_sum(kUV.u, zeta, 1, 2, true);
  const ld ve = asym_sum(kUV.v, zeta, 0, 2, true), vo = asym_sum(kUV.v, zeta, 1, 2, true);
  const ld rp = std::sqrt(kPiL);
  return {static_cast<double>((s * ue - c * uo) / (q * rp)), static_cast<double>(-q / rp * (c * ve + s * vo))};
}

ld j_series(ld nu, ld x, bool derivative) {
  const ld h = x / 2, h2 = h * h;
  const ld eps = std::numeric_limits<ld>::epsilon();
  // t_k = (-1)^k h^{2k+nu} / (k! Gamma(k+nu+1)); the derivative series carries (2k+nu)/x.
  ld t = (nu == 0 ? 1.0L : std::pow(h, nu)) / std::tgamma(nu + 1);
  ld sum = 0;
  for (int k = 0; k < 500; ++k) {
    if (k > 0) t *= -h2 / (k * (k + nu));
    const ld term = derivative ? t * (2 * k + nu) / (2 * h) : t;
    sum += term;
    if (k > 2 && std::abs(term) < eps * 1e-3L * std::max(std::abs(sum), 1e-300L)) break;
  }
  return sum;
}

ld j_hankel(ld nu, ld x) {
  const ld mu = 4 * nu * nu;
  ld P = 0, Q = 0, a = 1, last = std::numeric_limits<ld>::infinity();
  for (int k = 0; k < 80; ++k) {
    if (k > 0) a *= (mu - (2 * k - 1) * (2 * k - 1.0L)) / (k * 8 * x);
    if (std::abs(a) > last && k > 2) break;
    last = std::abs(a);
    const int sign = ((k / 2) % 2 == 0) ? 1 : -1;
    if (k % 2 == 0)
      P += sign * a;
    else
      Q += sign * a;
    if (a == 0) break;
  }
  const ld chi = x - (nu / 2 + 0.25L) * kPiL;
  return std::sqrt(2 / (kPiL * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

bool use_hankel(double nu, double x) { return x > 15.0 && x > nu * nu; }

}  // namespace

AiryValue airy(double x) {
  if (!std::isfinite(x)) throw ValidationError("airy: argument must be finite");
  return std::abs(x) <= kSeriesLimit ? airy_series(x) : airy_asymptotic(x);
}

double airy_ai(double x) { return airy(x).ai; }
double airy_ai_prime(double x) { return airy(x).aip; }

double bessel_j(double nu, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("bessel_j: x must be finite and >= 0");
  if (!(nu > -2.0)) throw ValidationError("bessel_j: order must be > -2");
  if (nu < 0 && nu == std::round(nu)) return -bessel_j(-nu, x);  // J_{-1} = -J_1
  if (x == 0.0) return nu == 0.0 ? 1.0 : (nu > 0 ? 0.0 : std::numeric_limits<double>::infinity());
  if (use_hankel(nu, x)) return static_cast<double>(j_hankel(nu, x));
  return static_cast<double>(j_series(nu, x, false));
}

double bessel_j_prime(double nu, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("bessel_j_prime: x must be finite and >= 0");
  if (!(nu > -2.0)) throw ValidationError("bessel_j_prime: order must be > -2");
  if (nu < 0 && nu == std::round(nu)) return -bessel_j_prime(-nu, x);
  if (x == 0.0) {
    if (nu == 1.0) return 0.5;
    if (nu == 0.0 || nu > 1.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  if (use_hankel(nu, x)) {
    // Step toward lower order so the neighbour stays in the Hankel range.
    if (nu >= -1.0) return bessel_j(nu - 1, x) - nu / x * bessel_j(nu, x);
    return nu / x * bessel_j(nu, x) - bessel_j(nu + 1, x);
  }
  return static_cast<double>(j_series(nu, x, true));
}

}  // namespace scmm
