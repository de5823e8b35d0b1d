#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <cmath>

#include "scmm/special.hpp"

using namespace scmm;

TEST_CASE("airy values at zero") {
  CHECK(std::abs(airy_ai(0.0) - std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0)) < 1e-14);
  CHECK(std::abs(airy_ai_prime(0.0) + std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0)) < 1e-14);
}

TEST_CASE("airy against boost") {
  for (double x = -30.0; x <= 30.0; x += 0.173) {
    CAPTURE(x);
    const auto a = airy(x);
    // Relative accuracy on the decaying side, absolute 2e-13 where the series cancels (5 < x <= 8).
    const double scale = x > 0 ? std::exp(-2.0 / 3.0 * std::pow(x, 1.5)) : 1.0;
    const double tol = std::max(1e-12 * scale, x <= 8.0 ? 2e-13 : 0.0);
    CHECK(std::abs(a.ai - boost::math::airy_ai(x)) <= tol);
    CHECK(std::abs(a.aip - boost::math::airy_ai_prime(x)) <= std::max(1.0, std::sqrt(std::abs(x))) * tol);
  }
}

TEST_CASE("airy ODE residual") {
  const double h = 1e-5;
  for (double x = -5.0; x <= 5.0; x += 0.25) {
    const double second = (airy_ai_prime(x + h) - airy_ai_prime(x - h)) / (2 * h);
    CHECK(std::abs(second - x * airy_ai(x)) < 1e-9);
  }
}

TEST_CASE("bessel against boost") {
  for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0, 3.7}) {
    for (double x = 0.0; x <= 60.0; x += 0.37) {
      CAPTURE(nu);
      CAPTURE(x);
      CHECK(std::abs(bessel_j(nu, x) - boost::math::cyl_bessel_j(nu, x)) < 1e-11);
      if (x > 0.0) CHECK(std::abs(bessel_j_prime(nu, x) - boost::math::cyl_bessel_j_prime(nu, x)) < 1e-10);
    }
  }
}

TEST_CASE("bessel ODE residual") {
  const double h = 1e-5;
  for (double nu : {0.0, 0.5, 1.0, 2.5}) {
    for (double x = 0.5; x <= 30.0; x += 0.5) {
      const double j = bessel_j(nu, x), jp = bessel_j_prime(nu, x);
      const double jpp = (bessel_j_prime(nu, x + h) - bessel_j_prime(nu, x - h)) / (2 * h);
      CAPTURE(nu); CAPTURE(x);
      CHECK(std::abs(jpp + jp / x + (1.0 - nu * nu / (x * x)) * j) < 1e-9);
    }
  }
}

TEST_CASE("negative orders") {
  for (double x : {0.3, 2.0, 17.0}) {
    CHECK(bessel_j(-1.0, x) == doctest::Approx(-bessel_j(1.0, x)).epsilon(1e-13));
    CHECK(bessel_j(-0.5, x) == doctest::Approx(std::sqrt(2.0 / (M_PI * x)) * std::cos(x)).epsilon(1e-12));
  }
  CHECK(bessel_j(0.0, 0.0) == 1.0);
  CHECK(bessel_j(1.0, 0.0) == 0.0);
}
