#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "scmm/errors.hpp"
#include "scmm/orthopoly.hpp"

using namespace scmm;

namespace {

Potential gaussian(std::int64_t n) { return Potential({0.0, 1.0}, {}, IntervalSet::real_line(), n); }
Potential laguerre() { return Potential({1.0}, {}, IntervalSet({{0.0, kInf}}), 1); }

// Monic probabilists' Hermite polynomial scaled to the weight e^{-n x^2 / 2}.
double monic_hermite(int j, double n, double x) {
  const double s = std::sqrt(n) * x;
  return std::pow(n, -0.5 * j) * std::pow(2.0, -0.5 * j) * boost::math::hermite(j, s / std::sqrt(2.0));
}

double monic_laguerre(int j, double x) {
  return (j % 2 ? -1.0 : 1.0) * boost::math::factorial<double>(j) * boost::math::laguerre(j, x);
}

}  // namespace

TEST_CASE("gaussian mass") {
  for (int n : {1, 10, 60}) {
    const auto q = build_quadrature(gaussian(n), 400);
    CHECK(q.log_mass() == doctest::Approx(0.5 * std::log(2.0 * std::numbers::pi / n)).epsilon(1e-10));
    CHECK(std::is_sorted(q.nodes.begin(), q.nodes.end()));
    for (double w : q.weights) CHECK(w > 0.0);
  }
}

TEST_CASE("charged gaussian mass against an adaptive oracle") {
  const Potential p({0.0, 1.0}, {{cplx(0.0, 0.0), 0.5, {}}}, IntervalSet::real_line(), 1);
  const auto q = build_quadrature(p, 800);
  boost::math::quadrature::exp_sinh<double> es;
  const double half = es.integrate([](double x) { return x * std::exp(-0.5 * x * x); });
  CHECK(std::exp(q.log_mass()) == doctest::Approx(2.0 * half).epsilon(1e-10));
}

TEST_CASE("hard edge grading reaches the endpoint") {
  const Potential p({-1.0}, {{cplx(0.0, 0.0), 0.5, {}}}, IntervalSet({{-kInf, 0.0}}), 50);
  const auto q = build_quadrature(p, 800);
  CHECK(q.nodes.back() < 0.0);
  CHECK(q.nodes.back() > -1e-8);
  CHECK_FALSE(q.provenance.empty());
}

TEST_CASE("gaussian recurrence") {
  for (int n : {1, 10, 40}) {
    CAPTURE(n);
    const auto r = stieltjes_recurrence(build_quadrature(gaussian(n), std::max(800, 16 * n)), 40);
    for (int j = 0; j <= 40; ++j) CHECK(std::abs(r.a[j]) < 1e-12);
    for (int j = 1; j <= 30; ++j) CHECK(r.b[j] == doctest::Approx(double(j) / n).epsilon(1e-10));
    for (int j : {1, 5, 12})
      for (double x : {-1.3, 0.2, 0.9}) {
        const double scale = std::pow(double(n), -0.5 * j);
        CHECK(eval_poly(r, j, x).first / scale == doctest::Approx(monic_hermite(j, n, x) / scale).epsilon(1e-9));
      }
    for (int j = 0; j <= 40; ++j) CHECK(std::isfinite(r.log_h[j]));
  }
}

TEST_CASE("laguerre recurrence") {
  const auto r = stieltjes_recurrence(build_quadrature(laguerre(), 1000), 40);
  for (int j = 0; j <= 30; ++j) {
    CHECK(r.a[j] == doctest::Approx(2.0 * j + 1.0).epsilon(1e-10));
    if (j > 0) CHECK(r.b[j] == doctest::Approx(double(j) * j).epsilon(1e-10));
  }
  for (int j : {2, 6, 10})
    for (double x : {0.5, 3.0, 11.0}) CHECK(eval_poly(r, j, x).first == doctest::Approx(monic_laguerre(j, x)).epsilon(1e-9));
}

TEST_CASE("polynomial evaluation basics") {
  const auto r = stieltjes_recurrence(build_quadrature(gaussian(1), 400), 10);
  const auto p0 = eval_poly(r, 0, 0.7);
  CHECK(p0.first == 1.0);
  CHECK(p0.second == 0.0);
  CHECK(eval_poly(r, 1, 0.7).first == doctest::Approx(0.7 - r.a[0]));
  CHECK(eval_poly(r, 2, 0.0).first == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("orthonormal values and derivatives") {
  const auto r = stieltjes_recurrence(build_quadrature(gaussian(5), 800), 12);
  const double x = 0.37, h = 1e-6;
  const auto v = eval_orthonormal(r, 8, x, true);
  const auto vp = eval_orthonormal(r, 8, x + h), vm = eval_orthonormal(r, 8, x - h);
  const double f = std::exp(v.log_factor);
  const double fd = (vp.q * std::exp(vp.log_factor) - vm.q * std::exp(vm.log_factor)) / (2 * h);
  CHECK(v.dq * f == doctest::Approx(fd).epsilon(1e-6));
  CHECK(v.q * f == doctest::Approx(eval_poly(r, 8, x).first / std::sqrt(r.h(8))).epsilon(1e-12));
}

TEST_CASE("gram matrix") {
  const auto q = build_quadrature(gaussian(3), 800);
  const auto r = stieltjes_recurrence(q, 30);
  const auto g = gram_check(r, q, 20);
  CHECK(g.off_diagonal < 1e-10);
  CHECK(g.norm_error < 1e-8);
  const auto g0 = gram_check(r, q, 0);
  CHECK(g0.off_diagonal == 0.0);

  // Coefficients from a coarse, unchecked rule do not pass against a fine one.
  QuadratureOptions coarse;
  coarse.resolution = 60;
  coarse.self_check = false;
  const auto bad = stieltjes_recurrence(build_quadrature(gaussian(3), coarse), 14);
  const auto gb = gram_check(bad, q, 14);
  CHECK_FALSE(gb.ok(1e-8));
}

TEST_CASE("doubling the resolution leaves the coefficients put") {
  const Potential p({0.0, -1.0, 0.0, 1.0}, {{cplx(0.3, 0.0), 0.5, {}}}, IntervalSet::real_line(), 20);
  const auto r1 = stieltjes_recurrence(build_quadrature(p, 800), 40);
  const auto r2 = stieltjes_recurrence(build_quadrature(p, 1600), 40);
  for (int j = 0; j <= 20; ++j) {
    CHECK(std::abs(r1.a[j] - r2.a[j]) < 1e-8 * std::max(1.0, std::abs(r2.a[j])));
    CHECK(std::abs(r1.b[j] - r2.b[j]) < 1e-8 * std::max(1.0, std::abs(r2.b[j])));
  }
}

TEST_CASE("even weights give zero diagonal coefficients") {
  const Potential p({0.0, -2.0, 0.0, 1.0}, {}, IntervalSet::real_line(), 30);
  const auto r = stieltjes_recurrence(build_quadrature(p, 800), 30);
  for (int j = 0; j <= 30; ++j) CHECK(std::abs(r.a[j]) < 1e-12);
}

TEST_CASE("zeros lie inside the node range") {
  const Potential p({-1.0}, {{cplx(0.0, 0.0), 0.5, {}}}, IntervalSet({{-kInf, 0.0}}), 40);
  const auto q = build_quadrature(p, 800);
  const auto r = stieltjes_recurrence(q, 40);
  const auto z = polynomial_zeros(r, 40);
  REQUIRE(z.size() == 40);
  CHECK(std::is_sorted(z.begin(), z.end()));
  CHECK(z.front() > q.nodes.front());
  CHECK(z.back() < q.nodes.back());
  for (double x : {z.front(), z[17], z.back()}) CHECK(std::abs(eval_poly(r, 40, x).first) < 1e-8 * std::abs(eval_poly(r, 40, x - 1.0).first));
}

TEST_CASE("degree limited by the discretization") {
  QuadratureOptions o;
  o.resolution = 80;
  o.self_check = false;
  const auto q = build_quadrature(gaussian(1), o);
  CHECK_THROWS_AS(stieltjes_recurrence(q, int(q.size())), ValidationError);

  // A measure on two points supports only two orthogonal polynomials.
  QuadratureRule two;
  for (int i = 0; i < 20; ++i) {
    two.nodes.push_back(i < 10 ? 0.0 : 1.0);
    two.weights.push_back(1.0);
  }
  CHECK_THROWS_WITH_AS(stieltjes_recurrence(two, 4), doctest::Contains("degree exceeds discretization resolution"),
                       NumericalError);
}

TEST_CASE("recurrence csv and binary cache") {
  const Potential p = gaussian(4);
  const auto r = stieltjes_recurrence(build_quadrature(p, 800), 8);
  const std::string csv = recurrence_csv(r);
  CHECK(csv.rfind("j,a_j,b_j,h_j,log_h_j\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

  const auto key = recurrence_cache_key(p, 800, 8);
  CHECK(key != recurrence_cache_key(p.with_n(5), 800, 8));
  CHECK(key != recurrence_cache_key(p, 1600, 8));
  const auto path = (std::filesystem::temp_directory_path() / "scmm_test_cache.rec").string();
  save_recurrence(path, r, key);
  Recurrence back;
  REQUIRE(load_recurrence(path, key, back));
  CHECK(back.m_max == r.m_max);
  CHECK(back.b == r.b);
  CHECK(back.log_h == r.log_h);
  Recurrence other;
  CHECK_FALSE(load_recurrence(path, key + 1, other));
  CHECK_FALSE(load_recurrence(path + ".missing", key, other));
  std::filesystem::remove(path);
}
