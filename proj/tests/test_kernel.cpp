#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "scmm/errors.hpp"
#include "scmm/kernel.hpp"
#include "scmm/scenarios.hpp"

using namespace scmm;
using std::numbers::pi;

namespace {

struct Setup {
  Potential p;
  QuadratureRule q;
  Recurrence r;
};

Setup make(const Potential& p) {
  Setup s{p, build_quadrature(p, default_resolution(p.n())), {}};
  s.r = stieltjes_recurrence(s.q, static_cast<int>(p.n()));
  return s;
}

Potential gaussian(std::int64_t n) { return Potential({0.0, 1.0}, {}, IntervalSet::real_line(), n); }
Potential quartic(std::int64_t n) { return Potential({0.0, -2.0, 0.0, 1.0}, {}, IntervalSet::real_line(), n); }
Potential hard_edge(std::int64_t n) {
  return Potential({-1.0}, {{cplx(0.0, 0.0), 0.5, {}}}, IntervalSet({{-kInf, 0.0}}), n);
}

double airy_oracle(double u, double v) {
  using boost::math::airy_ai;
  using boost::math::airy_ai_prime;
  return (airy_ai(u) * airy_ai_prime(v) - airy_ai(v) * airy_ai_prime(u)) / (u - v);
}

double bessel_oracle(double a, double u, double v) {
  using boost::math::cyl_bessel_j;
  using boost::math::cyl_bessel_j_prime;
  const double su = std::sqrt(u), sv = std::sqrt(v);
  return (cyl_bessel_j(a, su) * sv * cyl_bessel_j_prime(a, sv) - cyl_bessel_j(a, sv) * su * cyl_bessel_j_prime(a, su)) /
         (2.0 * (u - v));
}

}  // namespace

TEST_CASE("single-site gaussian kernel") {
  const auto s = make(gaussian(1));
  CHECK(cd_kernel(s.r, s.p, 0.0, 0.0).value == doctest::Approx(1.0 / std::sqrt(2.0 * pi)).epsilon(1e-12));
}

TEST_CASE("kernel symmetry and diagonal sign") {
  for (const auto& pot : {gaussian(30), quartic(30), hard_edge(30)}) {
    const auto s = make(pot);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, pot.support().sup() > 0 ? 3.0 : 0.0);
    for (int i = 0; i < 40; ++i) {
      const double x = u(rng), y = u(rng);
      CHECK(cd_kernel(s.r, s.p, x, y).value == cd_kernel(s.r, s.p, y, x).value);
      CHECK(cd_kernel(s.r, s.p, x, x).value >= -1e-12);
    }
  }
}

TEST_CASE("confluent and near-diagonal forms agree with nearby off-diagonal values") {
  const auto s = make(quartic(20));
  for (double x : {-1.3, 0.0, 0.8}) {
    const double diag = cd_kernel(s.r, s.p, x, x).value;
    CHECK(cd_kernel(s.r, s.p, x, x + 1e-10).value == doctest::Approx(diag).epsilon(1e-8));
    CHECK(cd_kernel(s.r, s.p, x, x + 1e-6).value == doctest::Approx(diag).epsilon(1e-6));
  }
}

TEST_CASE("trace identity") {
  for (std::int64_t n : {10, 30, 60})
    for (const auto& pot : {gaussian(n), quartic(n), hard_edge(n)}) {
      const auto s = make(pot);
      CHECK(kernel_trace(s.r, s.p, s.q) == doctest::Approx(double(n)).epsilon(1e-8));
    }
}

TEST_CASE("reproducing property") {
  const auto s = make(gaussian(10));
  const std::vector<std::pair<double, double>> probes{{0.0, 0.3}, {-1.0, 1.2}, {0.5, 0.5}, {1.7, -0.4}, {-2.2, -2.0}};
  CHECK(projection_residual(s.r, s.p, s.q, probes) < 1e-7);
  CHECK(projection_residual(s.r, s.p, s.q, {{0.7, 0.7}}) < 1e-7);

  // Coefficients from a coarse unchecked rule are not a projection for the true weight.
  QuadratureOptions coarse;
  coarse.resolution = 60;
  coarse.self_check = false;
  const auto bad = stieltjes_recurrence(build_quadrature(s.p, coarse), 10);
  CHECK(projection_residual(bad, s.p, s.q, probes) > 1e-4);
}

TEST_CASE("points outside the support are flagged") {
  const auto s = make(hard_edge(10));
  const auto k = cd_kernel(s.r, s.p, 0.5, -1.0);
  CHECK_FALSE(k.in_domain);
  CHECK(k.value == 0.0);
  CHECK(cd_kernel(s.r, s.p, -0.5, -1.0).in_domain);
  CHECK_THROWS_AS(cd_kernel(s.r, s.p.with_n(11), -1.0, -1.0), ValidationError);
}

TEST_CASE("bulk density from the diagonal") {
  auto err = [](std::int64_t n) {
    const auto s = make(gaussian(n));
    double e = 0.0;
    for (double x : {-1.0, -0.3, 0.5, 1.2})
      e = std::max(e, std::abs(cd_kernel(s.r, s.p, x, x).value / n - std::sqrt(4.0 - x * x) / (2.0 * pi)));
    return e;
  };
  // Pointwise error oscillates at O(1/n); compare across a factor of four.
  const double e40 = err(40), e160 = err(160);
  CHECK(e40 < 5e-3);
  CHECK(e160 < 0.5 * e40);
}

TEST_CASE("closed-form limits") {
  CHECK(sine_kernel(0.4, 0.4) == 1.0);
  CHECK(std::abs(sine_kernel(0.0, 1.0)) < 1e-16);
  CHECK(sine_kernel(0.0, 0.5) == doctest::Approx(2.0 / pi));

  const double aip0 = -std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);
  CHECK(airy_kernel(0.0, 0.0) == doctest::Approx(aip0 * aip0).epsilon(1e-12));
  for (auto [u, v] : {std::pair{-3.0, 1.0}, {0.5, -0.25}, {-6.0, -5.5}, {2.0, 0.1}})
    CHECK(airy_kernel(u, v) == doctest::Approx(airy_oracle(u, v)).epsilon(1e-10));
  CHECK(airy_kernel(-1.0, -1.0 + 1e-9) == doctest::Approx(airy_kernel(-1.0, -1.0)).epsilon(1e-8));

  for (double a : {0.0, 0.5, 1.0, 2.0})
    for (auto [u, v] : {std::pair{0.3, 2.0}, {5.0, 11.0}, {40.0, 1.0}})
      CHECK(bessel_kernel(a, u, v) == doctest::Approx(bessel_oracle(a, u, v)).epsilon(1e-9));

  // Series at the origin: K(0; u, u) -> (J_0(0)^2 - J_1(0) J_{-1}(0)) / 4 = 1/4.
  double prev = bessel_kernel(0.0, 1e-2, 1e-2);
  for (double u : {1e-4, 1e-6, 1e-8}) {
    const double k = bessel_kernel(0.0, u, u);
    CHECK(std::abs(k - 0.25) < std::abs(prev - 0.25) + 1e-15);
    prev = k;
  }
  CHECK(prev == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(bessel_kernel(0.0, 1e-8, 2e-8) == doctest::Approx(0.25).epsilon(1e-6));

  // Order 1/2 reduces to a sine-type kernel in sqrt(u).
  for (auto [u, v] : {std::pair{1.0, 4.0}, {0.3, 2.7}}) {
    const double x = std::sqrt(u), y = std::sqrt(v);
    const double closed = (std::sin(x - y) / (x - y) - std::sin(x + y) / (x + y)) / (2.0 * pi * std::sqrt(x * y));
    CHECK(bessel_kernel(0.5, u, v) == doctest::Approx(closed).epsilon(1e-12));
  }

  CHECK_THROWS_AS(bessel_kernel(-1.5, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(bessel_kernel(0.0, -1.0, 1.0), ValidationError);
}

TEST_CASE("threaded grid evaluation matches serial") {
  const auto s = make(gaussian(40));
  const auto g = linspace(-2.0, 2.0, 13);
  auto f = [&](double u, double v) { return cd_kernel(s.r, s.p, u, v); };
  const auto a = evaluate_grid(f, g, g, 1), b = evaluate_grid(f, g, g, 4);
  CHECK(a.values == b.values);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(a.values[i][j] == a.values[j][i]);
}

TEST_CASE("reference maps from model data") {
  CHECK(to_string(parse_reference("airy")) == "airy");
  CHECK_THROWS_AS(parse_reference("hermite"), ValidationError);

  const Scenario bulk = make_scenario("gue-bulk");
  const auto cp = critical_point_at(bulk.family, 0.0);
  CHECK(cp.order_k == 0);
  CHECK(cp.delta.value() == 1.0);
  const auto md = extract_model_data(bulk.family, cp, 100.0);
  const auto sine = reference_map(ReferenceKind::sine, md);
  CHECK(sine.scale == doctest::Approx(1.0 / pi).epsilon(1e-10));
  CHECK(sine(0.0, 0.0) == doctest::Approx(1.0 / pi));
  CHECK_THROWS_AS(reference_map(ReferenceKind::airy, md), ValidationError);

  const Scenario edge = make_scenario("gue-edge");
  const auto airy_map = reference_map(ReferenceKind::airy, extract_model_data(edge.family, critical_point_at(edge.family, 2.0), 100.0));
  CHECK(airy_map.scale == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(airy_map.shift) < 1e-8);

  const Scenario hard = make_scenario("mp-hard-edge", {0.0, 0.5, 0.0});
  const auto bes = reference_map(ReferenceKind::bessel, extract_model_data(hard.family, critical_point_at(hard.family, 0.0), 100.0));
  CHECK(bes.scale == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(bes.order == 1.0);
  CHECK_THROWS_AS(ReferenceMap{}(0.0, 0.0), ValidationError);
}

TEST_CASE("scenario registry") {
  CHECK(scenario_names().size() == 5);
  for (const auto& name : scenario_names()) CHECK(make_scenario(name, default_params(name)).name == name);
  CHECK_THROWS_AS(make_scenario("gue-middle"), ValidationError);
  CHECK(default_params("mp-two-charge").alpha1 == 0.5);
  CHECK(linspace(-1.0, 1.0, 5) == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(fit_loglog_slope({10, 20, 40}, {3.0, 0.75, 0.1875}) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(critical_point_at(make_scenario("gue-bulk").family, 3.0), ValidationError);
}

TEST_CASE("small convergence scan") {
  const Scenario s = make_scenario("gue-bulk");
  const auto res = convergence_scan(s, {20, 40}, linspace(-1.0, 1.0, 5), 2);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.decreasing);
  CHECK(res.fitted_exponent < -0.5);
  CHECK(res.reference == "sine");

  const auto self = convergence_scan(make_scenario("quartic-merge"), {20, 40, 80}, linspace(-1.0, 1.0, 3));
  CHECK_FALSE(self.rows[0].compared);
  CHECK(self.rows[2].compared);
  CHECK_THROWS_AS(convergence_scan(s, {}, linspace(-1.0, 1.0, 3)), ValidationError);
}
