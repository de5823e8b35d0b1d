#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "scmm/errors.hpp"
#include "scmm/potential.hpp"

using namespace scmm;

namespace {

Potential gaussian(std::int64_t n = 1) { return Potential({0.0, 1.0}, {}, IntervalSet::real_line(), n); }

bool check_passed(const ValidationReport& r, const std::string& prefix) {
  for (const auto& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0) return c.passed;
  FAIL("no check named " << prefix);
  return false;
}

}  // namespace

TEST_CASE("interval sets are sorted and reject overlap") {
  IntervalSet s({{2.0, 3.0}, {-1.0, 0.5}});
  CHECK(s[0].lo == -1.0);
  CHECK(s.contains(0.5));
  CHECK_FALSE(s.contains(1.0));
  CHECK(s.contains_interior(2.5));
  CHECK_FALSE(s.contains_interior(3.0));
  CHECK(s.bounded());
  CHECK(s.finite_endpoints() == std::vector<double>{-1.0, 0.5, 2.0, 3.0});
  CHECK_THROWS_AS(IntervalSet({{0.0, 2.0}, {1.0, 3.0}}), ValidationError);
  CHECK_THROWS_AS(IntervalSet({{1.0, 1.0}}), ValidationError);
  CHECK_FALSE(IntervalSet::real_line().bounded());
  const auto neg = IntervalSet({{-kInf, 0.0}}).negated();
  CHECK(neg[0].lo == 0.0);
  CHECK(neg[0].hi == kInf);
}

TEST_CASE("parse minimal gaussian config") {
  const Potential p = parse_potential(R"({"reg":[0,1],"support":[["-inf","inf"]]})");
  CHECK(p.reg_coeffs() == std::vector<double>{0.0, 1.0});
  CHECK(p.support()[0].lo == -kInf);
  CHECK(p.support()[0].hi == kInf);
  CHECK(p.eval_real(2.0) == doctest::Approx(2.0));
  CHECK(p.n() == 1);
}

TEST_CASE("lone complex singularity gets its conjugate") {
  const Potential p = parse_potential(
      R"({"reg":[0,1],"singularities":[{"b":[0,1],"alpha":0.5}],"support":[["-inf","inf"]],"n":3})");
  REQUIRE(p.singularities().size() == 2);
  CHECK(p.singularities()[0].location == std::conj(p.singularities()[1].location));
  CHECK(check_passed(validate(p), "conjugate_closure"));
}

TEST_CASE("schema and invariant violations") {
  CHECK_THROWS_WITH_AS(parse_potential(R"({"reg":[0,1],"singularities":[{"b":[0,0],"alpha":-0.5}],
                                           "support":[["-inf","inf"]]})"),
                       doctest::Contains("invariant violation: alpha"), ValidationError);
  CHECK_THROWS_AS(parse_potential(R"({"reg":[0,1]})"), ValidationError);
  CHECK_THROWS_AS(parse_potential(R"({"reg":[0,1],"support":[["-inf","inf"]],"extra":1})"), ValidationError);
  CHECK_THROWS_AS(parse_potential("not json"), ValidationError);
  CHECK_THROWS_AS(load_potential("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("evaluation of the parts of V") {
  CHECK(gaussian().eval_real(2.0, PotentialPart::reg) == doctest::Approx(2.0));
  const Potential quartic({0.0, -2.0, 0.0, 1.0}, {}, IntervalSet::real_line(), 1);
  CHECK(quartic.eval_real(0.0) == 0.0);
  CHECK(quartic.eval_real(2.0) == doctest::Approx(0.0));  // -4 + 4

  const std::int64_t n = 7;
  const Potential mp({-1.0}, {{cplx(0.0, 0.0), 0.5, {}}}, IntervalSet({{-kInf, 0.0}}), n);
  CHECK(mp.eval_real(-2.0, PotentialPart::br) == doctest::Approx(-(2.0 / n) * 0.5 * std::log(2.0)));
  CHECK(mp.eval_real(-2.0, PotentialPart::full) == doctest::Approx(2.0 - (2.0 / n) * 0.5 * std::log(2.0)));
}

TEST_CASE("weight values") {
  CHECK(gaussian().weight(0.0) == doctest::Approx(1.0));
  CHECK(gaussian().weight(2.0) == doctest::Approx(std::exp(-2.0)));
  const Potential half({-1.0}, {}, IntervalSet({{-kInf, 0.0}}), 1);
  CHECK(half.weight(1.0) == 0.0);
  CHECK(half.log_weight(1.0) == -kInf);
  CHECK(half.weight(-3.0) == doctest::Approx(std::exp(-3.0)));
}

TEST_CASE("weight matches exp(-nV) and stays real with a complex pair") {
  const std::int64_t n = 5;
  const Potential p({0.3, 1.0}, {{cplx(0.5, 0.8), 0.7, {cplx(0.2, -0.1)}}}, IntervalSet::real_line(), n);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng);
    const cplx v = p.eval(cplx(x, 0.0));
    CHECK(std::abs(v.imag()) < 1e-12 * std::max(1.0, std::abs(v.real())));
    CHECK(p.weight(x) == doctest::Approx(std::exp(-double(n) * v.real())).epsilon(1e-12));
  }
}

TEST_CASE("derivative agrees with central differences") {
  const Potential p({0.3, 1.0, -0.2, 0.5}, {{cplx(0.5, 0.8), 0.7, {cplx(0.2, -0.1), cplx(0.05, 0.02)}}},
                    IntervalSet::real_line(), 4);
  for (double x : {-1.7, -0.3, 0.4, 1.1, 2.5}) {
    const double h = 1e-5;
    const double fd = (p.eval_real(x + h) - p.eval_real(x - h)) / (2 * h);
    CHECK(p.eval_real(x, PotentialPart::full, 1) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("validate: growth") {
  CHECK(validate(gaussian()).ok());
  const Potential odd({0.0, 0.0, 1.0}, {}, IntervalSet::real_line(), 1);
  CHECK_FALSE(check_passed(validate(odd), "growth"));
  const Potential linear_half({-1.0}, {}, IntervalSet({{-kInf, 0.0}}), 1);
  CHECK(validate(linear_half).ok());
  const Potential wrong_way({1.0}, {}, IntervalSet({{-kInf, 0.0}}), 1);
  CHECK_FALSE(validate(wrong_way).ok());
}

TEST_CASE("validate: pole at the edge of the support follows integrability") {
  boost::math::quadrature::tanh_sinh<double> ts;
  const std::int64_t n = 2;
  // V_sing = -t/x with t = 1: w = e^{n/x} -> 0 as x -> 0-.
  const Potential good({-1.0}, {{cplx(0.0, 0.0), 0.0, {cplx(1.0, 0.0)}}}, IntervalSet({{-kInf, 0.0}}), n);
  CHECK(validate(good).ok());
  const double mass = ts.integrate([&](double x) { return good.weight(x); }, -1.0, 0.0);
  CHECK(std::isfinite(mass));
  CHECK(mass == doctest::Approx(ts.integrate([](double x) { return std::exp(2.0 * x + 2.0 / x); }, -1.0, 0.0)));

  // t = -1: w = e^{-n/x} blows up; the oracle integral over shrinking windows grows without bound.
  const Potential bad({-1.0}, {{cplx(0.0, 0.0), 0.0, {cplx(-1.0, 0.0)}}}, IntervalSet({{-kInf, 0.0}}), n);
  CHECK_FALSE(validate(bad).ok());
  double prev = 0.0;
  for (double eps : {0.1, 0.05, 0.025}) {
    const double m = ts.integrate([&](double x) { return std::exp(-double(n) * bad.eval_real(x)); }, -eps, -eps / 2);
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("canonical json round-trips and mirroring") {
  const Potential p({0.2, 1.0}, {{cplx(-1.0, 0.0), 0.5, {}}}, IntervalSet({{-kInf, 3.0}}), 9);
  const std::string text = p.to_json();
  CHECK(parse_potential(text).to_json() == text);
  const Potential m = p.mirrored();
  for (double x : {-2.0, -0.5, 0.7, 2.0}) CHECK(m.eval_real(-x) == doctest::Approx(p.eval_real(x)));
  CHECK(m.support()[0].lo == -3.0);
  CHECK(p.with_n(20).n() == 20);
}
