#include <doctest.h>

#include <cmath>

#include "psido/scalar_function.hpp"
#include "psido/taylor.hpp"

using namespace psido;

TEST_CASE("exp jet reproduces all derivatives") {
  const Taylor x = Taylor::variable(1, 6, 0, 0.3);
  const Taylor e = exp(x * 2.0);
  for (int k = 0; k <= 6; ++k)
    CHECK(e.derivative(MultiIndex(1, {k, 0})) == doctest::Approx(std::pow(2.0, k) * std::exp(0.6)).epsilon(1e-13));
}

TEST_CASE("reciprocal and log jets") {
  const Taylor x = Taylor::variable(1, 4, 0, 2.0);
  const Taylor r = reciprocal(x);
  CHECK(r.derivative(MultiIndex(1, {3, 0})) == doctest::Approx(-6.0 / 16.0));
  const Taylor l = log(x);
  CHECK(l.derivative(MultiIndex(1, {2, 0})) == doctest::Approx(-0.25));
}

TEST_CASE("tanh jet matches closed-form derivatives") {
  const double t = 0.7;
  const Taylor y = tanh(Taylor::variable(1, 3, 0, t));
  const double th = std::tanh(t);
  const double s2 = 1.0 - th * th;
  CHECK(y.derivative(MultiIndex(1, {1, 0})) == doctest::Approx(s2).epsilon(1e-14));
  CHECK(y.derivative(MultiIndex(1, {2, 0})) == doctest::Approx(-2.0 * th * s2).epsilon(1e-13));
}

TEST_CASE("two-variable product has the mixed partial") {
  const Taylor x = Taylor::variable(2, 3, 0, 1.5);
  const Taylor y = Taylor::variable(2, 3, 1, -0.5);
  const Taylor p = x * x * y;
  CHECK(p.derivative(MultiIndex(2, {2, 1})) == doctest::Approx(2.0));
  CHECK(p.derivative(MultiIndex(2, {1, 1})) == doctest::Approx(3.0));
}

TEST_CASE("mixed partials commute for built-in functions") {
  const Function f = functions::product(functions::gaussian(2, 1.3), functions::tanh_ramp(2, 0.8));
  const Point p{0.4, -0.2};
  const double a = functions::partial(functions::partial(f, 0), 1)->value(p);
  const double b = functions::partial(functions::partial(f, 1), 0)->value(p);
  const double c = f->derivative(p, MultiIndex(2, {1, 1}));
  CHECK(std::abs(a - b) <= 1e-12 * std::abs(c));
  CHECK(std::abs(a - c) <= 1e-12 * std::abs(c));
}

TEST_CASE("bump vanishes outside its radius and plateau is flat") {
  const Function b = functions::bump(1, 2.0);
  CHECK(b->value({2.0, 0.0}) == 0.0);
  CHECK(b->value({1.0, 0.0}) > 0.0);
  const Function pl = functions::plateau(1);
  CHECK(pl->value({0.5, 0.0}) == 1.0);
  CHECK(pl->value({2.5, 0.0}) == 0.0);
  CHECK(pl->derivative({0.5, 0.0}, MultiIndex(1, {1, 0})) == 0.0);
}

TEST_CASE("annulus support") {
  const Function a = functions::annulus(1);
  CHECK(a->value({0.5, 0.0}) == 0.0);
  CHECK(a->value({2.0, 0.0}) == 0.0);
  CHECK(a->value({1.0, 0.0}) == doctest::Approx(std::exp(-1.0)));
  REQUIRE(a->radial_support());
  CHECK(a->radial_support()->inner == 0.5);
}
