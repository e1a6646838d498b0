#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "psido/scalar_function.hpp"
#include "psido/symbol.hpp"
#include "psido/symbol_class.hpp"

using namespace psido;

namespace {
MultiIndex mi(int a) { return MultiIndex(1, {a, 0}); }

/// True shell suprema of |σ(x,ξ)| on a fine (x, ξ) grid in d = 1.
std::vector<double> dense_shell_sups(const Symbol& s, const std::vector<double>& shells) {
  std::vector<double> out(shells.size() - 1, 0.0);
  const int n = 1200;
  const double top = shells.back();
  for (int i = 0; i <= n; ++i) {
    for (int k = 0; k <= n; ++k) {
      const double x = top * i / n;
      const double xi = top * k / n;
      const double r = x + xi;
      for (std::size_t q = 0; q + 1 < shells.size(); ++q)
        if (r >= shells[q] && r < shells[q + 1]) out[q] = std::max(out[q], std::abs(s.eval({x, 0}, {xi, 0})));
    }
  }
  return out;
}
}  // namespace

TEST_CASE("Peetre margin examples") {
  CHECK(peetre_margin({3.0, 0}, {1.0, 0}, 0.0, 2.0) == doctest::Approx(2.1875).epsilon(1e-15));
  CHECK(peetre_margin({2.5, 0}, {2.5, 0}, 1.0, 3.0) == 0.0);
  CHECK(peetre_margin({0.0, 0}, {4.0, 0}, -2.0, 1.0) >= 0.0);
  CHECK_THROWS(peetre_margin({0.0, 0}, {1.0, 0}, 0.0, -0.5));
}

TEST_CASE("Peetre margin is non-negative on quasi-random samples") {
  double worst = 1.0;
  for (int i = 0; i < 10000; ++i) {
    const auto u = halton_point(static_cast<std::uint64_t>(i + 1), 6);
    const Point z{10 * (2 * u[0] - 1), 10 * (2 * u[1] - 1)};
    const Point xi{10 * (2 * u[2] - 1), 10 * (2 * u[3] - 1)};
    worst = std::min(worst, peetre_margin(z, xi, 5 * (2 * u[5] - 1), 10 * u[4]));
  }
  CHECK(worst >= 0.0);
}

TEST_CASE("Cordes statistic examples") {
  const Symbol one = symbols::constant(1, 1.0);
  for (int N : {1, 2, 3}) CHECK(cordes_stat(one, N, {0.2, 0}, {1.0, 0}) == Complex(1.0));

  const Function m = functions::gaussian(1);
  const Function psi = functions::plateau(1);
  const Symbol s = symbols::separable(m, psi);
  CHECK(std::abs(cordes_stat(s, 1, {0.0, 0}, {0.0, 0}) - 3.0) <= 1e-13);

  const Function g = functions::rational_decay(1);
  const Function h = functions::gaussian(1, 0.7);
  const Symbol t = symbols::separable(g, h);
  const Point x{0.4, 0}, xi{0.9, 0};
  const double expected =
      (g->value(x) - g->derivative(x, mi(2))) * (h->value(xi) - h->derivative(xi, mi(2)));
  CHECK(std::abs(cordes_stat(t, 1, x, xi) - expected) <= 1e-13);
}

TEST_CASE("finite-difference check") {
  const Symbol one = symbols::constant(1, 1.0);
  CHECK(fd_check(one, {0.3, 0}, {1.0, 0}, mi(1), mi(1), 1e-3) <= 1e-12);
  const Symbol s = symbols::separable(functions::rational_decay(1), functions::gaussian(1));
  CHECK(fd_check(s, {0.3, 0}, {1.0, 0}, mi(0), mi(0), 1e-3) == 0.0);
  for (auto [a, b] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}, std::pair{2, 1}}) {
    const double r1 = fd_check(s, {0.3, 0}, {0.6, 0}, mi(a), mi(b), 1e-2);
    const double r2 = fd_check(s, {0.3, 0}, {0.6, 0}, mi(a), mi(b), 5e-3);
    CHECK(r2 <= 0.3 * r1);
  }
}

TEST_CASE("fd step halving for every built-in family") {
  const std::vector<Function> fs = {functions::rational_decay(1), functions::gaussian(1), functions::tanh_ramp(1),
                                    functions::japanese_bracket(1, 1.0), functions::plateau(1),
                                    functions::annulus(1), functions::bump(1, 2.0), functions::odd_bump(1, 2.0)};
  for (const auto& f : fs) {
    const Symbol s = symbols::separable(functions::constant(1, 1.0), f);
    const double r1 = fd_check(s, {0, 0}, {1.3, 0}, mi(0), mi(1), 1e-2);
    const double r2 = fd_check(s, {0, 0}, {1.3, 0}, mi(0), mi(1), 5e-3);
    CAPTURE(f->describe());
    CHECK(r2 <= 0.3 * r1);
  }
}

TEST_CASE("class estimate of the constant symbol is one on every shell") {
  const ClassEstimate e =
      class_shell_estimate(symbols::constant(1, 1.0), mi(0), mi(0), 0.0, {0, 1, 2, 4, 8}, 32, 0);
  REQUIRE(e.shell_sups.size() == 4);
  CHECK(e.shell_radii.size() == 4);
  for (double v : e.shell_sups) CHECK(v == doctest::Approx(1.0));
  for (int c : e.sample_counts) CHECK(c == 32);
}

TEST_CASE("class estimate of a decaying separable symbol against dense shell suprema") {
  const Symbol s = symbols::separable(functions::rational_decay(1), functions::plateau(1));
  const std::vector<double> shells{0, 2, 4, 8, 16, 32};
  const ClassEstimate e = class_shell_estimate(s, mi(0), mi(0), 0.0, shells, 512, 0);
  const std::vector<double> truth = dense_shell_sups(s, shells);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(e.shell_sups[i] <= truth[i] * (1 + 1e-12));
    CHECK(e.shell_sups[i] >= 0.9 * truth[i]);
  }
  for (std::size_t i = 1; i < e.shell_sups.size(); ++i) CHECK(e.shell_sups[i] < e.shell_sups[i - 1]);
}

TEST_CASE("elementary symbol with dyadic 2^{-j} weights decays over shells") {
  const Symbol s = symbols::elementary(
      symbols::ElementaryCoefficients::geometric(functions::rational_decay(1), 0.0, 16), functions::annulus(1), -1.0);
  for (auto [a, b] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{0, 1}}) {
    const ClassEstimate e = class_shell_estimate(s, mi(a), mi(b), 0.0, {1, 4, 16, 64, 256, 1024}, 256, 3);
    CHECK(e.shell_sups.back() < 0.1 * e.shell_sups.front());
  }
}

TEST_CASE("class estimate is deterministic in the seed") {
  const Symbol s = symbols::separable(functions::rational_decay(1), functions::gaussian(1));
  const auto a = class_shell_estimate(s, mi(1), mi(1), 0.0, {0, 1, 3, 9}, 64, 42);
  const auto b = class_shell_estimate(s, mi(1), mi(1), 0.0, {0, 1, 3, 9}, 64, 42);
  CHECK(a.shell_sups == b.shell_sups);
  CHECK_THROWS(class_shell_estimate(s, mi(0), mi(0), 0.0, {0, 1}, 8, 0));
}
