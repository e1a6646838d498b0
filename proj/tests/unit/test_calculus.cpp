#include <doctest.h>

#include <cmath>
#include <numbers>

#include "psido/calculus.hpp"
#include "psido/diagnostics.hpp"
#include "psido/errors.hpp"
#include "psido/operators.hpp"
#include "psido/symbol_class.hpp"

using namespace psido;

namespace {
MultiIndex mi(int a) { return MultiIndex(1, {a, 0}); }
const Complex I(0.0, 1.0);

Symbol x_times_gaussian() { return symbols::separable(functions::coordinate(1, 0), functions::gaussian(1)); }

Symbol elementary_v0() {
  return symbols::elementary(symbols::ElementaryCoefficients::geometric(functions::rational_decay(1), 0.5, 8),
                             functions::annulus(1), 0.0);
}
}  // namespace

TEST_CASE("N = 1 expansion is the reflection") {
  const Symbol s = elementary_v0();
  const Symbol t = transpose_expansion(s, 1);
  for (double x : {-1.0, 0.5})
    for (double xi : {-3.0, 0.7, 2.5}) CHECK(t.eval({x, 0}, {xi, 0}) == s.eval({x, 0}, {-xi, 0}));
}

TEST_CASE("multiplier expansion is the reflection for every N") {
  const Function psi = functions::japanese_bracket(1, -1.0);
  const Symbol s = symbols::separable(functions::constant(1, 1.0), psi);
  for (int N : {1, 2, 3, 4}) {
    const Symbol t = transpose_expansion(s, N);
    for (double xi : {-2.0, 0.3, 5.0}) CHECK(std::abs(t.eval({0.7, 0}, {xi, 0}) - psi->value({-xi, 0})) <= 1e-15);
  }
  const Symbol c = commutator_transpose_symbol(s, 2);
  CHECK(std::abs(c.eval({0.7, 0}, {1.5, 0}) - psi->value({-1.5, 0})) <= 1e-15);
}

TEST_CASE("x psi expansion terminates at N = 2") {
  const Symbol s = x_times_gaussian();
  const Function g = functions::gaussian(1);
  const Symbol t2 = transpose_expansion(s, 2);
  const Symbol t3 = transpose_expansion(s, 3);
  for (double x : {-2.0, 0.0, 1.3}) {
    for (double xi : {-1.1, 0.0, 0.4, 2.0}) {
      const Point X{x, 0}, Xi{xi, 0};
      CHECK(t2.eval(X, Xi) == t3.eval(X, Xi));
      const Complex closed = x * g->value({-xi, 0}) + I * g->derivative({-xi, 0}, mi(1));
      CHECK(std::abs(t2.eval(X, Xi) - closed) <= 1e-15);
    }
  }
}

TEST_CASE("leading-order involution") {
  const Symbol s = elementary_v0();
  const Symbol tt = transpose_expansion(transpose_expansion(s, 1), 1);
  for (double xi : {-2.2, 0.9, 3.1}) CHECK(tt.eval({0.3, 0}, {xi, 0}) == s.eval({0.3, 0}, {xi, 0}));
  CHECK(tt.eval({0.3, 0}, {0.9, 0}, mi(1), mi(2)) == s.eval({0.3, 0}, {0.9, 0}, mi(1), mi(2)));
}

TEST_CASE("expansion order limits") {
  const Symbol s = x_times_gaussian();
  CHECK_THROWS_AS(transpose_expansion(s, 0), OrderExceeded);
  CHECK_THROWS_AS(transpose_expansion(s, 12), OrderExceeded);
  CHECK_NOTHROW(transpose_expansion(s.with_mode(DerivMode::finite_difference), 12));
}

TEST_CASE("truncation") {
  const PhaseWindow w = PhaseWindow::standard(1);
  const Symbol one = symbols::constant(1, 1.0);
  const double eps = 0.25;
  const Symbol t = truncate(one, eps, w);
  for (double x : {0.0, 3.0, 7.0}) {
    for (double xi : {0.0, 5.0, 9.0}) {
      const double u = w.x_part->value({eps * x, 0}) * w.xi_part->value({eps * xi, 0});
      CHECK(std::abs(t.eval({x, 0}, {xi, 0}) - u) <= 1e-15);
    }
  }
  CHECK(t.eval({8.0, 0}, {0.0, 0}) == Complex(0.0));
  CHECK(t.eval({0.0, 0}, {8.5, 0}) == Complex(0.0));

  const Symbol s = elementary_v0();
  double prev = 1e9;
  for (double e : {0.5, 0.25, 0.125, 0.0625}) {
    const double d = std::abs(truncate(s, e, w).eval({3.0, 0}, {5.0, 0}) - s.eval({3.0, 0}, {5.0, 0}));
    CHECK(d <= prev);
    prev = d;
  }
  CHECK(prev <= 1e-15);
  CHECK_THROWS(truncate(s, 1.5, w));
}

TEST_CASE("truncation derivatives follow the Leibniz rule") {
  const PhaseWindow w = PhaseWindow::standard(1);
  const Symbol s = symbols::separable(functions::rational_decay(1), functions::gaussian(1));
  const Symbol t = truncate(s, 0.5, w);
  CHECK(fd_check(t, {1.5, 0}, {1.2, 0}, mi(1), mi(1), 1e-3) <= 1e-5);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const QuadratureRule q = gauss_legendre_unit(16);
  for (int p = 0; p < 32; ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) sum += q.weights[i] * std::pow(q.nodes[i], p);
    CHECK(sum == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
  }
}

TEST_CASE("order reduction: linear remainder gives g(x)") {
  const Function g = functions::rational_decay(1);
  const Symbol s = symbols::separable(g, functions::coordinate(1, 0));
  const OrderReduction r = order_reduce(s, functions::plateau(1), 16);
  for (double x : {-1.0, 0.4})
    for (double xi : {-3.0, 0.5, 2.5}) CHECK(std::abs(r.components[0].eval({x, 0}, {xi, 0}) - g->value({x, 0})) <= 1e-14);
}

TEST_CASE("order reduction: quadratic remainder gives xi") {
  const Function q = functions::product(functions::coordinate(1, 0), functions::coordinate(1, 0));
  const Symbol s = symbols::separable(functions::constant(1, 1.0), q);
  const OrderReduction r = order_reduce(s, functions::plateau(1), 16);
  for (double xi : {-3.0, 0.5, 2.5}) CHECK(std::abs(r.components[0].eval({0.0, 0}, {xi, 0}) - xi) <= 1e-13);
}

TEST_CASE("order reduction reconstruction at random points") {
  const Function m = functions::rational_decay(1);
  const Symbol s = symbols::separable(m, functions::japanese_bracket(1, 0.5));
  const OrderReduction r = order_reduce(s, functions::plateau(1), 64);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto u = halton_point(static_cast<std::uint64_t>(i + 1), 2);
    const Point x{8 * (2 * u[0] - 1), 0}, xi{8 * (2 * u[1] - 1), 0};
    worst = std::max(worst, std::abs(r.reconstruct(x, xi) - r.remainder.eval(x, xi)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("order reduction in two dimensions") {
  const Symbol s = symbols::separable(functions::gaussian(2), functions::japanese_bracket(2, 0.5));
  const OrderReduction r = order_reduce(s, functions::plateau(2), 64);
  REQUIRE(r.components.size() == 2);
  for (const Point xi : {Point{0.3, -0.2}, Point{2.5, 1.0}, Point{-4.0, 3.0}})
    CHECK(std::abs(r.reconstruct({0.5, 0.1}, xi) - r.remainder.eval({0.5, 0.1}, xi)) <= 1e-8);
}

TEST_CASE("tilde part matches sigma at xi = 0") {
  const Symbol s = symbols::separable(functions::rational_decay(1), functions::japanese_bracket(1, 1.0));
  const OrderReduction r = order_reduce(s, functions::plateau(1), 32);
  for (double x : {-2.0, 0.0, 3.0}) CHECK(r.tilde_part.eval({x, 0}, {0.0, 0}) == s.eval({x, 0}, {0.0, 0}));
}

TEST_CASE("order reduction validates the window") {
  const Symbol s = elementary_v0();
  CHECK_THROWS(order_reduce(s, functions::gaussian(1), 32));
  CHECK_THROWS(order_reduce(s, functions::plateau(1), 8));
}

TEST_CASE("quadrature convergence is flagged") {
  const Symbol s = symbols::separable(functions::rational_decay(1), functions::japanese_bracket(1, 0.5));
  const OrderReduction r = order_reduce(s, functions::plateau(1), 64);
  const QuadratureCheck q = check_component_convergence(r, 0, {0.3, 0}, {1.7, 0});
  CHECK(q.converged);
  CHECK_NOTHROW(component_checked(r, 0, {0.3, 0}, {1.7, 0}));
  const OrderReduction coarse = order_reduce(symbols::separable(functions::rational_decay(1), functions::gaussian(1, 0.05)),
                                             functions::plateau(1), 16);
  CHECK_THROWS_AS(component_checked(coarse, 0, {0.3, 0}, {3.0, 0}), QuadratureNonConvergence);
}

TEST_CASE("components inherit shell decay") {
  const Symbol s = symbols::separable(functions::rational_decay(1), functions::japanese_bracket(1, -1.0));
  const OrderReduction r = order_reduce(s, functions::plateau(1), 64);
  const ClassEstimate e = class_shell_estimate(r.components[0], mi(0), mi(0), 0.0, {0, 4, 16, 64}, 128, 1);
  CHECK(e.shell_sups.back() < 0.1 * e.shell_sups.front());
}

TEST_CASE("commutator transpose identity is exact when the expansion terminates") {
  const Grid grid(1, 256, 16 * std::numbers::pi);
  const Function a = functions::tanh_ramp(1, 4.0);
  const double interior = 0.5 * grid.half_length();
  auto residual = [&](const Symbol& s, int N) {
    const OperatorMatrix c = commutator_matrix(s, *a, grid);
    const OperatorMatrix ct = commutator_matrix(commutator_transpose_symbol(s, N), *a, grid);
    const OperatorMatrix diff{grid, Eigen::MatrixXcd(c.entries.transpose() + ct.entries)};
    return spectral_norm(diff.interior_block(interior)) / spectral_norm(c.interior_block(interior));
  };
  const Symbol multiplier = symbols::separable(functions::constant(1, 1.0), functions::annulus(1));
  CHECK(residual(multiplier, 1) <= 1e-10);
  const Symbol xpsi = x_times_gaussian();
  const double r1 = residual(xpsi, 1);
  const double r2 = residual(xpsi, 2);
  CHECK(r2 <= 1e-10);
  CHECK(r1 >= 10 * r2);
}
