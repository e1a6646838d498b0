#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "psido/calculus.hpp"
#include "psido/diagnostics.hpp"
#include "psido/errors.hpp"
#include "psido/operators.hpp"

using namespace psido;

namespace {
const double kPi = std::numbers::pi;

Symbol elementary_v0() {
  return symbols::elementary(symbols::ElementaryCoefficients::geometric(functions::rational_decay(1), 0.5, 3),
                             functions::annulus(1), 0.0);
}

GridFunction random_function(const Grid& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Eigen::VectorXcd v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = Complex(n(rng), n(rng));
  return GridFunction(grid, v);
}

double max_abs(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("identity symbol reproduces the input") {
  const Grid grid(1, 64, 4.0);
  const GridFunction f = random_function(grid, 1);
  const GridFunction g = apply(symbols::constant(1, 1.0), f);
  CHECK(max_abs(g.values() - f.values()) <= 1e-13);
  const OperatorMatrix m = assemble(symbols::constant(1, 1.0), grid);
  CHECK(spectral_norm(m.entries - Eigen::MatrixXcd::Identity(64, 64)) <= 1e-13);
}

TEST_CASE("apply is linear") {
  const Grid grid(1, 64, kPi);
  const Symbol s = elementary_v0();
  const GridFunction f = random_function(grid, 2);
  const GridFunction g = random_function(grid, 3);
  const Complex a(0.3, -1.2), b(2.0, 0.5);
  const GridFunction lhs = apply(s, GridFunction(grid, a * f.values() + b * g.values()));
  const Eigen::VectorXcd rhs = a * apply(s, f).values() + b * apply(s, g).values();
  CHECK(max_abs(lhs.values() - rhs) <= 1e-12 * max_abs(rhs));
}

TEST_CASE("apply and assemble agree") {
  const Grid grid(1, 128, 2 * kPi);
  const Symbol s = elementary_v0();
  const OperatorMatrix m = assemble(s, grid);
  for (unsigned seed : {4u, 5u, 6u}) {
    const GridFunction f = random_function(grid, seed);
    const Eigen::VectorXcd a = apply(s, f).values();
    const Eigen::VectorXcd b = m.entries * f.values();
    CHECK((a - b).norm() <= 1e-12 * b.norm());
  }
  CHECK(max_abs(m.apply(random_function(grid, 7)).values() - apply(s, random_function(grid, 7)).values()) <=
        1e-12 * m.entries.norm());
}

TEST_CASE("Fourier modes are eigenfunctions of multipliers") {
  const Grid grid(1, 64, kPi);
  const Function psi = functions::japanese_bracket(1, 1.0);
  const Symbol s = symbols::separable(functions::constant(1, 1.0), psi);
  for (int k : {0, 3, 17, 40}) {
    const GridFunction e = GridFunction::fourier_mode(grid, k);
    const GridFunction t = apply(s, e);
    const double lambda = psi->value(grid.frequency(k));
    CHECK(max_abs(t.values() - lambda * e.values()) <= 1e-12 * lambda);
  }
}

TEST_CASE("x-only symbols act by multiplication") {
  const Grid grid(1, 64, kPi);
  const Function m = functions::tanh_ramp(1);
  const Symbol s = symbols::separable(m, functions::constant(1, 1.0));
  const GridFunction f = random_function(grid, 8);
  const GridFunction t = apply(s, f);
  for (int i = 0; i < grid.size(); ++i) CHECK(std::abs(t[i] - m->value(grid.point(i)) * f[i]) <= 1e-13);
}

TEST_CASE("multiplier singular values are the sampled symbol") {
  const Grid grid(1, 64, kPi);
  const Function psi = functions::japanese_bracket(1, -1.0);
  const SpectrumReport r = svd_tail(assemble(symbols::separable(functions::constant(1, 1.0), psi), grid));
  std::vector<double> expected;
  for (int k = 0; k < grid.size(); ++k) expected.push_back(std::abs(psi->value(grid.frequency(k))));
  std::sort(expected.rbegin(), expected.rend());
  for (int k = 0; k < grid.size(); ++k) CHECK(std::abs(r.singular_values[k] - expected[k]) <= 1e-12);
}

TEST_CASE("multiplication and commutator matrices") {
  const Grid grid(1, 64, kPi);
  const Function a = functions::tanh_ramp(1);
  const OperatorMatrix m = multiplication_matrix(*a, grid);
  CHECK(m.entries.isDiagonal());
  CHECK(m.entries(5, 5).real() == a->value(grid.point(5)));

  const Symbol s = elementary_v0();
  CHECK(commutator_matrix(s, *functions::constant(1, 2.5), grid).entries.cwiseAbs().maxCoeff() == 0.0);
  const Symbol xonly = symbols::separable(functions::gaussian(1), functions::constant(1, 1.0));
  CHECK(commutator_matrix(xonly, *a, grid).entries.cwiseAbs().maxCoeff() <= 1e-15);

  const OperatorMatrix t = assemble(s, grid);
  const Eigen::MatrixXcd two_path = t.entries * m.entries - m.entries * t.entries;
  const OperatorMatrix c = commutator_matrix(s, *a, grid);
  CHECK((c.entries - two_path).cwiseAbs().maxCoeff() <= 1e-13 * t.entries.cwiseAbs().maxCoeff());
}

TEST_CASE("bilinear pairing") {
  const Grid grid(1, 32, 3.0);
  const GridFunction one = GridFunction::sample(grid, *functions::constant(1, 1.0));
  CHECK(bilinear_pair(one, one).real() == doctest::Approx(6.0).epsilon(1e-14));
  for (int k : {1, 5, 20})
    for (int m : {1, 5, 20}) {
      const Complex p = bilinear_pair(GridFunction::fourier_mode(grid, k), GridFunction::fourier_mode(grid, m));
      auto kk = grid.frequency_index(k)[0], mm = grid.frequency_index(m)[0];
      if (kk + mm == 0 || std::abs(kk + mm) == grid.points_per_dim())
        CHECK(std::abs(p - 6.0) <= 1e-13);
      else
        CHECK(std::abs(p) <= 1e-13);
    }
  const Grid g2(1, 64, kPi);
  const OperatorMatrix t = assemble(elementary_v0(), g2);
  const GridFunction f = random_function(g2, 9), g = random_function(g2, 10);
  CHECK(std::abs(bilinear_pair(t.apply(f), g) - bilinear_pair(f, t.transpose().apply(g))) <= 1e-12);
}

TEST_CASE("operator errors") {
  const Grid grid(1, 128, kPi);
  CHECK_THROWS_AS(assemble(elementary_v0(), grid, 64), SizeCapExceeded);
  CHECK_THROWS_AS(Grid(1, 63, kPi), std::invalid_argument);
  const Grid other(1, 64, kPi);
  const GridFunction f = random_function(other, 11);
  CHECK_THROWS_AS(bilinear_pair(f, random_function(grid, 12)), GridMismatch);
  CHECK_THROWS_AS(assemble(elementary_v0(), grid).apply(f), GridMismatch);
  CHECK_THROWS_AS(apply(symbols::constant(2, 1.0), f), GridMismatch);
}

TEST_CASE("binary matrix round trip") {
  const Grid grid(1, 32, kPi);
  const OperatorMatrix m = assemble(elementary_v0(), grid);
  std::stringstream ss;
  write_matrix(ss, m);
  const OperatorMatrix r = read_matrix(ss);
  CHECK(r.grid == grid);
  CHECK(r.entries == m.entries);
  std::stringstream bad("NOTAMATRIX");
  CHECK_THROWS(read_matrix(bad));
}

TEST_CASE("transpose residual shrinks with the expansion order") {
  const Grid grid(1, 256, 16 * kPi);
  const Symbol s = symbols::elementary(
      symbols::ElementaryCoefficients::geometric(functions::rational_decay(1, 64), 0.5, 5), functions::annulus(1), 0.0);
  double prev = 1e300;
  for (int N : {1, 2, 3, 4}) {
    const double r = transpose_residual(s, N, grid).interior;
    CHECK(r <= prev + 1e-13);
    prev = r;
  }
}

TEST_CASE("multiplier transpose is exact") {
  const Grid grid(1, 128, 4 * kPi);
  const Symbol s = symbols::separable(functions::constant(1, 1.0), functions::plateau(1));
  for (int N : {1, 2, 3}) CHECK(transpose_residual(s, N, grid).full <= 1e-10);
}

TEST_CASE("two-dimensional apply and assemble agree") {
  const Grid grid(2, 12, kPi);
  const Symbol s = symbols::separable(functions::gaussian(2), functions::japanese_bracket(2, -1.0));
  const OperatorMatrix m = assemble(s, grid);
  const GridFunction f = random_function(grid, 13);
  const Eigen::VectorXcd b = m.entries * f.values();
  CHECK((apply(s, f).values() - b).norm() <= 1e-12 * b.norm());
  const GridFunction one = GridFunction::sample(grid, *functions::constant(2, 1.0));
  CHECK(max_abs(apply(symbols::constant(2, 1.0), one).values() - one.values()) <= 1e-13);
}
