#include "psido/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "psido/errors.hpp"

namespace psido {

Grid::Grid(int dim, int n, double half_length) : dim_(dim), n_(n), L_(half_length) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("grid points_per_dim must be even and >= 2, got " + std::to_string(n));
  if (!(half_length > 0.0) || !std::isfinite(half_length)) throw std::invalid_argument("grid half_length must be positive");
  size_ = dim == 1 ? n : n * n;
}

Point Grid::point(int flat) const {
  const double h = spacing();
  if (dim_ == 1) return {-L_ + flat * h, 0.0};
  return {-L_ + (flat / n_) * h, -L_ + (flat % n_) * h};
}

std::array<int, kMaxDim> Grid::frequency_index(int flat) const {
  if (dim_ == 1) return {flat - n_ / 2, 0};
  return {flat / n_ - n_ / 2, flat % n_ - n_ / 2};
}

Point Grid::frequency(int flat) const {
  const auto k = frequency_index(flat);
  const double s = std::numbers::pi / L_;
  return {s * k[0], s * k[1]};
}

int Grid::frequency_flat(std::array<int, kMaxDim> k) const {
  auto wrap = [this](int v) { return ((v + n_ / 2) % n_ + n_) % n_; };
  if (dim_ == 1) return wrap(k[0]);
  return wrap(k[0]) * n_ + wrap(k[1]);
}

std::vector<int> Grid::indices_within(double radius) const {
  std::vector<int> out;
  for (int m = 0; m < size_; ++m)
    if (norm(point(m)) <= radius) out.push_back(m);
  return out;
}

GridFunction::GridFunction(Grid grid, Eigen::VectorXcd values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw GridMismatch("grid function length " + std::to_string(values_.size()) + " does not match grid size " +
                       std::to_string(grid_.size()));
}

GridFunction::GridFunction(Grid grid) : grid_(grid), values_(Eigen::VectorXcd::Zero(grid.size())) {}

GridFunction GridFunction::sample(const Grid& grid, const std::function<Complex(const Point&)>& f) {
  Eigen::VectorXcd v(grid.size());
  for (int m = 0; m < grid.size(); ++m) v[m] = f(grid.point(m));
  return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::sample(const Grid& grid, const ScalarFunction& f) {
  if (f.dimension() != grid.dimension()) throw GridMismatch("function dimension does not match grid");
  Eigen::VectorXcd v(grid.size());
  for (int m = 0; m < grid.size(); ++m) v[m] = f.value(grid.point(m));
  return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::fourier_mode(const Grid& grid, int k) {
  const Point xi = grid.frequency(k);
  return sample(grid, [&](const Point& x) { return std::exp(Complex(0.0, xi[0] * x[0] + xi[1] * x[1])); });
}

double GridFunction::l2_norm() const {
  return std::pow(grid_.spacing(), 0.5 * grid_.dimension()) * values_.norm();
}

}  // namespace psido
