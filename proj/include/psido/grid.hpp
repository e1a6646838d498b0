#ifndef PSIDO_GRID_HPP
#define PSIDO_GRID_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "psido/scalar_function.hpp"
#include "psido/symbol.hpp"

namespace psido {

/// Uniform grid on the torus [-L, L)^d with n points per dimension.
///
/// Samples x_m = -L + m h (h = 2L/n); frequencies ξ_k = (π/L) k for
/// k ∈ {-n/2, ..., n/2 - 1}. Multi-dimensional samples are flattened
/// row-major (the last axis varies fastest).
class Grid {
 public:
  Grid(int dim, int n, double half_length);

  int dimension() const { return dim_; }
  int points_per_dim() const { return n_; }
  double half_length() const { return L_; }
  double spacing() const { return 2.0 * L_ / n_; }
  /// n^d
  int size() const { return size_; }

  Point point(int flat) const;
  Point frequency(int flat) const;
  /// Integer frequency index k (per axis) of a flat frequency index.
  std::array<int, kMaxDim> frequency_index(int flat) const;
  /// Flat index of a per-axis integer frequency (wrapped into range).
  int frequency_flat(std::array<int, kMaxDim> k) const;

  /// Flat indices of samples with |x_m| <= radius.
  std::vector<int> indices_within(double radius) const;

  bool operator==(const Grid& o) const { return dim_ == o.dim_ && n_ == o.n_ && L_ == o.L_; }

 private:
  int dim_;
  int n_;
  double L_;
  int size_;
};

class GridFunction {
 public:
  GridFunction(Grid grid, Eigen::VectorXcd values);
  explicit GridFunction(Grid grid);

  static GridFunction sample(const Grid& grid, const std::function<Complex(const Point&)>& f);
  static GridFunction sample(const Grid& grid, const ScalarFunction& f);
  /// e^{i ξ_k · x} for the flat frequency index k.
  static GridFunction fourier_mode(const Grid& grid, int k);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }
  Complex operator[](int m) const { return values_[m]; }

  /// h^{d/2} (Σ |f_m|^2)^{1/2}
  double l2_norm() const;

 private:
  Grid grid_;
  Eigen::VectorXcd values_;
};

}  // namespace psido

#endif  // PSIDO_GRID_HPP
