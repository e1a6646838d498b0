#ifndef PSIDO_OPERATORS_HPP
#define PSIDO_OPERATORS_HPP

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "psido/grid.hpp"
#include "psido/symbol.hpp"

namespace psido {

inline constexpr int kDefaultSizeCap = 4096;

/// Dense matrix of a discretized operator acting on sample vectors.
struct OperatorMatrix {
  Grid grid;
  Eigen::MatrixXcd entries;

  GridFunction apply(const GridFunction& f) const;
  OperatorMatrix transpose() const;
  /// Rows and columns of samples with |x| <= radius.
  Eigen::MatrixXcd interior_block(double radius) const;
};

/// Type-erased linear operator on grid functions; built from a matrix or
/// applied matrix-free from a symbol.
class GridOperator {
 public:
  GridOperator(Grid grid, std::function<GridFunction(const GridFunction&)> fn);
  GridOperator(const OperatorMatrix& m);  // NOLINT: implicit by design of the statistics API

  static GridOperator from_symbol(const Symbol& sym, const Grid& grid);

  const Grid& grid() const { return grid_; }
  GridFunction operator()(const GridFunction& f) const;

 private:
  Grid grid_;
  std::function<GridFunction(const GridFunction&)> fn_;
};

/// T_σ f(x_m) = Σ_k σ(x_m, ξ_k) f̂(k) e^{i ξ_k·x_m},
/// f̂(k) = n^{-d} Σ_m f(x_m) e^{-i ξ_k·x_m}; σ ≡ 1 reproduces f.
GridFunction apply(const Symbol& sym, const GridFunction& f);

/// Dense matrix of T_σ; column j equals apply(sym, e_j).
OperatorMatrix assemble(const Symbol& sym, const Grid& grid, int size_cap = kDefaultSizeCap);

OperatorMatrix multiplication_matrix(const ScalarFunction& a, const Grid& grid);

/// M(T_σ)·A - A·M(T_σ), A = diag(a(x_m)).
OperatorMatrix commutator_matrix(const Symbol& sym, const ScalarFunction& a, const Grid& grid,
                                 int size_cap = kDefaultSizeCap);

/// h^d Σ_m f(x_m) g(x_m); no conjugation.
Complex bilinear_pair(const GridFunction& f, const GridFunction& g);

/// Binary export: "PSIDOMAT" magic, u32 version, i32 d, i32 n, f64 L,
/// u64 rows, u64 cols, then rows*cols (re, im) f64 pairs, row-major,
/// little-endian host layout.
void write_matrix(std::ostream& os, const OperatorMatrix& m);
void write_matrix(const std::string& path, const OperatorMatrix& m);
OperatorMatrix read_matrix(std::istream& is);

}  // namespace psido

#endif  // PSIDO_OPERATORS_HPP
