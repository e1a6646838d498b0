#ifndef PSIDO_SYMBOL_CLASS_HPP
#define PSIDO_SYMBOL_CLASS_HPP

#include <cstdint>
#include <vector>

#include "psido/symbol.hpp"

namespace psido {

/// Empirical shell suprema of |∂_x^α ∂_ξ^β σ|·(1+|ξ|)^{|β|-s}.
///
/// Shell i covers ρ_i <= |x|+|ξ| < ρ_{i+1}, so a list of m radii yields
/// m-1 shells; `shell_radii` holds the inner radius of each shell.
/// Sampling cannot certify class membership, only falsify it.
struct ClassEstimate {
  MultiIndex alpha;
  MultiIndex beta;
  double order = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> shell_radii;
  std::vector<double> shell_sups;
  std::vector<int> sample_counts;
};

ClassEstimate class_shell_estimate(const Symbol& sym, const MultiIndex& alpha, const MultiIndex& beta, double s,
                                   const std::vector<double>& shells, int samples_per_shell,
                                   std::uint64_t seed = 0);

/// (Id - Δ_x)^N (Id - Δ_ξ)^N σ(x, ξ), expanded into mixed partials.
Complex cordes_stat(const Symbol& sym, int N, const Point& x, const Point& xi);

/// |analytic - nested central difference| of ∂_x^α ∂_ξ^β σ. The x-step
/// is h and the ξ-step h·(1+|ξ|); only values of σ enter the stencil.
double fd_check(const Symbol& sym, const Point& x, const Point& xi, const MultiIndex& alpha, const MultiIndex& beta,
                double h);

/// RHS - LHS of (1+|z|)^{s-k} <= (1+|ξ|)^{s-k} (1+|z-ξ|)^{|s|+k}.
double peetre_margin(const Point& z, const Point& xi, double s, double k);

/// Deterministic low-discrepancy point in [0,1)^dims (Halton, prime bases).
std::vector<double> halton_point(std::uint64_t index, int dims);

}  // namespace psido

#endif  // PSIDO_SYMBOL_CLASS_HPP
