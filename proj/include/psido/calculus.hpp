#ifndef PSIDO_CALCULUS_HPP
#define PSIDO_CALCULUS_HPP

#include <vector>

#include "psido/symbol.hpp"

namespace psido {

/// Truncated transpose symbol
///   σ*_N(x, ξ) = Σ_{|α|<N} i^{-|α|}/α! · ∂_x^α ∂_ξ^α [σ(x, -ξ)],
/// where ∂_ξ acts on the composite ξ ↦ σ(x, -ξ); in terms of the
/// derivatives of σ each term is i^{|α|}/α! · (∂_x^α ∂_ξ^α σ)(x, -ξ).
/// This is the transpose for the bilinear pairing ∫ f g (no conjugation).
/// Throws OrderExceeded for N < 1 or when the base cannot supply
/// derivatives of order 2(N-1) (unless it falls back to differences).
Symbol transpose_expansion(const Symbol& sym, int N);

/// Transpose-side symbol used for [T_σ, M_a]^t = -[T_{σ*}, M_a].
Symbol commutator_transpose_symbol(const Symbol& sym, int N);

/// Compactly supported window on phase space: u(x, ξ) = u_x(x) u_ξ(ξ).
struct PhaseWindow {
  Function x_part;
  Function xi_part;

  /// plateau(1,2) in both variables; u(0,0) = 1.
  static PhaseWindow standard(int dim);
};

/// σ_ε(x, ξ) = σ(x, ξ) u(εx, εξ); derivatives by the Leibniz rule.
Symbol truncate(const Symbol& sym, double epsilon, const PhaseWindow& window);

/// Σ_k c_k σ_k
Symbol linear_combination(const std::vector<std::pair<Complex, Symbol>>& terms);

/// Gauss-Legendre nodes and weights on [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre_unit(int n);

/// Order reduction σ = σ̃ + σ_0, σ_0(x, ξ) = Σ_j ξ_j σ_j(x, ξ), with
///   σ̃(x, ξ) = σ(x, 0) ψ(ξ),
///   σ_j(x, ξ) = ∫_0^1 ∂_{ξ_j} σ_0(x, tξ) dt.
struct OrderReduction {
  Symbol base;
  Symbol tilde_part;
  Symbol remainder;  // σ_0
  std::vector<Symbol> components;
  Function window;
  int quadrature_nodes = 0;

  /// Σ_j ξ_j σ_j(x, ξ)
  Complex reconstruct(const Point& x, const Point& xi) const;
};

/// Builds the order reduction. The σ-part of each σ_j is integrated by
/// Gauss-Legendre quadrature; the window part has the closed form
/// ∫_0^1 ∂_j ψ(tξ) dt = ξ_j (ψ(ξ) - 1)/|ξ|^2, which needs ψ radial, ψ(0)=1
/// and ψ ≡ 1 near the origin (flat_radius() > 0).
OrderReduction order_reduce(const Symbol& sym, Function window, int quadrature_nodes);

/// Result of a node-doubling check on one component value.
struct QuadratureCheck {
  Complex value;
  Complex doubled;
  double relative_change = 0.0;
  bool converged = false;
};

/// Compares component j at (x, ξ) with n and 2n nodes; converged when the
/// relative change is <= tolerance.
QuadratureCheck check_component_convergence(const OrderReduction& red, int j, const Point& x, const Point& xi,
                                            double tolerance = 1e-8);

/// As check_component_convergence but throws QuadratureNonConvergence.
Complex component_checked(const OrderReduction& red, int j, const Point& x, const Point& xi,
                          double tolerance = 1e-8);

}  // namespace psido

#endif  // PSIDO_CALCULUS_HPP
