#ifndef PSIDO_SYMBOL_HPP
#define PSIDO_SYMBOL_HPP

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "psido/multi_index.hpp"
#include "psido/scalar_function.hpp"

namespace psido {

using Complex = std::complex<double>;

enum class DerivMode { analytic, finite_difference };

/// Implementation side of a symbol σ(x, ξ). Families only ever receive
/// derivative requests with |α| + |β| <= max_analytic_order().
class SymbolFamily {
 public:
  virtual ~SymbolFamily() = default;

  virtual int dimension() const = 0;
  /// Declared order s of the symbol class.
  virtual double order() const = 0;
  virtual int max_analytic_order() const = 0;
  virtual std::string describe() const = 0;

  /// ∂_x^α ∂_ξ^β σ(x, ξ)
  virtual Complex derivative(const Point& x, const Point& xi, const MultiIndex& alpha,
                             const MultiIndex& beta) const = 0;
};

/// Immutable, shareable handle to a symbol family. Evaluation is pure.
///
/// With DerivMode::finite_difference, requests above the analytic order
/// are served by central differences of lower derivatives (step 1e-4 in
/// x, 1e-4·(1+|ξ|) in ξ); with DerivMode::analytic they throw
/// OrderExceeded.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::shared_ptr<const SymbolFamily> family, DerivMode mode = DerivMode::analytic);

  int dimension() const { return family_->dimension(); }
  double order() const { return family_->order(); }
  int max_analytic_order() const { return family_->max_analytic_order(); }
  DerivMode deriv_mode() const { return mode_; }
  std::string describe() const { return family_->describe(); }
  const SymbolFamily& family() const { return *family_; }

  Symbol with_mode(DerivMode mode) const { return Symbol(family_, mode); }

  Complex eval(const Point& x, const Point& xi) const;
  Complex eval(const Point& x, const Point& xi, const MultiIndex& alpha, const MultiIndex& beta) const;

  MultiIndex zero_index() const { return MultiIndex(dimension()); }

 private:
  Complex finite_difference(const Point& x, const Point& xi, const MultiIndex& alpha, const MultiIndex& beta) const;

  std::shared_ptr<const SymbolFamily> family_;
  DerivMode mode_ = DerivMode::analytic;
};

namespace symbols {

/// σ ≡ c
Symbol constant(int dim, Complex c);

/// σ(x, ξ) = m(x) ψ(ξ). `order` is the declared class order (any s <= 0
/// is accepted for compactly supported ψ).
Symbol separable(Function m, Function psi, double order = 0.0);

/// Family m_j of x-coefficients for an elementary symbol.
struct ElementaryCoefficients {
  std::vector<Function> m;  // m_0 .. m_{J_max}

  /// m_j = 2^{-j·decay} · base
  static ElementaryCoefficients geometric(Function base, double decay, int j_max);
};

/// σ(x, ξ) = Σ_{j=0}^{J_max} m_j(x) 2^{j s'} ψ(2^{-j} ξ) with ψ supported in
/// {1/2 < |ξ| < 2}. s' = -1 gives the classical 2^{-j} weighting.
/// Throws InvalidSupport if ψ does not declare an annulus support.
Symbol elementary(ElementaryCoefficients coeffs, Function psi, double order_shift);

/// Indices j whose dyadic annulus can contain ξ (at most three).
std::vector<int> active_dyadic_indices(double xi_norm, int j_max);

}  // namespace symbols

}  // namespace psido

#endif  // PSIDO_SYMBOL_HPP
