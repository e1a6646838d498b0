#include "psido/symbol.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "psido/errors.hpp"

namespace psido {

Symbol::Symbol(std::shared_ptr<const SymbolFamily> family, DerivMode mode)
    : family_(std::move(family)), mode_(mode) {
  if (!family_) throw std::invalid_argument("symbol family must not be null");
}

Complex Symbol::eval(const Point& x, const Point& xi) const {
  const MultiIndex zero(dimension());
  return family_->derivative(x, xi, zero, zero);
}

Complex Symbol::eval(const Point& x, const Point& xi, const MultiIndex& alpha, const MultiIndex& beta) const {
  if (alpha.order() + beta.order() <= family_->max_analytic_order())
    return family_->derivative(x, xi, alpha, beta);
  if (mode_ == DerivMode::analytic) {
    std::ostringstream os;
    os << "derivative order " << alpha.order() + beta.order() << " exceeds analytic order "
       << family_->max_analytic_order() << " of " << describe();
    throw OrderExceeded(os.str());
  }
  return finite_difference(x, xi, alpha, beta);
}

Complex Symbol::finite_difference(const Point& x, const Point& xi, const MultiIndex& alpha,
                                  const MultiIndex& beta) const {
  // Peel one derivative off the largest entry and difference the rest.
  int axis = 0;
  bool in_xi = beta.order() >= alpha.order();
  const MultiIndex& src = in_xi ? beta : alpha;
  for (int i = 1; i < dimension(); ++i)
    if (src[i] > src[axis]) axis = i;

  MultiIndex a = alpha;
  MultiIndex b = beta;
  Point xp = x, xm = x, kp = xi, km = xi;
  double h;
  if (in_xi) {
    b[axis] -= 1;
    h = 1e-4 * (1.0 + norm(xi));
    kp[axis] += h;
    km[axis] -= h;
  } else {
    a[axis] -= 1;
    h = 1e-4;
    xp[axis] += h;
    xm[axis] -= h;
  }
  return (eval(xp, kp, a, b) - eval(xm, km, a, b)) / (2.0 * h);
}

namespace {

class ConstantSymbol final : public SymbolFamily {
 public:
  ConstantSymbol(int dim, Complex c) : dim_(dim), c_(c) {}
  int dimension() const override { return dim_; }
  double order() const override { return 0.0; }
  int max_analytic_order() const override { return 1 << 20; }
  std::string describe() const override {
    std::ostringstream os;
    os << "constant(" << c_.real();
    if (c_.imag() != 0.0) os << (c_.imag() > 0 ? "+" : "") << c_.imag() << "i";
    os << ")";
    return os.str();
  }
  Complex derivative(const Point&, const Point&, const MultiIndex& a, const MultiIndex& b) const override {
    return (a.is_zero() && b.is_zero()) ? c_ : Complex(0.0);
  }

 private:
  int dim_;
  Complex c_;
};

class SeparableSymbol final : public SymbolFamily {
 public:
  SeparableSymbol(Function m, Function psi, double order) : m_(std::move(m)), psi_(std::move(psi)), order_(order) {
    if (m_->dimension() != psi_->dimension())
      throw std::invalid_argument("separable symbol factors must share a dimension");
  }
  int dimension() const override { return m_->dimension(); }
  double order() const override { return order_; }
  int max_analytic_order() const override { return ScalarFunction::kMaxJetOrder; }
  std::string describe() const override { return "separable[" + m_->describe() + " x " + psi_->describe() + "]"; }
  Complex derivative(const Point& x, const Point& xi, const MultiIndex& a, const MultiIndex& b) const override {
    const double p = psi_->derivative(xi, b);
    if (p == 0.0) return 0.0;
    return m_->derivative(x, a) * p;
  }

 private:
  Function m_;
  Function psi_;
  double order_;
};

class ElementarySymbol final : public SymbolFamily {
 public:
  ElementarySymbol(symbols::ElementaryCoefficients coeffs, Function psi, double order_shift)
      : coeffs_(std::move(coeffs)), psi_(std::move(psi)), shift_(order_shift) {
    if (coeffs_.m.empty()) throw std::invalid_argument("elementary symbol needs at least one coefficient");
    const auto support = psi_->radial_support();
    if (!support || support->inner < 0.5 || support->outer > 2.0)
      throw InvalidSupport("elementary symbol window " + psi_->describe() +
                           " must be supported in {1/2 < |xi| < 2}");
    for (const auto& m : coeffs_.m)
      if (m->dimension() != psi_->dimension())
        throw std::invalid_argument("elementary symbol coefficients must match window dimension");
  }
  int dimension() const override { return psi_->dimension(); }
  double order() const override { return shift_; }
  int max_analytic_order() const override { return ScalarFunction::kMaxJetOrder; }
  std::string describe() const override {
    std::ostringstream os;
    os << "elementary[J=" << j_max() << ",s'=" << shift_ << "," << coeffs_.m.front()->describe() << "]";
    return os.str();
  }
  Complex derivative(const Point& x, const Point& xi, const MultiIndex& a, const MultiIndex& b) const override {
    double sum = 0.0;
    for (int j : symbols::active_dyadic_indices(norm(xi), j_max())) {
      const double dilation = std::ldexp(1.0, -j);
      const double p = psi_->derivative(scaled(xi, dilation), b);
      if (p == 0.0) continue;
      const double weight = std::exp2(j * shift_) * std::pow(dilation, b.order());
      sum += coeffs_.m[j]->derivative(x, a) * weight * p;
    }
    return sum;
  }

 private:
  int j_max() const { return static_cast<int>(coeffs_.m.size()) - 1; }

  symbols::ElementaryCoefficients coeffs_;
  Function psi_;
  double shift_;
};

}  // namespace

namespace symbols {

Symbol constant(int dim, Complex c) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1 or 2");
  return Symbol(std::make_shared<ConstantSymbol>(dim, c));
}

Symbol separable(Function m, Function psi, double order) {
  return Symbol(std::make_shared<SeparableSymbol>(std::move(m), std::move(psi), order));
}

ElementaryCoefficients ElementaryCoefficients::geometric(Function base, double decay, int j_max) {
  if (j_max < 1) throw std::invalid_argument("J_max must be at least 1");
  ElementaryCoefficients c;
  for (int j = 0; j <= j_max; ++j) c.m.push_back(functions::scale(base, std::exp2(-decay * j)));
  return c;
}

Symbol elementary(ElementaryCoefficients coeffs, Function psi, double order_shift) {
  return Symbol(std::make_shared<ElementarySymbol>(std::move(coeffs), std::move(psi), order_shift));
}

std::vector<int> active_dyadic_indices(double xi_norm, int j_max) {
  std::vector<int> out;
  if (!(xi_norm > 0.5)) return out;
  // 2^{j-1} < |ξ| < 2^{j+1}  <=>  log2|ξ| - 1 < j < log2|ξ| + 1
  const int center = static_cast<int>(std::floor(std::log2(xi_norm)));
  for (int j = center - 1; j <= center + 1; ++j)
    if (j >= 0 && j <= j_max) out.push_back(j);
  return out;
}

}  // namespace symbols

}  // namespace psido
