#include "psido/calculus.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "psido/errors.hpp"

namespace psido {

namespace {

constexpr Complex kI{0.0, 1.0};

Complex ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return 1.0;
    case 1: return kI;
    case 2: return -1.0;
    default: return -kI;
  }
}

/// All γ <= a componentwise.
std::vector<MultiIndex> sub_indices(const MultiIndex& a) {
  std::vector<MultiIndex> out;
  for (int i = 0; i <= a[0]; ++i)
    for (int j = 0; j <= a[1]; ++j) out.emplace_back(a.dimension(), std::array<int, kMaxDim>{i, j});
  return out;
}

double binomial_multi(const MultiIndex& a, const MultiIndex& g) {
  return binomial(a[0], g[0]) * binomial(a[1], g[1]);
}

MultiIndex difference(const MultiIndex& a, const MultiIndex& g) {
  return MultiIndex(a.dimension(), {a[0] - g[0], a[1] - g[1]});
}

class TransposeExpansion final : public SymbolFamily {
 public:
  TransposeExpansion(Symbol base, int N) : base_(std::move(base)), N_(N) {
    for (const MultiIndex& g : multi_indices_below(base_.dimension(), N))
      terms_.push_back({g, ipow(g.order()) / g.factorial()});
  }
  int dimension() const override { return base_.dimension(); }
  double order() const override { return base_.order(); }
  int max_analytic_order() const override {
    if (base_.deriv_mode() == DerivMode::finite_difference) return ScalarFunction::kMaxJetOrder;
    return std::max(0, base_.max_analytic_order() - 2 * (N_ - 1));
  }
  std::string describe() const override {
    return "transpose_expansion[N=" + std::to_string(N_) + "," + base_.describe() + "]";
  }
  Complex derivative(const Point& x, const Point& xi, const MultiIndex& a, const MultiIndex& b) const override {
    const Point mxi = -xi;
    const double sign_b = (b.order() % 2) ? -1.0 : 1.0;
    Complex sum = 0.0;
    for (const Term& t : terms_) sum += t.coeff * base_.eval(x, mxi, t.index + a, t.index + b);
    return sign_b * sum;
  }

 private:
  struct Term {
    MultiIndex index;
    Complex coeff;
  };
  Symbol base_;
  int N_;
  std::vector<Term> terms_;
};

class Truncated final : public SymbolFamily {
 public:
  Truncated(Symbol base, double eps, PhaseWindow window) : base_(std::move(base)), eps_(eps), window_(std::move(window)) {}
  int dimension() const override { return base_.dimension(); }
  double order() const override { return base_.order(); }
  int max_analytic_order() const override {
    return std::min(base_.max_analytic_order(), ScalarFunction::kMaxJetOrder);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "truncate[eps=" << eps_ << "," << base_.describe() << "]";
    return os.str();
  }
  Complex derivative(const Point& x, const Point& xi, const MultiIndex& a, const MultiIndex& b) const override {
    const Point ex = scaled(x, eps_);
    const Point exi = scaled(xi, eps_);
    Complex sum = 0.0;
    for (const MultiIndex& g : sub_indices(a)) {
      const MultiIndex ra = difference(a, g);
      const double ux = window_.x_part->derivative(ex, ra) * std::pow(eps_, ra.order());
      if (ux == 0.0) continue;
      for (const MultiIndex& h : sub_indices(b)) {
        const MultiIndex rb = difference(b, h);
        const double uk = window_.xi_part->derivative(exi, rb) * std::pow(eps_, rb.order());
        if (uk == 0.0) continue;
        sum += binomial_multi(a, g) * binomial_multi(b, h) * ux * uk * base_.eval(x, xi, g, h);
      }
    }
    return sum;
  }

 private:
  Symbol base_;
  double eps_;
  PhaseWindow window_;
};

class LinearCombination final : public SymbolFamily {
 public:
  explicit LinearCombination(std::vector<std::pair<Complex, Symbol>> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("linear combination needs at least one term");
    for (const auto& [c, s] : terms_)
      if (s.dimension() != terms_.front().second.dimension())
        throw std::invalid_argument("linear combination of symbols of different dimension");
  }
  int dimension() const override { return terms_.front().second.dimension(); }
  double order() const override {
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) s = std::max(s, t.second.order());
    return s;
  }
  int max_analytic_order() const override {
    int m = std::numeric_limits<int>::max();
    for (const auto& t : terms_)
      m = std::min(m, t.second.deriv_mode() == DerivMode::finite_difference ? ScalarFunction::kMaxJetOrder
                                                                             : t.second.max_analytic_order());
    return m;
  }
  std::string describe() const override {
    std::string s = "sum[";
    for (std::size_t i = 0; i < terms_.size(); ++i) s += (i ? "," : "") + terms_[i].second.describe();
    return s + "]";
  }
  Complex derivative(const Point& x, const Point& xi, const MultiIndex& a, const MultiIndex& b) const override {
    Complex sum = 0.0;
    for (const auto& [c, s] : terms_) sum += c * s.eval(x, xi, a, b);
    return sum;
  }

 private:
  std::vector<std::pair<Complex, Symbol>> terms_;
};

/// σ(x, 0) ψ(ξ)
class WindowedTrace final : public SymbolFamily {
 public:
  WindowedTrace(Symbol base, Function window) : base_(std::move(base)), window_(std::move(window)) {}
  int dimension() const override { return base_.dimension(); }
  double order() const override { return base_.order(); }
  int max_analytic_order() const override {
    return std::min(base_.max_analytic_order(), ScalarFunction::kMaxJetOrder);
  }
  std::string describe() const override { return "trace_window[" + base_.describe() + "," + window_->describe() + "]"; }
  Complex derivative(const Point& x, const Point& xi, const MultiIndex& a, const MultiIndex& b) const override {
    const double w = window_->derivative(xi, b);
    if (w == 0.0) return 0.0;
    return base_.eval(x, Point{}, a, MultiIndex(dimension())) * w;
  }

 private:
  Symbol base_;
  Function window_;
};

/// W_j(ξ) = ∫_0^1 ∂_j ψ(tξ) dt = ξ_j (ψ(ξ) - 1)/|ξ|^2 for radial ψ with ψ ≡ 1 near 0.
class ReducedWindow final : public ScalarFunction {
 public:
  ReducedWindow(Function window, int axis) : ScalarFunction(window->dimension()), window_(std::move(window)), axis_(axis) {}
  double value(const Point& xi) const override {
    const double r = norm(xi);
    if (r < window_->flat_radius()) return 0.0;
    return xi[axis_] * (window_->value(xi) - 1.0) / (r * r);
  }
  Taylor jet(const Point& xi, int order) const override {
    if (norm(xi) < window_->flat_radius()) return Taylor(dimension(), order);
    const Taylor xj = Taylor::variable(dimension(), order, axis_, xi[axis_]);
    return xj * (window_->jet(xi, order) + (-1.0)) * reciprocal(radius_squared(xi, order));
  }
  std::string describe() const override { return "reduced_window(" + std::to_string(axis_) + ")"; }

 private:
  Function window_;
  int axis_;
};

class ReducedComponent final : public SymbolFamily {
 public:
  ReducedComponent(Symbol base, Function window, int axis, int nodes)
      : base_(std::move(base)), window_part_(std::make_shared<ReducedWindow>(window, axis)), axis_(axis),
        rule_(gauss_legendre_unit(nodes)) {}
  int dimension() const override { return base_.dimension(); }
  double order() const override { return base_.order() - 1.0; }
  int max_analytic_order() const override {
    if (base_.deriv_mode() == DerivMode::finite_difference) return ScalarFunction::kMaxJetOrder;
    return std::max(0, std::min(base_.max_analytic_order() - 1, ScalarFunction::kMaxJetOrder));
  }
  std::string describe() const override {
    return "order_reduce_component[" + std::to_string(axis_) + "," + base_.describe() + "]";
  }
  Complex derivative(const Point& x, const Point& xi, const MultiIndex& a, const MultiIndex& b) const override {
    const MultiIndex bj = b + MultiIndex::unit(dimension(), axis_);
    Complex integral = 0.0;
    for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
      const double t = rule_.nodes[q];
      integral += rule_.weights[q] * std::pow(t, b.order()) * base_.eval(x, scaled(xi, t), a, bj);
    }
    const double w = window_part_->derivative(xi, b);
    if (w != 0.0) integral -= base_.eval(x, Point{}, a, MultiIndex(dimension())) * w;
    return integral;
  }

 private:
  Symbol base_;
  Function window_part_;
  int axis_;
  QuadratureRule rule_;
};

Symbol make_component(const Symbol& base, const Function& window, int axis, int nodes) {
  return Symbol(std::make_shared<ReducedComponent>(base, window, axis, nodes), base.deriv_mode());
}

}  // namespace

Symbol transpose_expansion(const Symbol& sym, int N) {
  if (N < 1) throw OrderExceeded("transpose expansion order N must be at least 1");
  if (sym.deriv_mode() == DerivMode::analytic && 2 * (N - 1) > sym.max_analytic_order()) {
    std::ostringstream os;
    os << "transpose expansion N=" << N << " needs derivatives of order " << 2 * (N - 1) << " but "
       << sym.describe() << " supplies " << sym.max_analytic_order();
    throw OrderExceeded(os.str());
  }
  return Symbol(std::make_shared<TransposeExpansion>(sym, N), sym.deriv_mode());
}

Symbol commutator_transpose_symbol(const Symbol& sym, int N) { return transpose_expansion(sym, N); }

PhaseWindow PhaseWindow::standard(int dim) {
  return {functions::plateau(dim, 1.0, 2.0), functions::plateau(dim, 1.0, 2.0)};
}

Symbol truncate(const Symbol& sym, double epsilon, const PhaseWindow& window) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("truncation epsilon must lie in (0, 1]");
  if (window.x_part->dimension() != sym.dimension() || window.xi_part->dimension() != sym.dimension())
    throw std::invalid_argument("truncation window dimension mismatch");
  const double u00 = window.x_part->value(Point{}) * window.xi_part->value(Point{});
  if (std::abs(u00 - 1.0) > 1e-14) throw std::invalid_argument("truncation window must satisfy u(0,0) = 1");
  return Symbol(std::make_shared<Truncated>(sym, epsilon, window), sym.deriv_mode());
}

Symbol linear_combination(const std::vector<std::pair<Complex, Symbol>>& terms) {
  DerivMode mode = DerivMode::analytic;
  for (const auto& t : terms)
    if (t.second.deriv_mode() == DerivMode::finite_difference) mode = DerivMode::finite_difference;
  return Symbol(std::make_shared<LinearCombination>(terms), mode);
}

QuadratureRule gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      // Recompute the derivative at the converged root.
      double p1 = 1.0, p2 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // Map [-1, 1] to [0, 1].
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

Complex OrderReduction::reconstruct(const Point& x, const Point& xi) const {
  Complex sum = 0.0;
  for (std::size_t j = 0; j < components.size(); ++j) sum += xi[j] * components[j].eval(x, xi);
  return sum;
}

OrderReduction order_reduce(const Symbol& sym, Function window, int quadrature_nodes) {
  if (quadrature_nodes < 16) throw std::invalid_argument("order_reduce needs at least 16 quadrature nodes");
  if (!window || window->dimension() != sym.dimension())
    throw std::invalid_argument("order_reduce window dimension mismatch");
  if (std::abs(window->value(Point{}) - 1.0) > 1e-14)
    throw std::invalid_argument("order_reduce window must satisfy psi(0) = 1");
  if (!(window->flat_radius() > 0.0) || !window->radial_support())
    throw std::invalid_argument("order_reduce window must be radial and identically 1 near the origin");

  OrderReduction red;
  red.base = sym;
  red.window = window;
  red.quadrature_nodes = quadrature_nodes;
  red.tilde_part = Symbol(std::make_shared<WindowedTrace>(sym, window), sym.deriv_mode());
  red.remainder = linear_combination({{1.0, sym}, {-1.0, red.tilde_part}});
  for (int j = 0; j < sym.dimension(); ++j) red.components.push_back(make_component(sym, window, j, quadrature_nodes));
  return red;
}

QuadratureCheck check_component_convergence(const OrderReduction& red, int j, const Point& x, const Point& xi,
                                            double tolerance) {
  QuadratureCheck check;
  check.value = red.components.at(j).eval(x, xi);
  check.doubled = make_component(red.base, red.window, j, 2 * red.quadrature_nodes).eval(x, xi);
  const double scale = std::max(std::abs(check.doubled), std::numeric_limits<double>::min());
  check.relative_change = std::abs(check.value - check.doubled) / scale;
  if (std::abs(check.doubled) == 0.0 && std::abs(check.value) == 0.0) check.relative_change = 0.0;
  check.converged = check.relative_change <= tolerance;
  return check;
}

Complex component_checked(const OrderReduction& red, int j, const Point& x, const Point& xi, double tolerance) {
  const QuadratureCheck c = check_component_convergence(red, j, x, xi, tolerance);
  if (!c.converged) {
    std::ostringstream os;
    os << "order reduction component " << j << " did not converge: node doubling changed the value by "
       << c.relative_change << " (relative)";
    throw QuadratureNonConvergence(os.str());
  }
  return c.doubled;
}

}  // namespace psido
