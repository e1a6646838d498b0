#include "psido/scalar_function.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace psido {

double ScalarFunction::derivative(const Point& p, const MultiIndex& a) const {
  if (a.is_zero()) return value(p);
  if (a.order() > kMaxJetOrder) throw std::out_of_range("derivative order exceeds jet capacity");
  return jet(p, a.order()).derivative(a);
}

Taylor ScalarFunction::radius_squared(const Point& p, int order) const {
  Taylor r2(dim_, order);
  for (int i = 0; i < dim_; ++i) {
    const Taylor xi = Taylor::variable(dim_, order, i, p[i]);
    r2 += xi * xi;
  }
  return r2;
}

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double exp_neg_reciprocal_value(double s) { return s <= 1.0 / 700.0 ? 0.0 : std::exp(-1.0 / s); }

class Constant final : public ScalarFunction {
 public:
  Constant(int dim, double c) : ScalarFunction(dim), c_(c) {}
  double value(const Point&) const override { return c_; }
  Taylor jet(const Point&, int order) const override { return Taylor::constant(dimension(), order, c_); }
  std::string describe() const override { return "constant(" + fmt_num(c_) + ")"; }
  double flat_radius() const override { return std::numeric_limits<double>::infinity(); }
  std::optional<RadialSupport> radial_support() const override {
    if (c_ == 0.0) return RadialSupport{0.0, 0.0};
    return RadialSupport{};
  }

 private:
  double c_;
};

class RationalDecay final : public ScalarFunction {
 public:
  RationalDecay(int dim, double scale) : ScalarFunction(dim), inv_s2_(1.0 / (scale * scale)), scale_(scale) {}
  double value(const Point& p) const override {
    const double r = norm(p);
    return 1.0 / (1.0 + r * r * inv_s2_);
  }
  Taylor jet(const Point& p, int order) const override {
    return reciprocal(radius_squared(p, order) * inv_s2_ + 1.0);
  }
  std::string describe() const override { return "rational_decay(" + fmt_num(scale_) + ")"; }

 private:
  double inv_s2_;
  double scale_;
};

class Gaussian final : public ScalarFunction {
 public:
  Gaussian(int dim, double scale) : ScalarFunction(dim), inv_s2_(1.0 / (scale * scale)), scale_(scale) {}
  double value(const Point& p) const override {
    const double r = norm(p);
    return std::exp(-r * r * inv_s2_);
  }
  Taylor jet(const Point& p, int order) const override { return exp(radius_squared(p, order) * -inv_s2_); }
  std::string describe() const override { return "gaussian(" + fmt_num(scale_) + ")"; }

 private:
  double inv_s2_;
  double scale_;
};

class Coordinate final : public ScalarFunction {
 public:
  Coordinate(int dim, int axis) : ScalarFunction(dim), axis_(axis) {
    if (axis < 0 || axis >= dim) throw std::invalid_argument("coordinate axis out of range");
  }
  double value(const Point& p) const override { return p[axis_]; }
  Taylor jet(const Point& p, int order) const override {
    return Taylor::variable(dimension(), order, axis_, p[axis_]);
  }
  std::string describe() const override { return "coordinate(" + std::to_string(axis_) + ")"; }

 private:
  int axis_;
};

class TanhRamp final : public ScalarFunction {
 public:
  TanhRamp(int dim, double scale) : ScalarFunction(dim), scale_(scale) {}
  double value(const Point& p) const override { return std::tanh(p[0] / scale_); }
  Taylor jet(const Point& p, int order) const override {
    return tanh(Taylor::variable(dimension(), order, 0, p[0]) * (1.0 / scale_));
  }
  std::string describe() const override { return "tanh(" + fmt_num(scale_) + ")"; }

 private:
  double scale_;
};

class JapaneseBracket final : public ScalarFunction {
 public:
  JapaneseBracket(int dim, double p) : ScalarFunction(dim), p_(p) {}
  double value(const Point& x) const override {
    const double r = norm(x);
    return std::pow(1.0 + r * r, 0.5 * p_);
  }
  Taylor jet(const Point& x, int order) const override {
    return power(radius_squared(x, order) + 1.0, 0.5 * p_);
  }
  std::string describe() const override { return "japanese(" + fmt_num(p_) + ")"; }

 private:
  double p_;
};

class Plateau final : public ScalarFunction {
 public:
  Plateau(int dim, double inner, double outer) : ScalarFunction(dim), inner_(inner), outer_(outer) {
    if (!(inner > 0.0 && outer > inner)) throw std::invalid_argument("plateau needs 0 < inner < outer");
  }
  double value(const Point& p) const override {
    const double r = norm(p);
    if (r <= inner_) return 1.0;
    if (r >= outer_) return 0.0;
    const double s = (r - inner_) / (outer_ - inner_);
    const double a = exp_neg_reciprocal_value(1.0 - s);
    const double b = exp_neg_reciprocal_value(s);
    return a / (a + b);
  }
  Taylor jet(const Point& p, int order) const override {
    const double r0 = norm(p);
    if (r0 <= inner_) return Taylor::constant(dimension(), order, 1.0);
    if (r0 >= outer_) return Taylor(dimension(), order);
    const Taylor r = power(radius_squared(p, order), 0.5);
    const Taylor s = (r + (-inner_)) * (1.0 / (outer_ - inner_));
    const Taylor a = exp_neg_reciprocal(1.0 - s);
    const Taylor b = exp_neg_reciprocal(s);
    return a * reciprocal(a + b);
  }
  std::string describe() const override {
    return "plateau(" + fmt_num(inner_) + "," + fmt_num(outer_) + ")";
  }
  std::optional<RadialSupport> radial_support() const override { return RadialSupport{0.0, outer_}; }
  double flat_radius() const override { return inner_; }

 private:
  double inner_;
  double outer_;
};

class Annulus final : public ScalarFunction {
 public:
  explicit Annulus(int dim) : ScalarFunction(dim) {}
  double value(const Point& p) const override {
    const double r = norm(p);
    if (r <= 0.5 || r >= 2.0) return 0.0;
    const double u = std::log2(r);
    return exp_neg_reciprocal_value(1.0 - u * u);
  }
  Taylor jet(const Point& p, int order) const override {
    const double r0 = norm(p);
    if (r0 <= 0.5 || r0 >= 2.0) return Taylor(dimension(), order);
    const Taylor u = log(radius_squared(p, order)) * (0.5 / std::log(2.0));
    return exp_neg_reciprocal(1.0 - u * u);
  }
  std::string describe() const override { return "annulus"; }
  std::optional<RadialSupport> radial_support() const override { return RadialSupport{0.5, 2.0}; }

 private:
};

class Bump final : public ScalarFunction {
 public:
  Bump(int dim, double radius) : ScalarFunction(dim), inv_r2_(1.0 / (radius * radius)), radius_(radius) {}
  double value(const Point& p) const override {
    const double r = norm(p);
    return exp_neg_reciprocal_value(1.0 - r * r * inv_r2_);
  }
  Taylor jet(const Point& p, int order) const override {
    if (norm(p) >= radius_) return Taylor(dimension(), order);
    return exp_neg_reciprocal(1.0 - radius_squared(p, order) * inv_r2_);
  }
  std::string describe() const override { return "bump(" + fmt_num(radius_) + ")"; }
  std::optional<RadialSupport> radial_support() const override { return RadialSupport{0.0, radius_}; }

 private:
  double inv_r2_;
  double radius_;
};

class OddBump final : public ScalarFunction {
 public:
  OddBump(int dim, double radius) : ScalarFunction(dim), base_(dim, radius), radius_(radius) {}
  double value(const Point& p) const override { return p[0] / radius_ * base_.value(p); }
  Taylor jet(const Point& p, int order) const override {
    return Taylor::variable(dimension(), order, 0, p[0]) * (1.0 / radius_) * base_.jet(p, order);
  }
  std::string describe() const override { return "odd_bump(" + fmt_num(radius_) + ")"; }

 private:
  Bump base_;
  double radius_;
};

class Dilate final : public ScalarFunction {
 public:
  Dilate(Function f, double factor) : ScalarFunction(f->dimension()), f_(std::move(f)), factor_(factor) {}
  double value(const Point& p) const override { return f_->value(scaled(p, factor_)); }
  Taylor jet(const Point& p, int order) const override {
    // Coefficient of δ^α picks up factor^{|α|}.
    Taylor t = f_->jet(scaled(p, factor_), order);
    Taylor out(dimension(), order);
    for (int i = 0; i <= order; ++i)
      for (int j = 0; i + j <= order; ++j) out(i, j) = t(i, j) * std::pow(factor_, i + j);
    return out;
  }
  std::string describe() const override { return "dilate(" + f_->describe() + "," + fmt_num(factor_) + ")"; }
  std::optional<RadialSupport> radial_support() const override {
    auto s = f_->radial_support();
    if (!s || factor_ == 0.0) return std::nullopt;
    const double k = 1.0 / std::abs(factor_);
    return RadialSupport{s->inner * k, s->outer * k};
  }
  double flat_radius() const override {
    return factor_ == 0.0 ? std::numeric_limits<double>::infinity() : f_->flat_radius() / std::abs(factor_);
  }

 private:
  Function f_;
  double factor_;
};

class Product final : public ScalarFunction {
 public:
  Product(Function f, Function g) : ScalarFunction(f->dimension()), f_(std::move(f)), g_(std::move(g)) {
    if (f_->dimension() != g_->dimension()) throw std::invalid_argument("product of functions of different dimension");
  }
  double value(const Point& p) const override { return f_->value(p) * g_->value(p); }
  Taylor jet(const Point& p, int order) const override { return f_->jet(p, order) * g_->jet(p, order); }
  std::string describe() const override { return f_->describe() + "*" + g_->describe(); }

 private:
  Function f_;
  Function g_;
};

class Scale final : public ScalarFunction {
 public:
  Scale(Function f, double c) : ScalarFunction(f->dimension()), f_(std::move(f)), c_(c) {}
  double value(const Point& p) const override { return c_ * f_->value(p); }
  Taylor jet(const Point& p, int order) const override { return f_->jet(p, order) * c_; }
  std::string describe() const override { return fmt_num(c_) + "*" + f_->describe(); }
  std::optional<RadialSupport> radial_support() const override { return f_->radial_support(); }
  double flat_radius() const override { return f_->flat_radius(); }

 private:
  Function f_;
  double c_;
};

class Partial final : public ScalarFunction {
 public:
  Partial(Function f, int axis) : ScalarFunction(f->dimension()), f_(std::move(f)), axis_(axis) {
    if (axis < 0 || axis >= dimension()) throw std::invalid_argument("partial derivative axis out of range");
  }
  double value(const Point& p) const override { return jet(p, 0).value(); }
  Taylor jet(const Point& p, int order) const override {
    if (order + 1 > kMaxJetOrder) throw std::out_of_range("derivative order exceeds jet capacity");
    const Taylor t = f_->jet(p, order + 1);
    Taylor out(dimension(), order);
    for (int i = 0; i <= order; ++i)
      for (int j = 0; i + j <= order; ++j) out(i, j) = axis_ == 0 ? (i + 1) * t(i + 1, j) : (j + 1) * t(i, j + 1);
    return out;
  }
  std::string describe() const override { return "partial(" + f_->describe() + "," + std::to_string(axis_) + ")"; }
  std::optional<RadialSupport> radial_support() const override { return f_->radial_support(); }

 private:
  Function f_;
  int axis_;
};

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1 or 2");
}

}  // namespace

namespace functions {

Function constant(int dim, double c) {
  check_dim(dim);
  return std::make_shared<Constant>(dim, c);
}
Function rational_decay(int dim, double scale) {
  check_dim(dim);
  return std::make_shared<RationalDecay>(dim, scale);
}
Function gaussian(int dim, double scale) {
  check_dim(dim);
  return std::make_shared<Gaussian>(dim, scale);
}
Function coordinate(int dim, int axis) {
  check_dim(dim);
  return std::make_shared<Coordinate>(dim, axis);
}
Function tanh_ramp(int dim, double scale) {
  check_dim(dim);
  return std::make_shared<TanhRamp>(dim, scale);
}
Function japanese_bracket(int dim, double p) {
  check_dim(dim);
  return std::make_shared<JapaneseBracket>(dim, p);
}
Function plateau(int dim, double inner, double outer) {
  check_dim(dim);
  return std::make_shared<Plateau>(dim, inner, outer);
}
Function annulus(int dim) {
  check_dim(dim);
  return std::make_shared<Annulus>(dim);
}
Function bump(int dim, double radius) {
  check_dim(dim);
  return std::make_shared<Bump>(dim, radius);
}
Function odd_bump(int dim, double radius) {
  check_dim(dim);
  return std::make_shared<OddBump>(dim, radius);
}
Function dilate(Function f, double factor) { return std::make_shared<Dilate>(std::move(f), factor); }
Function product(Function f, Function g) { return std::make_shared<Product>(std::move(f), std::move(g)); }
Function scale(Function f, double c) { return std::make_shared<Scale>(std::move(f), c); }
Function partial(Function f, int axis) { return std::make_shared<Partial>(std::move(f), axis); }

}  // namespace functions

}  // namespace psido
