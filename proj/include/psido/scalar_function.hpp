#ifndef PSIDO_SCALAR_FUNCTION_HPP
#define PSIDO_SCALAR_FUNCTION_HPP

#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "psido/multi_index.hpp"
#include "psido/taylor.hpp"

namespace psido {

/// Radial support description {inner < |p| < outer}; inner = 0 means the
/// support reaches the origin.
struct RadialSupport {
  double inner = 0.0;
  double outer = std::numeric_limits<double>::infinity();
};

/// A smooth real function on R^d with exact derivatives of any order up to
/// `kMaxJetOrder`, obtained through Taylor-jet arithmetic.
class ScalarFunction {
 public:
  static constexpr int kMaxJetOrder = 20;

  explicit ScalarFunction(int dim) : dim_(dim) {}
  virtual ~ScalarFunction() = default;

  int dimension() const { return dim_; }

  virtual double value(const Point& p) const = 0;
  virtual Taylor jet(const Point& p, int order) const = 0;
  virtual std::string describe() const = 0;

  /// Closed support, if known to be radial; nullopt otherwise.
  virtual std::optional<RadialSupport> radial_support() const { return std::nullopt; }
  /// Radius below which the function is identically equal to value(0).
  virtual double flat_radius() const { return 0.0; }

  double derivative(const Point& p, const MultiIndex& a) const;

 protected:
  /// Jet of |p + δ|^2.
  Taylor radius_squared(const Point& p, int order) const;

 private:
  int dim_;
};

using Function = std::shared_ptr<const ScalarFunction>;

namespace functions {

Function constant(int dim, double c);
/// (1 + |x/scale|^2)^{-1}
Function rational_decay(int dim, double scale = 1.0);
/// exp(-|x/scale|^2)
Function gaussian(int dim, double scale = 1.0);
/// x_axis
Function coordinate(int dim, int axis);
/// tanh(x_0 / scale)
Function tanh_ramp(int dim, double scale = 1.0);
/// (1 + |ξ|^2)^{p/2}
Function japanese_bracket(int dim, double p);
/// Radial smooth plateau: 1 on |ξ| <= inner, 0 on |ξ| >= outer.
Function plateau(int dim, double inner = 1.0, double outer = 2.0);
/// Annulus bump exp(-1/(1 - u^2)) with u = log2|ξ|, supported in {1/2 < |ξ| < 2}.
Function annulus(int dim);
/// exp(-1/(1 - |x/radius|^2)) on |x| < radius.
Function bump(int dim, double radius = 1.0);
/// (x_0/radius) · bump(x; radius); odd in x_0.
Function odd_bump(int dim, double radius = 1.0);
/// f(factor · x)
Function dilate(Function f, double factor);
/// f · g
Function product(Function f, Function g);
/// c · f
Function scale(Function f, double c);
/// ∂f/∂p_axis
Function partial(Function f, int axis);

}  // namespace functions

}  // namespace psido

#endif  // PSIDO_SCALAR_FUNCTION_HPP
