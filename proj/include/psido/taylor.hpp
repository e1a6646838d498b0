#ifndef PSIDO_TAYLOR_HPP
#define PSIDO_TAYLOR_HPP

#include <vector>

#include "psido/multi_index.hpp"

namespace psido {

/// Truncated Taylor polynomial in one or two variables around a fixed
/// expansion point, keeping all monomials of total degree <= order.
///
/// Arithmetic on these jets propagates exact derivatives through
/// compositions of elementary functions: the coefficient of δ^α is
/// ∂^α f / α!.
class Taylor {
 public:
  Taylor(int dim, int order);

  static Taylor constant(int dim, int order, double c);
  /// The jet of the coordinate function p_axis around `value`.
  static Taylor variable(int dim, int order, int axis, double value);

  int dimension() const { return dim_; }
  int order() const { return order_; }

  double operator()(int i, int j = 0) const { return c_[index(i, j)]; }
  double& operator()(int i, int j = 0) { return c_[index(i, j)]; }

  double value() const { return c_[0]; }
  double coefficient(const MultiIndex& a) const;
  /// ∂^α f at the expansion point.
  double derivative(const MultiIndex& a) const { return coefficient(a) * a.factorial(); }

  Taylor& operator+=(const Taylor& o);
  Taylor& operator-=(const Taylor& o);
  Taylor& operator*=(double s);
  Taylor& operator+=(double s);

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator+(Taylor a, double s) { return a += s; }
  friend Taylor operator-(double s, Taylor a) {
    a *= -1.0;
    return a += s;
  }
  friend Taylor operator*(const Taylor& a, const Taylor& b);

  /// f ∘ u, where `f_coeffs[k]` = f^{(k)}(u(0)) / k!.
  Taylor compose(const std::vector<double>& f_coeffs) const;

 private:
  int index(int i, int j) const { return i * (order_ + 1) + j; }

  int dim_;
  int order_;
  std::vector<double> c_;
};

// Univariate Taylor coefficients f^{(k)}(u0)/k!, k = 0..order.
namespace series {
std::vector<double> exp(double u0, int order);
std::vector<double> reciprocal(double u0, int order);
std::vector<double> log(double u0, int order);
std::vector<double> power(double u0, double p, int order);
std::vector<double> tanh(double u0, int order);
}  // namespace series

Taylor exp(const Taylor& u);
Taylor reciprocal(const Taylor& u);
Taylor log(const Taylor& u);
Taylor power(const Taylor& u, double p);
Taylor tanh(const Taylor& u);

/// exp(-1/s) for s > 0, zero (with all derivatives) for s <= 0. Also
/// returns zero once exp(-1/s) underflows.
Taylor exp_neg_reciprocal(const Taylor& s);

}  // namespace psido

#endif  // PSIDO_TAYLOR_HPP
