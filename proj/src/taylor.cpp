#include "psido/taylor.hpp"

#include <cmath>
#include <stdexcept>

namespace psido {

Taylor::Taylor(int dim, int order) : dim_(dim), order_(order), c_((order + 1) * (order + 1), 0.0) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Taylor dimension must be 1 or 2");
  if (order < 0) throw std::invalid_argument("Taylor order must be non-negative");
}

Taylor Taylor::constant(int dim, int order, double c) {
  Taylor t(dim, order);
  t.c_[0] = c;
  return t;
}

Taylor Taylor::variable(int dim, int order, int axis, double value) {
  Taylor t = constant(dim, order, value);
  if (order >= 1) {
    if (axis == 0) t(1, 0) = 1.0;
    else t(0, 1) = 1.0;
  }
  return t;
}

double Taylor::coefficient(const MultiIndex& a) const {
  if (a.order() > order_) throw std::out_of_range("Taylor coefficient beyond truncation order");
  return (*this)(a[0], a[1]);
}

Taylor& Taylor::operator+=(const Taylor& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Taylor& Taylor::operator-=(const Taylor& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Taylor& Taylor::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Taylor& Taylor::operator+=(double s) {
  c_[0] += s;
  return *this;
}

Taylor operator*(const Taylor& a, const Taylor& b) {
  const int K = a.order_;
  Taylor r(a.dim_, K);
  if (a.dim_ == 1) {
    for (int i = 0; i <= K; ++i) {
      const double ai = a(i);
      if (ai == 0.0) continue;
      for (int k = 0; i + k <= K; ++k) r(i + k) += ai * b(k);
    }
    return r;
  }
  for (int i = 0; i <= K; ++i) {
    for (int j = 0; i + j <= K; ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (int k = 0; i + j + k <= K; ++k)
        for (int l = 0; i + j + k + l <= K; ++l) r(i + k, j + l) += aij * b(k, l);
    }
  }
  return r;
}

Taylor Taylor::compose(const std::vector<double>& f_coeffs) const {
  Taylor delta = *this;
  delta.c_[0] = 0.0;
  Taylor r = constant(dim_, order_, f_coeffs[order_]);
  for (int k = order_ - 1; k >= 0; --k) {
    r = r * delta;
    r.c_[0] += f_coeffs[k];
  }
  return r;
}

namespace series {

std::vector<double> exp(double u0, int order) {
  std::vector<double> c(order + 1);
  c[0] = std::exp(u0);
  for (int k = 1; k <= order; ++k) c[k] = c[k - 1] / k;
  return c;
}

std::vector<double> reciprocal(double u0, int order) {
  std::vector<double> c(order + 1);
  c[0] = 1.0 / u0;
  for (int k = 1; k <= order; ++k) c[k] = -c[k - 1] / u0;
  return c;
}

std::vector<double> log(double u0, int order) {
  std::vector<double> c(order + 1);
  c[0] = std::log(u0);
  double inv_pow = 1.0;
  for (int k = 1; k <= order; ++k) {
    inv_pow /= u0;
    c[k] = ((k % 2 == 1) ? 1.0 : -1.0) * inv_pow / k;
  }
  return c;
}

std::vector<double> power(double u0, double p, int order) {
  std::vector<double> c(order + 1);
  c[0] = std::pow(u0, p);
  for (int k = 1; k <= order; ++k) c[k] = c[k - 1] * (p - (k - 1)) / (k * u0);
  return c;
}

std::vector<double> tanh(double u0, int order) {
  // y' = 1 - y^2, matched coefficient by coefficient.
  std::vector<double> y(order + 1, 0.0);
  y[0] = std::tanh(u0);
  for (int k = 0; k < order; ++k) {
    double conv = 0.0;
    for (int i = 0; i <= k; ++i) conv += y[i] * y[k - i];
    y[k + 1] = ((k == 0 ? 1.0 : 0.0) - conv) / (k + 1);
  }
  return y;
}

}  // namespace series

Taylor exp(const Taylor& u) { return u.compose(series::exp(u.value(), u.order())); }
Taylor reciprocal(const Taylor& u) { return u.compose(series::reciprocal(u.value(), u.order())); }
Taylor log(const Taylor& u) { return u.compose(series::log(u.value(), u.order())); }
Taylor power(const Taylor& u, double p) { return u.compose(series::power(u.value(), p, u.order())); }
Taylor tanh(const Taylor& u) { return u.compose(series::tanh(u.value(), u.order())); }

Taylor exp_neg_reciprocal(const Taylor& s) {
  const double s0 = s.value();
  // exp(-1/s0) < 1e-304 below this threshold; every derivative is
  // dominated by the exponential as well.
  if (s0 <= 1.0 / 700.0) return Taylor(s.dimension(), s.order());
  return exp(-1.0 * reciprocal(s));
}

}  // namespace psido
