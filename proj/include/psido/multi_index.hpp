#ifndef PSIDO_MULTI_INDEX_HPP
#define PSIDO_MULTI_INDEX_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace psido {

/// Largest supported spatial dimension.
inline constexpr int kMaxDim = 2;

/// A point of R^d stored in a fixed-size array; entries past the
/// dimension are kept at zero so norms can run over the whole array.
using Point = std::array<double, kMaxDim>;

inline double norm(const Point& p) { return std::hypot(p[0], p[1]); }

inline Point scaled(const Point& p, double s) { return {p[0] * s, p[1] * s}; }

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator-(const Point& a) { return {-a[0], -a[1]}; }

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int dim) : dim_(dim) {}
  MultiIndex(int dim, std::array<int, kMaxDim> entries);

  static MultiIndex unit(int dim, int axis);

  int dimension() const { return dim_; }
  int operator[](int i) const { return e_[i]; }
  int& operator[](int i) { return e_[i]; }

  /// |α|
  int order() const { return e_[0] + e_[1]; }
  /// α!
  double factorial() const;
  bool is_zero() const { return order() == 0; }

  MultiIndex operator+(const MultiIndex& o) const;
  bool operator==(const MultiIndex& o) const = default;

  std::string to_string() const;

 private:
  int dim_ = 1;
  std::array<int, kMaxDim> e_{};
};

/// All multi-indices of dimension `dim` with |α| < bound, graded
/// lexicographic (by total order, then descending first entry).
std::vector<MultiIndex> multi_indices_below(int dim, int bound);

/// All multi-indices of dimension `dim` with |α| == order.
std::vector<MultiIndex> multi_indices_of_order(int dim, int order);

double binomial(int n, int k);

}  // namespace psido

#endif  // PSIDO_MULTI_INDEX_HPP
