#include "psido/multi_index.hpp"

#include <stdexcept>

namespace psido {

namespace {

double factorial_of(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

MultiIndex::MultiIndex(int dim, std::array<int, kMaxDim> entries) : dim_(dim), e_(entries) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("multi-index dimension must be 1 or 2");
  for (int i = 0; i < kMaxDim; ++i) {
    if (e_[i] < 0) throw std::invalid_argument("multi-index entries must be non-negative");
    if (i >= dim && e_[i] != 0) throw std::invalid_argument("multi-index entry beyond dimension");
  }
}

MultiIndex MultiIndex::unit(int dim, int axis) {
  std::array<int, kMaxDim> e{};
  e[axis] = 1;
  return MultiIndex(dim, e);
}

double MultiIndex::factorial() const { return factorial_of(e_[0]) * factorial_of(e_[1]); }

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  return MultiIndex(dim_, {e_[0] + o.e_[0], e_[1] + o.e_[1]});
}

std::string MultiIndex::to_string() const {
  if (dim_ == 1) return std::to_string(e_[0]);
  return std::to_string(e_[0]) + ":" + std::to_string(e_[1]);
}

std::vector<MultiIndex> multi_indices_of_order(int dim, int order) {
  std::vector<MultiIndex> out;
  if (dim == 1) {
    out.emplace_back(1, std::array<int, kMaxDim>{order, 0});
    return out;
  }
  for (int first = order; first >= 0; --first)
    out.emplace_back(2, std::array<int, kMaxDim>{first, order - first});
  return out;
}

std::vector<MultiIndex> multi_indices_below(int dim, int bound) {
  std::vector<MultiIndex> out;
  for (int k = 0; k < bound; ++k) {
    auto level = multi_indices_of_order(dim, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace psido
