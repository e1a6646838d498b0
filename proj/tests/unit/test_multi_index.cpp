#include <doctest.h>

#include "psido/multi_index.hpp"

using namespace psido;

TEST_CASE("order and factorial") {
  const MultiIndex a(2, {2, 3});
  CHECK(a.order() == 5);
  CHECK(a.factorial() == doctest::Approx(12.0));
  CHECK(MultiIndex(1).factorial() == 1.0);
  CHECK(MultiIndex(1).is_zero());
}

TEST_CASE("negative entries are rejected") { CHECK_THROWS(MultiIndex(1, {-1, 0})); }

TEST_CASE("indices below a bound are graded lexicographic") {
  const auto v = multi_indices_below(2, 3);
  REQUIRE(v.size() == 6);
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i - 1].order() <= v[i].order());
  CHECK(v[0].is_zero());
  CHECK(multi_indices_below(1, 4).size() == 4);
  CHECK(multi_indices_of_order(2, 3).size() == 4);
}

TEST_CASE("sum and unit indices") {
  const MultiIndex a = MultiIndex::unit(2, 0) + MultiIndex::unit(2, 1) + MultiIndex::unit(2, 1);
  CHECK(a == MultiIndex(2, {1, 2}));
  CHECK(a.to_string() == "1:2");
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial(5, 2) == doctest::Approx(10.0));
  CHECK(binomial(4, 0) == doctest::Approx(1.0));
}
