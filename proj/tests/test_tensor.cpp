#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "ndconv/shape.hpp"
#include "ndconv/tensor.hpp"
#include "ndconv/verification.hpp"

using namespace ndconv;

TEST_CASE("shape validates its extents") {
  CHECK_THROWS_AS(Shape(std::vector<std::size_t>{}), ShapeError);
  CHECK_THROWS_AS(Shape({3, 0, 2}), ShapeError);
  CHECK_NOTHROW(Shape({1}));
  const Shape s({4, 3, 2});
  CHECK(s.ndim() == 3);
  CHECK(s.extent(0) == 4);
  CHECK(s.element_count() == 24);
  CHECK(s == Shape({4, 3, 2}));
  CHECK_FALSE(s == Shape({4, 3}));
  CHECK(s.to_string() == "4x3x2");
}

TEST_CASE("shape rejects element counts that overflow") {
  const std::size_t big = std::numeric_limits<std::size_t>::max() / 2;
  CHECK_THROWS_AS(Shape({big, 3}), ShapeError);
}

TEST_CASE("strides are row-major with the first index slowest") {
  const Shape s({2, 3, 4});
  const auto str = strides_of(s);
  REQUIRE(str.size() == 3);
  CHECK(str[0] == 12);
  CHECK(str[1] == 4);
  CHECK(str[2] == 1);
}

TEST_CASE("flat_index and unflatten are inverse bijections") {
  const Shape s({3, 4, 5});
  for (std::size_t f = 0; f < s.element_count(); ++f) {
    const auto idx = unflatten(s, f);
    CHECK(flat_index(s, idx) == f);
  }
}

TEST_CASE("flat_index rejects out-of-range subscripts") {
  const Shape s({3, 4});
  CHECK_THROWS_AS(flat_index(s, std::vector<std::size_t>{3, 0}), BoundsError);
  CHECK_THROWS_AS(flat_index(s, std::vector<std::size_t>{0, 4}), BoundsError);
  CHECK_THROWS_AS(flat_index(s, std::vector<std::size_t>{0}), BoundsError);
}

TEST_CASE("tensor construction checks the data length") {
  CHECK_THROWS_AS(Tensor(Shape({2, 2}), {1.0, 2.0, 3.0}), ShapeError);
  const Tensor t(Shape({2, 2}), {1.0, 2.0, 3.0, 4.0});
  CHECK(t.size() == 4);
  CHECK(t.at({1, 0}) == 3.0);
  CHECK(Tensor::zeros(Shape({3}))[2] == 0.0);
  CHECK(Tensor::filled(Shape({3}), 7.5)[0] == 7.5);
}

TEST_CASE("vectorize and devectorize round trip") {
  verify::Rng rng(11);
  for (int c = 0; c < 25; ++c) {
    const Shape s = verify::random_shape(rng, 4, 5);
    const Tensor t = verify::random_tensor(rng, s);
    CHECK(devectorize(s, vectorize(t)) == t);
  }
}

TEST_CASE("devectorize rejects wrong lengths") {
  CHECK_THROWS_AS(devectorize(Shape({2, 2}), std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("elementwise arithmetic requires matching shapes") {
  const Tensor a(Shape({2}), {1.0, 2.0});
  const Tensor b(Shape({3}), {1.0, 2.0, 3.0});
  CHECK_THROWS_AS(add(a, b), ShapeError);
  CHECK_THROWS_AS(sub(a, b), ShapeError);
  CHECK_THROWS_AS(mul(a, b), ShapeError);
  CHECK_THROWS_AS(guarded_div(a, b), ShapeError);
  CHECK_THROWS_AS(dot(a, b), ShapeError);
}

TEST_CASE("elementwise arithmetic computes per element") {
  const Tensor a(Shape({3}), {1.0, -2.0, 4.0});
  const Tensor b(Shape({3}), {2.0, 3.0, -1.0});
  CHECK(add(a, b) == Tensor(Shape({3}), {3.0, 1.0, 3.0}));
  CHECK(sub(a, b) == Tensor(Shape({3}), {-1.0, -5.0, 5.0}));
  CHECK(mul(a, b) == Tensor(Shape({3}), {2.0, -6.0, -4.0}));
  CHECK(scale(a, 2.0) == Tensor(Shape({3}), {2.0, -4.0, 8.0}));
  CHECK(clamp_nonneg(a) == Tensor(Shape({3}), {1.0, 0.0, 4.0}));
  CHECK(sum(a) == 3.0);
  CHECK(dot(a, b) == -8.0);
  CHECK(norm2(Tensor(Shape({2}), {3.0, 4.0})) == 5.0);
}

TEST_CASE("guarded division maps tiny denominators to zero") {
  const Tensor num(Shape({3}), {1.0, 5.0, -2.0});
  const Tensor den(Shape({3}), {2.0, 1e-13, -4.0});
  const Tensor q = guarded_div(num, den);
  CHECK(q[0] == 0.5);
  CHECK(q[1] == 0.0);  // denominator below the guard threshold
  CHECK(q[2] == 0.5);
}

TEST_CASE("all_finite spots NaN and infinity") {
  Tensor t = Tensor::zeros(Shape({4}));
  CHECK(all_finite(t));
  t[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(all_finite(t));
  t[2] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(all_finite(t));
}
