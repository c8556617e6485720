#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "ndconv/explicit_matrix.hpp"
#include "ndconv/verification.hpp"

using namespace ndconv;

TEST_CASE("1-d matrix is the banded Toeplitz with kernel values down columns") {
  const Kernel h(Tensor(Shape({3}), {1.0, 2.0, 3.0}));
  const ExplicitConvMatrix m = build_matrix(h, Shape({2}));
  REQUIRE(m.rows() == 4);
  REQUIRE(m.cols() == 2);
  const double want[4][2] = {{1, 0}, {2, 1}, {3, 2}, {0, 3}};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(m.at(r, c) == want[r][c]);
}

TEST_CASE("separable 2-d kernel produces scaled identity blocks") {
  // Kernel varying only along the first dimension: each block of the
  // block-banded matrix is h(j) times the identity of the second dimension.
  const Kernel h(Tensor(Shape({3, 1}), {4.0, 5.0, 6.0}));
  const Shape x_shape({2, 2});
  const ExplicitConvMatrix m = build_matrix(h, x_shape);
  REQUIRE(m.rows() == 8);  // (2+2) blocks of size 2
  REQUIRE(m.cols() == 4);
  const double hv[3] = {4.0, 5.0, 6.0};
  for (std::size_t br = 0; br < 4; ++br) {    // block row
    for (std::size_t bc = 0; bc < 2; ++bc) {  // block column
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          const double got = m.at(br * 2 + i, bc * 2 + j);
          double want = 0.0;
          if (br >= bc && br - bc <= 2 && i == j) want = hv[br - bc];
          CHECK(got == want);
        }
      }
    }
  }
}

TEST_CASE("recursive construction equals the direct index-difference rule") {
  verify::Rng rng(31);
  for (int c = 0; c < 60; ++c) {
    const Shape s = verify::random_shape(rng, 3, 5);
    const Kernel h = verify::random_kernel(rng, s, 2);
    const ExplicitConvMatrix a = build_matrix(h, s);
    const ExplicitConvMatrix b = testutil::direct_index_matrix(h, s);
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    CHECK(a.entries() == b.entries());  // elementwise identical placement
  }
}

TEST_CASE("every column contains each kernel value exactly once") {
  verify::Rng rng(32);
  for (int c = 0; c < 20; ++c) {
    const Shape s = verify::random_shape(rng, 3, 4);
    const Kernel h = verify::random_kernel(rng, s, 2);
    const ExplicitConvMatrix m = build_matrix(h, s);
    const double want = sum(h.tensor());
    for (std::size_t col = 0; col < m.cols(); ++col) {
      double got = 0.0;
      for (std::size_t r = 0; r < m.rows(); ++r) got += m.at(r, col);
      CHECK(std::abs(got - want) <= 1e-12);
    }
  }
}

TEST_CASE("matrix-vector products equal the convolution routines") {
  verify::Rng rng(33);
  for (int c = 0; c < 60; ++c) {
    const Shape s = verify::random_shape(rng, 3, 5);
    const Kernel h = verify::random_kernel(rng, s, 2);
    const Tensor x = verify::random_tensor(rng, s);
    const ExplicitConvMatrix m = build_matrix(h, s);

    const std::vector<double> forward = matvec(m, vectorize(x));
    const Tensor conv = conv_full(x, h);
    REQUIRE(forward.size() == conv.size());
    for (std::size_t i = 0; i < forward.size(); ++i)
      CHECK(std::abs(forward[i] - conv[i]) <= 1e-12);

    const Tensor y = verify::random_tensor(rng, conv.shape());
    const std::vector<double> back = transpose_matvec(m, vectorize(y));
    const Tensor adj = adjoint_apply(y, h, s);
    REQUIRE(back.size() == adj.size());
    for (std::size_t i = 0; i < back.size(); ++i)
      CHECK(std::abs(back[i] - adj[i]) <= 1e-12);
  }
}

TEST_CASE("oversized matrices are refused") {
  const Kernel h(Tensor(Shape({3, 3}), std::vector<double>(9, 1.0)));
  CHECK_THROWS_AS(build_matrix(h, Shape({2000, 2000})), ShapeError);
}

TEST_CASE("dimension and length mismatches are rejected") {
  const Kernel h(Tensor(Shape({3}), {1.0, 2.0, 3.0}));
  CHECK_THROWS_AS(build_matrix(h, Shape({2, 2})), ShapeError);

  const ExplicitConvMatrix m = build_matrix(h, Shape({2}));
  CHECK_THROWS_AS(matvec(m, std::vector<double>{1.0}), ShapeError);
  CHECK_THROWS_AS(transpose_matvec(m, std::vector<double>{1.0, 2.0}), ShapeError);
}
