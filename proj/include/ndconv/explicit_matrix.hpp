#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ndconv/convolution.hpp"
#include "ndconv/error.hpp"
#include "ndconv/kernel.hpp"
#include "ndconv/shape.hpp"
#include "ndconv/tensor.hpp"

namespace ndconv {

// Dense realizations are for oracle checks only; requests above this entry
// count are rejected.
inline constexpr std::size_t kExplicitMatrixMaxEntries = 10'000'000;

// Dense row-major matrix realization of the convolution operator. Each column
// is a shifted copy of the vectorized kernel, arranged block-Toeplitz.
class ExplicitConvMatrix {
 public:
  ExplicitConvMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

  const std::vector<double>& entries() const { return entries_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

namespace detail {

// Builds the matrix for the trailing dimensions [dim, ndim) of the kernel
// slice starting at hoff. Base case is the banded Toeplitz with the 1-d
// kernel values down each column; the step from n-1 to n stamps the slice
// matrices into the block-banded pattern along block diagonals.
inline ExplicitConvMatrix build_block(const Kernel& h, const Shape& x_shape,
                                      std::size_t dim, std::size_t hoff) {
  const std::size_t d = x_shape.extent(dim);
  const std::size_t k = h.tensor().shape().extent(dim);  // 2p + 1
  const std::size_t rows1 = d + 2 * h.radius(dim);

  if (dim + 1 == x_shape.ndim()) {
    ExplicitConvMatrix m(rows1, d);
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t j = 0; j < k; ++j)
        m.at(c + j, c) = h.tensor()[hoff + j];
    return m;
  }

  const std::size_t hstride = strides_of(h.tensor().shape())[dim];
  std::vector<ExplicitConvMatrix> slices;
  slices.reserve(k);
  for (std::size_t j = 0; j < k; ++j)
    slices.push_back(build_block(h, x_shape, dim + 1, hoff + j * hstride));

  const std::size_t sub_rows = slices.front().rows();
  const std::size_t sub_cols = slices.front().cols();
  ExplicitConvMatrix m(rows1 * sub_rows, d * sub_cols);
  for (std::size_t bc = 0; bc < d; ++bc) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t br = bc + j;
      const ExplicitConvMatrix& s = slices[j];
      for (std::size_t r = 0; r < sub_rows; ++r)
        for (std::size_t c = 0; c < sub_cols; ++c)
          m.at(br * sub_rows + r, bc * sub_cols + c) = s.at(r, c);
    }
  }
  return m;
}

}  // namespace detail

// Materializes A such that A * vectorize(x) == vectorize(conv_full(x, h)) for
// every x of the given shape.
inline ExplicitConvMatrix build_matrix(const Kernel& h, const Shape& x_shape) {
  if (h.ndim() != x_shape.ndim())
    throw ShapeError("build_matrix: " + std::to_string(x_shape.ndim()) +
                     "-d shape vs " + std::to_string(h.ndim()) + "-d kernel");
  const Shape out_shape = conv_output_shape(x_shape, h);
  const std::size_t rows = out_shape.element_count();
  const std::size_t cols = x_shape.element_count();
  if (cols != 0 && rows > kExplicitMatrixMaxEntries / cols)
    throw ShapeError("build_matrix: " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " exceeds the oracle-scale cap");
  return detail::build_block(h, x_shape, 0, 0);
}

inline std::vector<double> matvec(const ExplicitConvMatrix& a,
                                  std::span<const double> v) {
  if (v.size() != a.cols())
    throw ShapeError("matvec: vector length " + std::to_string(v.size()) +
                     " vs " + std::to_string(a.cols()) + " columns");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) acc += a.at(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

inline std::vector<double> transpose_matvec(const ExplicitConvMatrix& a,
                                            std::span<const double> v) {
  if (v.size() != a.rows())
    throw ShapeError("transpose_matvec: vector length " + std::to_string(v.size()) +
                     " vs " + std::to_string(a.rows()) + " rows");
  std::vector<double> out(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out[c] += a.at(r, c) * v[r];
  return out;
}

}  // namespace ndconv
