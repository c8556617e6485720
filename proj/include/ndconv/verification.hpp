#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ndconv/convolution.hpp"
#include "ndconv/explicit_matrix.hpp"
#include "ndconv/kernel.hpp"
#include "ndconv/shape.hpp"
#include "ndconv/tensor.hpp"

// Randomized cross checks between the direct convolution routines and the
// explicit banded-block matrix construction. The two routes share no code
// beyond the tensor containers, so agreement on random instances is strong
// evidence both are right.

namespace ndconv::verify {

using Rng = std::mt19937_64;

inline Shape random_shape(Rng& rng, std::size_t max_ndim, std::size_t max_extent) {
  std::uniform_int_distribution<std::size_t> ndim_dist(1, max_ndim);
  std::uniform_int_distribution<std::size_t> ext_dist(1, max_extent);
  const std::size_t ndim = ndim_dist(rng);
  std::vector<std::size_t> extents(ndim);
  for (auto& e : extents) e = ext_dist(rng);
  return Shape(std::move(extents));
}

inline Tensor random_tensor(Rng& rng, const Shape& shape) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor t = Tensor::zeros(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
  return t;
}

// Random kernel with the same dimensionality as `data_shape`, odd extents,
// per-dimension radius up to `max_radius`.
inline Kernel random_kernel(Rng& rng, const Shape& data_shape, std::size_t max_radius) {
  std::uniform_int_distribution<std::size_t> rad_dist(0, max_radius);
  std::vector<std::size_t> extents(data_shape.ndim());
  for (auto& e : extents) e = 2 * rad_dist(rng) + 1;
  Shape kshape(std::move(extents));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> values(kshape.element_count());
  for (auto& v : values) v = dist(rng);
  return Kernel(Tensor(std::move(kshape), std::move(values)));
}

struct VerifyOptions {
  std::size_t cases = 200;
  std::size_t max_ndim = 3;
  std::size_t max_extent = 5;
  std::size_t max_radius = 2;
  std::uint64_t seed = 20240915;
};

struct PropertyCheck {
  std::string name;
  std::size_t cases_run = 0;
  double worst_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

namespace detail {

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace detail

// Forward route: matrix-vector product against the explicit operator matrix
// must reproduce the zero-padded convolution exactly (up to accumulation
// order in the dot products).
inline PropertyCheck check_forward_matrix(const VerifyOptions& opt) {
  PropertyCheck result{"forward matrix matches convolution", 0, 0.0, 1e-12, false};
  Rng rng(opt.seed);
  for (std::size_t c = 0; c < opt.cases; ++c) {
    const Shape shape = random_shape(rng, opt.max_ndim, opt.max_extent);
    const Kernel kernel = random_kernel(rng, shape, opt.max_radius);
    const Tensor x = random_tensor(rng, shape);
    const ExplicitConvMatrix mat = build_matrix(kernel, shape);
    const std::vector<double> via_matrix = matvec(mat, vectorize(x));
    const Tensor via_conv = conv_full(x, kernel);
    result.worst_error =
        std::max(result.worst_error, detail::max_abs_diff(via_matrix, via_conv.data()));
    ++result.cases_run;
  }
  result.passed = result.worst_error <= result.tolerance;
  return result;
}

// Transpose route: multiplying by the transposed matrix must reproduce
// flip-convolve-crop.
inline PropertyCheck check_transpose_matrix(const VerifyOptions& opt) {
  PropertyCheck result{"matrix transpose matches flip-convolve-crop", 0, 0.0, 1e-12,
                       false};
  Rng rng(opt.seed + 1);
  for (std::size_t c = 0; c < opt.cases; ++c) {
    const Shape shape = random_shape(rng, opt.max_ndim, opt.max_extent);
    const Kernel kernel = random_kernel(rng, shape, opt.max_radius);
    const Shape out_shape = conv_output_shape(shape, kernel);
    const Tensor y = random_tensor(rng, out_shape);
    const ExplicitConvMatrix mat = build_matrix(kernel, shape);
    const std::vector<double> via_matrix = transpose_matvec(mat, vectorize(y));
    const Tensor via_conv = adjoint_apply(y, kernel, shape);
    result.worst_error =
        std::max(result.worst_error, detail::max_abs_diff(via_matrix, via_conv.data()));
    ++result.cases_run;
  }
  result.passed = result.worst_error <= result.tolerance;
  return result;
}

// Adjoint identity <Ax, y> == <x, A^T y>, checked without any matrix at all.
// Relative tolerance since the inner products grow with problem size.
inline PropertyCheck check_adjoint_identity(const VerifyOptions& opt) {
  PropertyCheck result{"adjoint identity <Ax,y> == <x,A'y>", 0, 0.0, 1e-10, false};
  Rng rng(opt.seed + 2);
  for (std::size_t c = 0; c < opt.cases; ++c) {
    const Shape shape = random_shape(rng, opt.max_ndim, opt.max_extent);
    const Kernel kernel = random_kernel(rng, shape, opt.max_radius);
    const Tensor x = random_tensor(rng, shape);
    const Tensor y = random_tensor(rng, conv_output_shape(shape, kernel));
    const double lhs = dot(conv_full(x, kernel), y);
    const double rhs = dot(x, adjoint_apply(y, kernel, shape));
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    result.worst_error = std::max(result.worst_error, std::abs(lhs - rhs) / scale);
    ++result.cases_run;
  }
  result.passed = result.worst_error <= result.tolerance;
  return result;
}

inline std::vector<PropertyCheck> run_property_checks(const VerifyOptions& opt) {
  return {check_forward_matrix(opt), check_transpose_matrix(opt),
          check_adjoint_identity(opt)};
}

}  // namespace ndconv::verify
