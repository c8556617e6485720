#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ndconv/error.hpp"
#include "ndconv/kernel.hpp"
#include "ndconv/shape.hpp"
#include "ndconv/tensor.hpp"

namespace ndconv {

// Upper bound on threads used inside conv_full. Results are identical for
// every thread count: each output element is a fixed-order sum computed by
// exactly one thread.
inline std::atomic<unsigned>& detail_thread_limit() {
  static std::atomic<unsigned> limit{1};
  return limit;
}

inline void set_max_threads(unsigned n) { detail_thread_limit() = n == 0 ? 1 : n; }
inline unsigned max_threads() { return detail_thread_limit().load(); }

// Full convolution output has extent d_i + 2 p_i in every dimension.
inline Shape conv_output_shape(const Shape& x_shape, const Kernel& h) {
  if (x_shape.ndim() != h.ndim())
    throw ShapeError("conv_full: " + std::to_string(x_shape.ndim()) +
                     "-d input vs " + std::to_string(h.ndim()) + "-d kernel");
  std::vector<std::size_t> out(x_shape.ndim());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = x_shape.extent(i) + 2 * h.radius(i);
  return Shape(std::move(out));
}

namespace detail {

struct ConvView {
  const double* x;
  const double* h;
  const std::size_t* xext;
  const std::size_t* hext;
  const std::size_t* xstr;
  const std::size_t* hstr;
  std::size_t ndim;
};

// One output element: y(s) = sum_j h(j) x(s - j) over the kernel indices j
// that keep s - j inside the input. The range is never empty for a full
// convolution output position.
inline double conv_element(const ConvView& v, const std::size_t* out_idx,
                           std::size_t dim, std::size_t xoff, std::size_t hoff) {
  const std::size_t s = out_idx[dim];
  const std::size_t d = v.xext[dim];
  const std::size_t jlo = s >= d ? s - d + 1 : 0;
  const std::size_t jhi = std::min(v.hext[dim] - 1, s);
  double acc = 0.0;
  if (dim + 1 == v.ndim) {
    const double* xp = v.x + xoff + (s - jlo);
    const double* hp = v.h + hoff + jlo;
    const std::size_t count = jhi - jlo + 1;
    for (std::size_t k = 0; k < count; ++k)
      acc += xp[-static_cast<std::ptrdiff_t>(k)] * hp[k];
  } else {
    for (std::size_t j = jlo; j <= jhi; ++j)
      acc += conv_element(v, out_idx, dim + 1, xoff + (s - j) * v.xstr[dim],
                          hoff + j * v.hstr[dim]);
  }
  return acc;
}

}  // namespace detail

// Full n-dimensional discrete convolution with zero padding: the kernel is
// treated as zero outside its support, the input as zero outside its extents.
// The kernel may be larger than the input.
inline Tensor conv_full(const Tensor& x, const Kernel& h) {
  const Shape out_shape = conv_output_shape(x.shape(), h);
  Tensor out = Tensor::zeros(out_shape);

  const std::vector<std::size_t> xstr = strides_of(x.shape());
  const std::vector<std::size_t> hstr = strides_of(h.tensor().shape());
  const detail::ConvView view{x.data().data(),
                              h.tensor().data().data(),
                              x.shape().extents().data(),
                              h.tensor().shape().extents().data(),
                              xstr.data(),
                              hstr.data(),
                              x.shape().ndim()};

  const std::size_t total = out_shape.element_count();
  auto run = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> idx = unflatten(out_shape, lo);
    for (std::size_t f = lo; f < hi; ++f) {
      out[f] = detail::conv_element(view, idx.data(), 0, 0, 0);
      next_index(out_shape, idx);
    }
  };

  constexpr std::size_t kGrain = 16384;
  const unsigned want = max_threads();
  const unsigned nthreads = static_cast<unsigned>(
      std::min<std::size_t>(want, total / kGrain + 1));
  if (nthreads <= 1) {
    run(0, total);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const std::size_t chunk = (total + nthreads - 1) / nthreads;
    for (unsigned t = 0; t < nthreads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(total, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

// Central crop removing an equal margin on every side of every dimension.
inline Tensor crop_center(const Tensor& t, const Shape& target) {
  if (t.shape().ndim() != target.ndim())
    throw ShapeError("crop_center: dimension count mismatch");
  std::vector<std::size_t> offset(target.ndim());
  for (std::size_t i = 0; i < target.ndim(); ++i) {
    const std::size_t te = t.shape().extent(i);
    const std::size_t ge = target.extent(i);
    if (te < ge || (te - ge) % 2 != 0)
      throw ShapeError("crop_center: cannot center " + target.to_string() +
                       " inside " + t.shape().to_string());
    offset[i] = (te - ge) / 2;
  }
  Tensor out = Tensor::zeros(target);
  const std::vector<std::size_t> tstr = strides_of(t.shape());
  std::vector<std::size_t> idx(target.ndim(), 0);
  for (std::size_t f = 0; f < target.element_count(); ++f) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < target.ndim(); ++i)
      src += (idx[i] + offset[i]) * tstr[i];
    out[f] = t[src];
    next_index(target, idx);
  }
  return out;
}

// The M operator: keeps indices 2p_i .. target_i + 2p_i - 1 per dimension of a
// tensor with extents target_i + 4p_i, restoring the pre-convolution shape.
inline Tensor crop_m(const Tensor& t, std::span<const std::size_t> radii,
                     const Shape& target) {
  if (t.shape().ndim() != target.ndim() || radii.size() != target.ndim())
    throw ShapeError("crop_m: dimension count mismatch");
  for (std::size_t i = 0; i < target.ndim(); ++i)
    if (t.shape().extent(i) != target.extent(i) + 4 * radii[i])
      throw ShapeError("crop_m: extent " + std::to_string(t.shape().extent(i)) +
                       " in dimension " + std::to_string(i) + " is not target + 4p");
  return crop_center(t, target);
}

// Applies the transpose of the convolution operator: A^T y computed as the
// flipped-kernel full convolution of y followed by the central crop M.
inline Tensor adjoint_apply(const Tensor& y, const Kernel& h, const Shape& x_shape) {
  if (y.shape().ndim() != h.ndim() || x_shape.ndim() != h.ndim())
    throw ShapeError("adjoint_apply: dimension count mismatch");
  for (std::size_t i = 0; i < x_shape.ndim(); ++i)
    if (y.shape().extent(i) != x_shape.extent(i) + 2 * h.radius(i))
      throw ShapeError("adjoint_apply: observation shape " + y.shape().to_string() +
                       " is not " + x_shape.to_string() + " + 2p");
  return crop_m(conv_full(y, flip(h)), h.radii(), x_shape);
}

// Gradient of f(x) = 0.5 ||x * h - y||^2, evaluated with convolutions only:
// A^T A x - A^T y.
inline Tensor normal_gradient(const Tensor& x, const Tensor& y, const Kernel& h) {
  const Shape out_shape = conv_output_shape(x.shape(), h);
  if (!(y.shape() == out_shape))
    throw ShapeError("normal_gradient: observation shape " + y.shape().to_string() +
                     " does not match forward model output " + out_shape.to_string());
  return sub(adjoint_apply(conv_full(x, h), h, x.shape()),
             adjoint_apply(y, h, x.shape()));
}

}  // namespace ndconv
