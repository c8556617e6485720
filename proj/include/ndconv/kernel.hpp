#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "ndconv/error.hpp"
#include "ndconv/tensor.hpp"

namespace ndconv {

// Convolution kernel. Every extent is odd, 2p+1, so the kernel has a center
// and per-dimension radii p.
class Kernel {
 public:
  explicit Kernel(Tensor t) : tensor_(std::move(t)) {
    radii_.reserve(tensor_.shape().ndim());
    for (std::size_t e : tensor_.shape().extents()) {
      if (e % 2 == 0)
        throw ShapeError("Kernel: extents must be odd, got " +
                         tensor_.shape().to_string());
      radii_.push_back((e - 1) / 2);
    }
    if (!all_finite(tensor_)) throw NumericError("Kernel: values must be finite");
  }

  const Tensor& tensor() const { return tensor_; }
  const Shape& shape() const { return tensor_.shape(); }
  std::size_t ndim() const { return tensor_.shape().ndim(); }
  const std::vector<std::size_t>& radii() const { return radii_; }
  std::size_t radius(std::size_t dim) const { return radii_[dim]; }

 private:
  Tensor tensor_;
  std::vector<std::size_t> radii_;
};

// Reversal along every axis: out(s) = in(2p - s) per dimension. In row-major
// storage that is exactly the reversed flat buffer.
inline Kernel flip(const Kernel& h) {
  std::vector<double> data = h.tensor().data();
  std::reverse(data.begin(), data.end());
  return Kernel(Tensor(h.tensor().shape(), std::move(data)));
}

}  // namespace ndconv
