#pragma once

// Shared test utilities. direct_index_matrix builds the convolution matrix a
// second, structurally different way (scan every output/input index pair), so
// tests can cross-check the recursive block construction against it.

#include <cstddef>
#include <vector>

#include "ndconv/convolution.hpp"
#include "ndconv/explicit_matrix.hpp"
#include "ndconv/kernel.hpp"
#include "ndconv/shape.hpp"
#include "ndconv/solvers.hpp"
#include "ndconv/tensor.hpp"

namespace testutil {

// Entry (row, col) is h[out_index - in_index] where the difference is taken
// per dimension and must land inside the kernel box; zero otherwise.
inline ndconv::ExplicitConvMatrix direct_index_matrix(const ndconv::Kernel& h,
                                                      const ndconv::Shape& x_shape) {
  using namespace ndconv;
  const Shape out_shape = conv_output_shape(x_shape, h);
  const std::size_t rows = out_shape.element_count();
  const std::size_t cols = x_shape.element_count();
  const std::size_t nd = x_shape.ndim();
  ExplicitConvMatrix m(rows, cols);
  std::vector<std::size_t> h_idx(nd);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<std::size_t> out_idx = unflatten(out_shape, r);
    for (std::size_t c = 0; c < cols; ++c) {
      const std::vector<std::size_t> in_idx = unflatten(x_shape, c);
      bool inside = true;
      for (std::size_t d = 0; d < nd && inside; ++d) {
        if (out_idx[d] < in_idx[d] ||
            out_idx[d] - in_idx[d] >= h.shape().extent(d)) {
          inside = false;
        } else {
          h_idx[d] = out_idx[d] - in_idx[d];
        }
      }
      if (inside) m.at(r, c) = h.tensor().at(h_idx);
    }
  }
  return m;
}

// Central-difference gradient of the least-squares objective, one coordinate
// at a time. Slow; for small instances only.
inline ndconv::Tensor fd_gradient(const ndconv::Tensor& x, const ndconv::Tensor& y,
                                  const ndconv::Kernel& h, double step = 1e-6) {
  using namespace ndconv;
  Tensor g = Tensor::zeros(x.shape());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double fp = objective(probe, y, h);
    probe[i] = x[i] - step;
    const double fm = objective(probe, y, h);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace testutil
