#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ndconv/error.hpp"
#include "ndconv/shape.hpp"

namespace ndconv {

// Guarded division returns zero wherever |denominator| falls below this.
inline constexpr double kDivEpsilon = 1e-12;

// Dense n-dimensional array of doubles, stored row-major: the first index
// varies slowest, so flattening concatenates the slices along dimension one.
class Tensor {
 public:
  Tensor(Shape shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.element_count())
      throw ShapeError("Tensor: got " + std::to_string(data_.size()) +
                       " values for shape " + shape_.to_string());
  }

  static Tensor zeros(const Shape& s) {
    return Tensor(s, std::vector<double>(s.element_count(), 0.0));
  }

  static Tensor filled(const Shape& s, double value) {
    return Tensor(s, std::vector<double>(s.element_count(), value));
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<double>& data() const { return data_; }

  double operator[](std::size_t flat) const { return data_[flat]; }
  double& operator[](std::size_t flat) { return data_[flat]; }

  double at(std::span<const std::size_t> idx) const {
    return data_[flat_index(shape_, idx)];
  }
  double& at(std::span<const std::size_t> idx) {
    return data_[flat_index(shape_, idx)];
  }
  double at(std::initializer_list<std::size_t> idx) const {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
  }
  double& at(std::initializer_list<std::size_t> idx) {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
  }

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Flattened view in storage order; bijective with devectorize given the shape.
inline const std::vector<double>& vectorize(const Tensor& t) { return t.data(); }

inline Tensor devectorize(const Shape& s, std::vector<double> data) {
  return Tensor(s, std::move(data));
}

inline bool all_finite(const Tensor& t) {
  for (double v : t.data())
    if (!std::isfinite(v)) return false;
  return true;
}

namespace detail {

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!(a.shape() == b.shape()))
    throw ShapeError(std::string(what) + ": shape " + a.shape().to_string() +
                     " vs " + b.shape().to_string());
}

template <class F>
Tensor zip(const Tensor& a, const Tensor& b, const char* what, F&& f) {
  check_same_shape(a, b, what);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  return Tensor(a.shape(), std::move(out));
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) {
  return detail::zip(a, b, "add", [](double x, double y) { return x + y; });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  return detail::zip(a, b, "sub", [](double x, double y) { return x - y; });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  return detail::zip(a, b, "mul", [](double x, double y) { return x * y; });
}

// Elementwise a/b with zero wherever |b| < kDivEpsilon.
inline Tensor guarded_div(const Tensor& a, const Tensor& b) {
  return detail::zip(a, b, "guarded_div", [](double x, double y) {
    return std::abs(y) < kDivEpsilon ? 0.0 : x / y;
  });
}

inline Tensor scale(const Tensor& t, double factor) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i] * factor;
  return Tensor(t.shape(), std::move(out));
}

// max{v, 0} per element.
inline Tensor clamp_nonneg(const Tensor& t) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i] < 0.0 ? 0.0 : t[i];
  return Tensor(t.shape(), std::move(out));
}

inline double sum(const Tensor& t) {
  double acc = 0.0;
  for (double v : t.data()) acc += v;
  return acc;
}

inline double dot(const Tensor& a, const Tensor& b) {
  detail::check_same_shape(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(const Tensor& t) { return std::sqrt(dot(t, t)); }

}  // namespace ndconv
