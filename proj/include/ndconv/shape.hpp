#pragma once

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ndconv/error.hpp"

namespace ndconv {

// Extents of a dense n-dimensional array. At least one dimension, every
// extent at least one, total element count representable in std::size_t.
class Shape {
 public:
  explicit Shape(std::vector<std::size_t> extents) : extents_(std::move(extents)) {
    if (extents_.empty()) throw ShapeError("Shape: need at least one dimension");
    std::size_t count = 1;
    for (std::size_t e : extents_) {
      if (e == 0) throw ShapeError("Shape: extents must be positive");
      if (e > std::numeric_limits<std::size_t>::max() / count)
        throw ShapeError("Shape: element count overflows");
      count *= e;
    }
    count_ = count;
  }

  Shape(std::initializer_list<std::size_t> extents)
      : Shape(std::vector<std::size_t>(extents)) {}

  std::size_t ndim() const { return extents_.size(); }
  std::size_t extent(std::size_t dim) const { return extents_[dim]; }
  const std::vector<std::size_t>& extents() const { return extents_; }
  std::size_t element_count() const { return count_; }

  bool operator==(const Shape& other) const { return extents_ == other.extents_; }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < extents_.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(extents_[i]);
    }
    return s;
  }

 private:
  std::vector<std::size_t> extents_;
  std::size_t count_;
};

// Row-major strides: first index varies slowest, last index is contiguous.
inline std::vector<std::size_t> strides_of(const Shape& s) {
  std::vector<std::size_t> st(s.ndim());
  std::size_t acc = 1;
  for (std::size_t i = s.ndim(); i-- > 0;) {
    st[i] = acc;
    acc *= s.extent(i);
  }
  return st;
}

// Lexicographic flat position of a multi-index, first index most significant.
inline std::size_t flat_index(const Shape& s, std::span<const std::size_t> idx) {
  if (idx.size() != s.ndim())
    throw BoundsError("flat_index: index has " + std::to_string(idx.size()) +
                      " entries for a " + std::to_string(s.ndim()) + "-d shape");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < s.ndim(); ++i) {
    if (idx[i] >= s.extent(i))
      throw BoundsError("flat_index: index " + std::to_string(idx[i]) +
                        " out of range for extent " + std::to_string(s.extent(i)) +
                        " in dimension " + std::to_string(i));
    flat = flat * s.extent(i) + idx[i];
  }
  return flat;
}

inline std::vector<std::size_t> unflatten(const Shape& s, std::size_t flat) {
  std::vector<std::size_t> idx(s.ndim());
  for (std::size_t i = s.ndim(); i-- > 0;) {
    idx[i] = flat % s.extent(i);
    flat /= s.extent(i);
  }
  return idx;
}

// Advances a multi-index in row-major order; false once the last one wraps.
inline bool next_index(const Shape& s, std::span<std::size_t> idx) {
  for (std::size_t i = s.ndim(); i-- > 0;) {
    if (++idx[i] < s.extent(i)) return true;
    idx[i] = 0;
  }
  return false;
}

}  // namespace ndconv
