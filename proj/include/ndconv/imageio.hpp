#pragma once

#include <bit>
#include <cctype>
#include <cfenv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ndconv/error.hpp"
#include "ndconv/shape.hpp"
#include "ndconv/tensor.hpp"

namespace ndconv::io {

// --- NDTENSOR -------------------------------------------------------------
//
// Header line  "NDTENSOR <ndim> <d_1> ... <d_n>\n"  followed by
// element_count little-endian IEEE-754 float64 payload values in storage
// order (first index slowest). Round trips are bit exact.

namespace detail {

inline void put_le64(std::ostream& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

inline bool get_le64(std::istream& in, double& v) {
  char buf[8];
  if (!in.read(buf, 8)) return false;
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  v = std::bit_cast<double>(bits);
  return true;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace detail

inline void write_tensor(const Tensor& t, std::ostream& out) {
  if (!all_finite(t))
    throw NumericError("write_tensor: refusing to store non-finite values");
  out << "NDTENSOR " << t.shape().ndim();
  for (std::size_t e : t.shape().extents()) out << " " << e;
  out << "\n";
  for (double v : t.data()) detail::put_le64(out, v);
  if (!out) throw FormatError("write_tensor: stream failure");
}

inline void write_tensor(const Tensor& t, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_tensor(t, out);
}

inline Tensor read_tensor(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("read_tensor: missing header");
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != "NDTENSOR") throw FormatError("read_tensor: bad magic '" + magic + "'");
  long long ndim = -1;
  if (!(hs >> ndim) || ndim < 1)
    throw FormatError("read_tensor: dimension count must be a positive integer");
  std::vector<std::size_t> extents;
  extents.reserve(static_cast<std::size_t>(ndim));
  for (long long i = 0; i < ndim; ++i) {
    long long e = -1;
    if (!(hs >> e) || e < 1)
      throw FormatError("read_tensor: expected " + std::to_string(ndim) +
                        " positive extents");
    extents.push_back(static_cast<std::size_t>(e));
  }
  std::string junk;
  if (hs >> junk) throw FormatError("read_tensor: trailing tokens in header");

  Shape shape = [&] {
    try {
      return Shape(std::move(extents));
    } catch (const ShapeError& e) {
      throw FormatError(std::string("read_tensor: ") + e.what());
    }
  }();

  std::vector<double> data(shape.element_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!detail::get_le64(in, data[i]))
      throw FormatError("read_tensor: truncated payload at element " +
                        std::to_string(i));
    if (!std::isfinite(data[i]))
      throw FormatError("read_tensor: non-finite value at element " +
                        std::to_string(i));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError("read_tensor: trailing data after payload");
  return Tensor(std::move(shape), std::move(data));
}

inline Tensor read_tensor(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_tensor(in);
}

// --- PGM --------------------------------------------------------------------
//
// Binary (P5) and ASCII (P2) portable graymaps, maxval up to 65535. Reading
// yields raw sample values 0..maxval as doubles, shape (height, width).
// Writing emits 8-bit P5 with rounding half to even.

namespace detail {

// Next header token, skipping whitespace and '#' comments.
inline std::string pgm_token(std::istream& in) {
  int c = in.get();
  while (c != std::char_traits<char>::eof()) {
    if (c == '#') {
      while (c != std::char_traits<char>::eof() && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == std::char_traits<char>::eof())
    throw FormatError("read_pgm: unexpected end of header");
  std::string tok;
  while (c != std::char_traits<char>::eof() && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c != std::char_traits<char>::eof()) in.unget();
  return tok;
}

inline std::size_t pgm_uint(std::istream& in, const char* what, std::size_t max) {
  const std::string tok = pgm_token(in);
  std::size_t value = 0;
  if (tok.empty()) throw FormatError(std::string("read_pgm: missing ") + what);
  for (char ch : tok) {
    if (ch < '0' || ch > '9')
      throw FormatError(std::string("read_pgm: ") + what + " is not a number: '" +
                        tok + "'");
    value = value * 10 + static_cast<std::size_t>(ch - '0');
    if (value > max)
      throw FormatError(std::string("read_pgm: ") + what + " exceeds " +
                        std::to_string(max));
  }
  return value;
}

inline void pgm_expect_trailing_whitespace(std::istream& in) {
  int c = in.get();
  while (c != std::char_traits<char>::eof()) {
    if (!std::isspace(c)) throw FormatError("read_pgm: trailing data after samples");
    c = in.get();
  }
}

}  // namespace detail

inline Tensor read_pgm(std::istream& in) {
  const std::string magic = detail::pgm_token(in);
  if (magic != "P5" && magic != "P2")
    throw FormatError("read_pgm: bad magic '" + magic + "'");
  const std::size_t width = detail::pgm_uint(in, "width", 1u << 20);
  const std::size_t height = detail::pgm_uint(in, "height", 1u << 20);
  if (width == 0 || height == 0) throw FormatError("read_pgm: zero image dimension");
  const std::size_t maxval = detail::pgm_uint(in, "maxval", 65535);
  if (maxval == 0) throw FormatError("read_pgm: maxval must be positive");

  std::vector<double> data(width * height);
  if (magic == "P5") {
    const int sep = in.get();
    if (sep == std::char_traits<char>::eof() || !std::isspace(sep))
      throw FormatError("read_pgm: expected single whitespace before P5 payload");
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<char> buf(data.size() * bytes_per);
    if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size())))
      throw FormatError("read_pgm: truncated P5 payload");
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t v;
      if (bytes_per == 1) {
        v = static_cast<unsigned char>(buf[i]);
      } else {  // two-byte samples are big-endian
        v = (static_cast<std::size_t>(static_cast<unsigned char>(buf[2 * i])) << 8) |
            static_cast<unsigned char>(buf[2 * i + 1]);
      }
      if (v > maxval)
        throw FormatError("read_pgm: sample " + std::to_string(v) + " exceeds maxval");
      data[i] = static_cast<double>(v);
    }
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t v;
      try {
        v = detail::pgm_uint(in, "sample", 65535);
      } catch (const FormatError&) {
        throw FormatError("read_pgm: truncated or malformed P2 samples at index " +
                          std::to_string(i));
      }
      if (v > maxval)
        throw FormatError("read_pgm: sample " + std::to_string(v) + " exceeds maxval");
      data[i] = static_cast<double>(v);
    }
  }
  detail::pgm_expect_trailing_whitespace(in);
  return Tensor(Shape{height, width}, std::move(data));
}

inline Tensor read_pgm(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_pgm(in);
}

inline void write_pgm(const Tensor& t, std::ostream& out, bool clamp) {
  if (t.shape().ndim() != 2)
    throw ShapeError("write_pgm: need a 2-d tensor, got " + t.shape().to_string());
  const std::size_t height = t.shape().extent(0);
  const std::size_t width = t.shape().extent(1);
  std::vector<unsigned char> bytes(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double v = t[i];
    if (!std::isfinite(v)) throw NumericError("write_pgm: non-finite pixel");
    double r = std::nearbyint(v);  // round half to even
    if (clamp) {
      r = std::min(255.0, std::max(0.0, r));
    } else if (r < 0.0 || r > 255.0) {
      throw NumericError("write_pgm: pixel " + std::to_string(v) +
                         " outside [0,255] and clamping is off");
    }
    bytes[i] = static_cast<unsigned char>(r);
  }
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write_pgm: stream failure");
}

inline void write_pgm(const Tensor& t, const std::filesystem::path& path, bool clamp) {
  auto out = detail::open_output(path);
  write_pgm(t, out, clamp);
}

}  // namespace ndconv::io
