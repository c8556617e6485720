#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ndconv/error.hpp"
#include "ndconv/kernel.hpp"
#include "ndconv/shape.hpp"
#include "ndconv/tensor.hpp"

namespace ndconv::sim {

struct NoiseSpec {
  double mean = 0.0;
  double std_dev = 0.0;
  std::uint64_t seed = 0;
};

struct PsfSpec {
  enum class Kind { gaussian, delta, custom };
  Kind kind = Kind::gaussian;
  std::vector<std::size_t> size{5, 5};
  double sigma = 1.0;
  std::optional<Tensor> values{};
};

// Black background with n straight one-pixel-wide segments through the image
// center at angles i*pi/n. Crossing pixels keep the line intensity.
inline Tensor phantom_lines(std::size_t rows, std::size_t cols, std::size_t n_lines,
                            double intensity) {
  if (rows < 3 || cols < 3)
    throw ShapeError("phantom_lines: size must be at least 3x3");
  if (n_lines < 1) throw Error("phantom_lines: need at least one line");

  Tensor img = Tensor::zeros(Shape{rows, cols});
  const double cr = static_cast<double>(rows / 2);
  const double cc = static_cast<double>(cols / 2);
  const double pi = 3.14159265358979323846;

  for (std::size_t i = 0; i < n_lines; ++i) {
    const double theta = pi * static_cast<double>(i) / static_cast<double>(n_lines);
    const double dr = std::sin(theta);
    const double dc = std::cos(theta);
    if (std::abs(dc) >= std::abs(dr)) {
      const double slope = dr / dc;
      for (std::size_t c = 0; c < cols; ++c) {
        const long r = std::lround(cr + (static_cast<double>(c) - cc) * slope);
        if (r >= 0 && r < static_cast<long>(rows))
          img[static_cast<std::size_t>(r) * cols + c] = intensity;
      }
    } else {
      const double slope = dc / dr;
      for (std::size_t r = 0; r < rows; ++r) {
        const long c = std::lround(cc + (static_cast<double>(r) - cr) * slope);
        if (c >= 0 && c < static_cast<long>(cols))
          img[r * cols + static_cast<std::size_t>(c)] = intensity;
      }
    }
  }
  return img;
}

// Deterministic grayscale test pattern in [0, 255]: smooth waves, a bright
// disk, and a striped band. Stands in for an unavailable reference photo.
inline Tensor phantom_texture(std::size_t rows, std::size_t cols) {
  if (rows < 3 || cols < 3)
    throw ShapeError("phantom_texture: size must be at least 3x3");
  const double pi = 3.14159265358979323846;
  Tensor img = Tensor::zeros(Shape{rows, cols});
  const double rn = static_cast<double>(rows);
  const double cn = static_cast<double>(cols);
  const double disk_r = 0.15 * std::min(rn, cn);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double rr = static_cast<double>(r);
      const double cc = static_cast<double>(c);
      double v = 90.0 + 60.0 * std::sin(2 * pi * 2.0 * rr / rn) *
                            std::cos(2 * pi * 3.0 * cc / cn);
      const double dr = rr - 0.3 * rn;
      const double dc = cc - 0.35 * cn;
      if (dr * dr + dc * dc <= disk_r * disk_r) v += 90.0;
      if (rr >= 0.65 * rn && rr < 0.78 * rn && std::fmod(cc, 16.0) < 8.0) v += 70.0;
      img[r * cols + c] = std::min(255.0, std::max(0.0, v));
    }
  }
  return img;
}

// Sampled Gaussian bump exp(-sum (s_i - p_i)^2 / (2 sigma^2)), normalized to
// unit sum.
inline Kernel gaussian_psf(const std::vector<std::size_t>& extents, double sigma) {
  if (!(sigma > 0)) throw NumericError("gaussian_psf: sigma must be positive");
  const Shape s{extents};
  std::vector<std::size_t> radii(s.ndim());
  for (std::size_t i = 0; i < s.ndim(); ++i) {
    if (s.extent(i) % 2 == 0)
      throw ShapeError("gaussian_psf: extents must be odd, got " + s.to_string());
    radii[i] = (s.extent(i) - 1) / 2;
  }
  std::vector<double> vals(s.element_count());
  std::vector<std::size_t> idx(s.ndim(), 0);
  double total = 0.0;
  for (std::size_t f = 0; f < vals.size(); ++f) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < s.ndim(); ++i) {
      const double d = static_cast<double>(idx[i]) - static_cast<double>(radii[i]);
      d2 += d * d;
    }
    vals[f] = std::exp(-d2 / (2.0 * sigma * sigma));
    total += vals[f];
    next_index(s, idx);
  }
  for (double& v : vals) v /= total;
  return Kernel(Tensor(s, std::move(vals)));
}

inline Kernel delta_psf(const std::vector<std::size_t>& extents) {
  const Shape s{extents};
  Tensor t = Tensor::zeros(s);
  std::vector<std::size_t> center(s.ndim());
  for (std::size_t i = 0; i < s.ndim(); ++i) center[i] = s.extent(i) / 2;
  t[flat_index(s, center)] = 1.0;
  return Kernel(std::move(t));
}

inline Kernel make_psf(const PsfSpec& spec) {
  switch (spec.kind) {
    case PsfSpec::Kind::gaussian:
      return gaussian_psf(spec.size, spec.sigma);
    case PsfSpec::Kind::delta:
      return delta_psf(spec.size);
    case PsfSpec::Kind::custom: {
      if (!spec.values) throw Error("make_psf: custom PSF needs values");
      for (double v : spec.values->data())
        if (v < 0.0) throw NumericError("make_psf: PSF values must be nonnegative");
      return Kernel(*spec.values);
    }
  }
  throw Error("make_psf: unknown kind");
}

namespace detail {

// Gaussian sampler: mt19937_64 driving Box-Muller on 53-bit uniforms. The
// algorithm is fixed so that a (shape, spec) pair reproduces the same noise
// on every platform; samples are drawn in flat storage order.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] keeps the log finite; u2 in [0,1).
    const double u1 =
        (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace detail

// Adds i.i.d. Gaussian(mean, std_dev) samples. Deterministic in (shape,
// spec); the values of t do not influence the noise. Output is not clamped.
inline Tensor add_gaussian_noise(const Tensor& t, const NoiseSpec& spec) {
  if (spec.std_dev < 0) throw NumericError("add_gaussian_noise: std_dev must be >= 0");
  detail::GaussianSource source(spec.seed);
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = t[i] + spec.mean + spec.std_dev * source.next();
  return Tensor(t.shape(), std::move(out));
}

// 10 log10 of reference energy over error energy; +infinity when the error is
// exactly zero.
inline double snr_db(const Tensor& reference, const Tensor& estimate) {
  ndconv::detail::check_same_shape(reference, estimate, "snr_db");
  double ref_energy = 0.0;
  double err_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref_energy += reference[i] * reference[i];
    const double e = estimate[i] - reference[i];
    err_energy += e * e;
  }
  if (ref_energy == 0.0)
    throw NumericError("snr_db: reference is all zero, metric undefined");
  if (err_energy == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ref_energy / err_energy);
}

}  // namespace ndconv::sim
