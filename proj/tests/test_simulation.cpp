#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "ndconv/convolution.hpp"
#include "ndconv/simulation.hpp"

using namespace ndconv;

TEST_CASE("lines phantom is deterministic and binary-valued") {
  const Tensor a = sim::phantom_lines(128, 128, 9, 255.0);
  const Tensor b = sim::phantom_lines(128, 128, 9, 255.0);
  CHECK(a == b);

  std::size_t lit = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i] == 0.0 || a[i] == 255.0));
    if (a[i] != 0.0) ++lit;
  }
  // Nine full-width strokes through the center, minus crossings.
  CHECK(lit >= 9 * 128 - 200);
  CHECK(lit <= 9 * 128);
}

TEST_CASE("line count changes the drawing") {
  CHECK_FALSE(sim::phantom_lines(64, 64, 5, 255.0) ==
              sim::phantom_lines(64, 64, 7, 255.0));
}

TEST_CASE("texture phantom is deterministic and within display range") {
  const Tensor a = sim::phantom_texture(64, 96);
  CHECK(a == sim::phantom_texture(64, 96));
  CHECK(a.shape() == Shape({64, 96}));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lo = std::min(lo, a[i]);
    hi = std::max(hi, a[i]);
  }
  CHECK(lo >= 0.0);
  CHECK(hi <= 255.0);
  CHECK(hi - lo > 50.0);  // actually textured, not flat
}

TEST_CASE("gaussian blur kernel matches the closed form") {
  const Kernel g = sim::gaussian_psf({5, 5}, 1.0);
  CHECK(g.shape() == Shape({5, 5}));
  CHECK(std::abs(g.tensor().at({2, 2}) - 0.162102821637) <= 1e-11);
  CHECK(std::abs(g.tensor().at({0, 0}) - 0.002969016744) <= 1e-11);
  CHECK(std::abs(sum(g.tensor()) - 1.0) <= 1e-14);

  // Symmetric under flips of either axis.
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c)
      CHECK(g.tensor().at({r, c}) == Catch::Approx(g.tensor().at({4 - r, 4 - c})));

  CHECK_THROWS_AS(sim::gaussian_psf({4, 5}, 1.0), ShapeError);
  CHECK_THROWS_AS(sim::gaussian_psf({5, 5}, 0.0), NumericError);
  CHECK_THROWS_AS(sim::gaussian_psf({5, 5}, -2.0), NumericError);
}

TEST_CASE("delta kernel is a centered unit impulse") {
  const Kernel d = sim::delta_psf({3, 5});
  CHECK(sum(d.tensor()) == 1.0);
  CHECK(d.tensor().at({1, 2}) == 1.0);
}

TEST_CASE("noise is reproducible from its seed") {
  const Tensor clean = sim::phantom_texture(32, 32);
  const Tensor n1 = sim::add_gaussian_noise(clean, {0.0, 5.0, 99});
  const Tensor n2 = sim::add_gaussian_noise(clean, {0.0, 5.0, 99});
  const Tensor n3 = sim::add_gaussian_noise(clean, {0.0, 5.0, 100});
  CHECK(n1 == n2);
  CHECK_FALSE(n1 == n3);
}

TEST_CASE("noise draws do not depend on the signal") {
  const Tensor a = Tensor::zeros(Shape({40, 40}));
  const Tensor b = Tensor::filled(Shape({40, 40}), 7.0);
  const Tensor na = sim::add_gaussian_noise(a, {0.0, 2.0, 7});
  const Tensor nb = sim::add_gaussian_noise(b, {0.0, 2.0, 7});
  for (std::size_t i = 0; i < na.size(); ++i)
    CHECK(na[i] == Catch::Approx(nb[i] - 7.0).margin(1e-12));
}

TEST_CASE("noise sample statistics match the specification") {
  const Tensor zeros = Tensor::zeros(Shape({200, 200}));
  const Tensor noisy = sim::add_gaussian_noise(zeros, {3.0, 5.0, 4242});
  const std::size_t n = noisy.size();
  double mean = sum(noisy) / static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += (noisy[i] - mean) * (noisy[i] - mean);
  var /= static_cast<double>(n - 1);
  // 5-sigma bands for the sample mean and a loose band for the variance.
  CHECK(std::abs(mean - 3.0) <= 5.0 * 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(std::sqrt(var) - 5.0) <= 0.15);
}

TEST_CASE("zero noise deviation shifts by the mean only") {
  const Tensor clean = sim::phantom_texture(16, 16);
  const Tensor shifted = sim::add_gaussian_noise(clean, {2.5, 0.0, 1});
  for (std::size_t i = 0; i < clean.size(); ++i)
    CHECK(shifted[i] == clean[i] + 2.5);
  CHECK_THROWS_AS(sim::add_gaussian_noise(clean, {0.0, -1.0, 1}), NumericError);
}

TEST_CASE("snr follows the decibel definition") {
  const Tensor ref(Shape({2}), {3.0, 4.0});
  const Tensor est(Shape({2}), {3.0, 3.0});
  CHECK(std::abs(sim::snr_db(ref, est) - 13.979400086720) <= 1e-11);
  CHECK(std::isinf(sim::snr_db(ref, ref)));
  CHECK(sim::snr_db(ref, ref) > 0.0);

  CHECK_THROWS_AS(sim::snr_db(Tensor::zeros(Shape({2})), est), NumericError);
  CHECK_THROWS_AS(sim::snr_db(ref, Tensor::zeros(Shape({3}))), ShapeError);
}

TEST_CASE("blur-then-estimate improves over a known-noise baseline") {
  // End-to-end sanity of the simulation pieces together: blurring plus mild
  // noise still leaves the observation closer to the blurred image than to
  // pure noise.
  const Tensor truth = sim::phantom_lines(48, 48, 5, 255.0);
  const Kernel psf = sim::gaussian_psf({5, 5}, 1.0);
  const Tensor blurred = conv_full(truth, psf);
  const Tensor observed = sim::add_gaussian_noise(blurred, {0.0, 5.0, 31});
  CHECK(sim::snr_db(blurred, observed) > 10.0);
}
