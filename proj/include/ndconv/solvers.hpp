#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ndconv/convolution.hpp"
#include "ndconv/error.hpp"
#include "ndconv/kernel.hpp"
#include "ndconv/shape.hpp"
#include "ndconv/tensor.hpp"

namespace ndconv {

struct DeconvConfig {
  std::size_t max_iters = 500;
  double tol_rel_objective = 1e-6;
  // Empty means 1 / lambda_max estimated by power iteration.
  std::optional<double> initial_step{};
  double backtrack_factor = 0.5;
  std::size_t max_backtracks = 50;
  std::size_t power_iters = 30;
};

struct RlConfig {
  std::size_t max_iters = 500;
  // Relative l2 change of the iterate below which the run stops. Zero runs
  // all max_iters.
  double tol_rel_change = 0.0;
};

enum class StopReason { converged, max_iters, stalled };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iters: return "max_iters";
    case StopReason::stalled: return "stalled";
  }
  return "unknown";
}

struct DeconvReport {
  Tensor estimate;
  // Objective at iterates 0..iterations_run. For the projected-gradient
  // solver the trace is strictly decreasing by construction of the line
  // search; Richardson-Lucy traces are informational only.
  std::vector<double> objective_trace;
  std::vector<double> kkt_trace;
  std::size_t iterations_run = 0;
  StopReason stop_reason = StopReason::max_iters;
  double wall_time_seconds = 0.0;
  // Observed pixels clamped to zero before Richardson-Lucy; zero for the
  // projected-gradient solver.
  std::size_t negative_pixels_clamped = 0;
};

namespace detail {

inline void validate(const DeconvConfig& cfg) {
  if (cfg.max_iters == 0) throw Error("DeconvConfig: max_iters must be positive");
  if (!(cfg.tol_rel_objective >= 0))
    throw Error("DeconvConfig: tol_rel_objective must be >= 0");
  if (cfg.initial_step && !(*cfg.initial_step > 0))
    throw Error("DeconvConfig: initial_step must be positive");
  if (!(cfg.backtrack_factor > 0) || !(cfg.backtrack_factor < 1))
    throw Error("DeconvConfig: backtrack_factor must be in (0,1)");
  if (cfg.max_backtracks == 0)
    throw Error("DeconvConfig: max_backtracks must be positive");
  if (cfg.power_iters == 0) throw Error("DeconvConfig: power_iters must be positive");
}

inline void validate(const RlConfig& cfg) {
  if (cfg.max_iters == 0) throw Error("RlConfig: max_iters must be positive");
  if (!(cfg.tol_rel_change >= 0)) throw Error("RlConfig: tol_rel_change must be >= 0");
}

inline void check_forward_shapes(const Tensor& y, const Kernel& h,
                                 const Shape& x_shape, const char* what) {
  const Shape expected = conv_output_shape(x_shape, h);
  if (!(y.shape() == expected))
    throw ShapeError(std::string(what) + ": observation shape " +
                     y.shape().to_string() + " does not match forward model output " +
                     expected.to_string());
}

inline bool kernel_all_zero(const Kernel& h) {
  for (double v : h.tensor().data())
    if (v != 0.0) return false;
  return true;
}

inline double kkt_from_gradient(const Tensor& x, const Tensor& g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max(worst, std::abs(std::min(x[i], g[i])));
  return worst;
}

class StopWatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// f(x) = 0.5 ||x * h - y||^2.
inline double objective(const Tensor& x, const Tensor& y, const Kernel& h) {
  Tensor r = sub(conv_full(x, h), y);
  return 0.5 * dot(r, r);
}

// Largest-eigenvalue reciprocal of A^T A via power iteration from the
// all-ones vector; the usable step size 1/lambda_max for gradient descent on
// the least-squares objective.
inline double estimate_step(const Kernel& h, const Shape& x_shape,
                            std::size_t power_iters) {
  if (power_iters == 0) throw Error("estimate_step: power_iters must be positive");
  if (detail::kernel_all_zero(h))
    throw NumericError("estimate_step: degenerate all-zero kernel");
  Tensor v = Tensor::filled(x_shape, 1.0);
  v = scale(v, 1.0 / norm2(v));
  double lambda = 0.0;
  for (std::size_t i = 0; i < power_iters; ++i) {
    Tensor w = adjoint_apply(conv_full(v, h), h, x_shape);
    lambda = norm2(w);
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw NumericError("estimate_step: degenerate convolution operator");
    v = scale(w, 1.0 / lambda);
  }
  return 1.0 / lambda;
}

// Max |min(x_i, g_i)| with g the least-squares gradient; zero exactly at
// first-order optima of min 0.5||Ax - y||^2 s.t. x >= 0.
inline double kkt_residual(const Tensor& x, const Tensor& y, const Kernel& h) {
  return detail::kkt_from_gradient(x, normal_gradient(x, y, h));
}

// Projected-gradient deconvolution. Every quantity is computed with
// convolutions: the gradient is crop(flip(h) * (h * x)) - crop(flip(h) * y),
// the update is max{x - delta * grad, 0}, and delta is backtracked until the
// objective strictly decreases.
inline DeconvReport deconv_pg(const Tensor& y, const Kernel& h, const Shape& x_shape,
                              const DeconvConfig& cfg = {}) {
  detail::validate(cfg);
  detail::check_forward_shapes(y, h, x_shape, "deconv_pg");
  if (detail::kernel_all_zero(h))
    throw NumericError("deconv_pg: degenerate all-zero kernel");

  const detail::StopWatch watch;
  const double step0 =
      cfg.initial_step ? *cfg.initial_step : estimate_step(h, x_shape, cfg.power_iters);

  const Tensor aty = adjoint_apply(y, h, x_shape);
  Tensor x = clamp_nonneg(aty);
  Tensor ax = conv_full(x, h);
  double f = [&] {
    Tensor r = sub(ax, y);
    return 0.5 * dot(r, r);
  }();

  std::vector<double> trace{f};
  std::vector<double> kkts;
  std::size_t iterations = 0;
  StopReason reason = StopReason::max_iters;

  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    const Tensor g = sub(adjoint_apply(ax, h, x_shape), aty);
    kkts.push_back(detail::kkt_from_gradient(x, g));

    double step = step0;
    bool accepted = false;
    bool fixed_point = false;
    Tensor x_next = x;
    Tensor ax_next = ax;
    double f_next = f;
    for (std::size_t b = 0; b <= cfg.max_backtracks; ++b) {
      Tensor trial = clamp_nonneg(sub(x, scale(g, step)));
      if (trial == x) {  // projection fixed point: first-order optimum
        fixed_point = true;
        break;
      }
      Tensor ax_trial = conv_full(trial, h);
      Tensor r = sub(ax_trial, y);
      const double f_trial = 0.5 * dot(r, r);
      if (f_trial < f) {
        x_next = std::move(trial);
        ax_next = std::move(ax_trial);
        f_next = f_trial;
        accepted = true;
        break;
      }
      step *= cfg.backtrack_factor;
    }

    if (fixed_point) {
      reason = StopReason::converged;
      break;
    }
    if (!accepted) {
      reason = StopReason::stalled;
      break;
    }

    const double drop = f - f_next;
    x = std::move(x_next);
    ax = std::move(ax_next);
    f = f_next;
    trace.push_back(f);
    iterations = k;

    if (drop <= cfg.tol_rel_objective * trace[trace.size() - 2]) {
      reason = StopReason::converged;
      break;
    }
  }

  if (kkts.size() < trace.size()) {
    const Tensor g = sub(adjoint_apply(ax, h, x_shape), aty);
    kkts.push_back(detail::kkt_from_gradient(x, g));
  }

  return DeconvReport{std::move(x), std::move(trace),   std::move(kkts),
                      iterations,   reason,             watch.seconds(),
                      0};
}

// Richardson-Lucy baseline expressed with the same operators:
//   x <- x .* adjoint(y ./ (x * h))
// with guarded division. The kernel is normalized to unit sum internally and
// the estimate corresponds to that normalized kernel; negative observed
// pixels are clamped to zero first and counted in the report.
inline DeconvReport deconv_rl(const Tensor& y, const Kernel& h, const Shape& x_shape,
                              const RlConfig& cfg = {}) {
  detail::validate(cfg);
  detail::check_forward_shapes(y, h, x_shape, "deconv_rl");
  for (double v : h.tensor().data())
    if (v < 0.0) throw NumericError("deconv_rl: kernel entries must be nonnegative");
  const double hsum = sum(h.tensor());
  if (!(hsum > 0.0)) throw NumericError("deconv_rl: kernel must have positive sum");

  const detail::StopWatch watch;
  const Kernel hn(scale(h.tensor(), 1.0 / hsum));

  std::size_t clamped = 0;
  for (double v : y.data())
    if (v < 0.0) ++clamped;
  const Tensor yc = clamp_nonneg(y);
  const Tensor aty = adjoint_apply(yc, hn, x_shape);

  const double total = sum(yc);
  if (!(total > 0.0)) {
    Tensor zero = Tensor::zeros(x_shape);
    const double f0 = objective(zero, yc, hn);
    const double k0 = kkt_residual(zero, yc, hn);
    return DeconvReport{std::move(zero), {f0}, {k0}, 0, StopReason::converged,
                        watch.seconds(), clamped};
  }

  Tensor x = Tensor::filled(x_shape, total / static_cast<double>(x_shape.element_count()));

  std::vector<double> trace;
  std::vector<double> kkts;
  auto record = [&](const Tensor& xi, const Tensor& ax_cur) {
    Tensor r = sub(ax_cur, yc);
    trace.push_back(0.5 * dot(r, r));
    kkts.push_back(
        detail::kkt_from_gradient(xi, sub(adjoint_apply(ax_cur, hn, x_shape), aty)));
  };

  Tensor ax = conv_full(x, hn);
  record(x, ax);

  std::size_t iterations = 0;
  StopReason reason = StopReason::max_iters;
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    const Tensor ratio = guarded_div(yc, ax);
    Tensor x_next = mul(x, adjoint_apply(ratio, hn, x_shape));
    const double rel = norm2(sub(x_next, x)) / std::max(norm2(x), 1e-300);
    x = std::move(x_next);
    ax = conv_full(x, hn);
    record(x, ax);
    iterations = k;
    if (rel < cfg.tol_rel_change) {
      reason = StopReason::converged;
      break;
    }
  }

  return DeconvReport{std::move(x), std::move(trace),   std::move(kkts),
                      iterations,   reason,             watch.seconds(),
                      clamped};
}

}  // namespace ndconv
