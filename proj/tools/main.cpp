// ndconv command-line tool: convolution, deconvolution, simulation,
// verification, metrics, and explicit-matrix dumps, with reproducible
// run manifests next to every file output.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ndconv/ndconv.hpp"

namespace fs = std::filesystem;
using namespace ndconv;

namespace {

// ---------------------------------------------------------------------------
// File I/O dispatch: ".pgm" means portable graymap, anything else is the
// native tensor container. PGM writes clamp to [0,255] for convenience;
// the library API keeps the strict no-clamp path available.

bool is_pgm(const fs::path& path) { return path.extension() == ".pgm"; }

Tensor load_tensor(const fs::path& path) {
  return is_pgm(path) ? io::read_pgm(path) : io::read_tensor(path);
}

void store_tensor(const Tensor& t, const fs::path& path) {
  if (is_pgm(path))
    io::write_pgm(t, path, /*clamp=*/true);
  else
    io::write_tensor(t, path);
}

Kernel load_kernel(const fs::path& path) { return Kernel(load_tensor(path)); }

// ---------------------------------------------------------------------------
// Run manifest: ordered key=value lines describing one invocation.

class Manifest {
 public:
  void add(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
  }
  void add(std::string key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    add(std::move(key), std::string(buf));
  }
  void add(std::string key, std::size_t value) {
    add(std::move(key), std::to_string(value));
  }

  void write(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write manifest " + path.string());
    for (const auto& [k, v] : entries_) out << k << "=" << v << "\n";
    if (!out) throw FormatError("manifest write failure: " + path.string());
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

Manifest manifest_header(const std::string& subcommand) {
  Manifest m;
  m.add("subcommand", subcommand);
  m.add("version", std::string(kVersion));
  return m;
}

std::string shape_csv(const Shape& s) {
  std::string out;
  for (std::size_t i = 0; i < s.ndim(); ++i) {
    if (i) out += ",";
    out += std::to_string(s.extent(i));
  }
  return out;
}

Shape shape_from(const std::vector<std::size_t>& extents) {
  std::vector<std::size_t> copy = extents;
  return Shape(std::move(copy));
}

void write_trace_csv(const fs::path& path, const DeconvReport& report) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write trace " + path.string());
  out << "iter,objective,kkt\n";
  char buf[96];
  // Row k covers accepted iterate k; entry 0 of each trace is the start point.
  for (std::size_t k = 1; k < report.objective_trace.size(); ++k) {
    const double kkt = k < report.kkt_trace.size() ? report.kkt_trace[k] : -1.0;
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, report.objective_trace[k],
                  kkt);
    out << buf;
  }
  if (!out) throw FormatError("trace write failure: " + path.string());
}

// ---------------------------------------------------------------------------
// Subcommand state and runners.

struct ConvolveArgs {
  std::string input, kernel, output;
};

int run_convolve(const ConvolveArgs& a) {
  const Tensor x = load_tensor(a.input);
  const Kernel h = load_kernel(a.kernel);
  const Tensor y = conv_full(x, h);
  store_tensor(y, a.output);
  Manifest m = manifest_header("convolve");
  m.add("input", a.input);
  m.add("kernel", a.kernel);
  m.add("output", a.output);
  m.add("input_shape", shape_csv(x.shape()));
  m.add("kernel_shape", shape_csv(h.shape()));
  m.add("output_shape", shape_csv(y.shape()));
  m.write(a.output + ".manifest");
  return 0;
}

struct DeconvArgs {
  std::string observed, kernel, output, method = "pg", trace_csv;
  std::vector<std::size_t> shape;
  std::size_t max_iters = 500;
  double tol = 1e-6;
  double step = 0.0;  // 0 = auto
  bool seedless = false;
};

int run_deconv(const DeconvArgs& a) {
  const Tensor y = load_tensor(a.observed);
  const Kernel h = load_kernel(a.kernel);
  const Shape x_shape = shape_from(a.shape);

  const DeconvReport report = [&] {
    if (a.method == "pg") {
      DeconvConfig cfg;
      cfg.max_iters = a.max_iters;
      cfg.tol_rel_objective = a.tol;
      if (a.step > 0.0) cfg.initial_step = a.step;
      return deconv_pg(y, h, x_shape, cfg);
    }
    RlConfig cfg;
    cfg.max_iters = a.max_iters;
    cfg.tol_rel_change = a.tol;
    return deconv_rl(y, h, x_shape, cfg);
  }();

  store_tensor(report.estimate, a.output);
  if (!a.trace_csv.empty()) write_trace_csv(a.trace_csv, report);

  Manifest m = manifest_header("deconv");
  m.add("observed", a.observed);
  m.add("kernel", a.kernel);
  m.add("output", a.output);
  m.add("method", a.method);
  m.add("shape", shape_csv(x_shape));
  m.add("max_iters", a.max_iters);
  m.add("tol", a.tol);
  m.add("step", a.step);
  m.add("seedless", std::string(a.seedless ? "true" : "false"));
  if (!a.trace_csv.empty()) m.add("trace_csv", a.trace_csv);
  m.add("stop_reason", std::string(to_string(report.stop_reason)));
  m.add("iterations_run", report.iterations_run);
  m.add("final_objective", report.objective_trace.back());
  if (!report.kkt_trace.empty()) m.add("final_kkt", report.kkt_trace.back());
  if (a.method == "rl")
    m.add("negative_pixels_clamped", report.negative_pixels_clamped);
  m.add("wall_time_seconds", report.wall_time_seconds);
  m.write(a.output + ".manifest");

  if (report.stop_reason == StopReason::stalled)
    throw NumericError("line search stalled before reaching the tolerance");
  return 0;
}

struct SimulateArgs {
  std::string phantom = "lines", psf = "gaussian", outdir;
  std::vector<std::size_t> size{128};
  std::size_t lines = 9;
  std::vector<std::size_t> psf_size{5};
  double sigma = 1.0;
  double noise_mean = 0.0;
  double noise_std = 5.0;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
  const std::size_t rows = a.size.at(0);
  const std::size_t cols = a.size.size() > 1 ? a.size.at(1) : rows;

  Tensor truth = [&] {
    if (a.phantom == "lines") return sim::phantom_lines(rows, cols, a.lines, 255.0);
    if (a.phantom == "texture") return sim::phantom_texture(rows, cols);
    return io::read_pgm(fs::path(a.phantom));  // any PGM serves as a phantom
  }();

  std::vector<std::size_t> psf_extents = a.psf_size;
  if (psf_extents.size() == 1) psf_extents.push_back(psf_extents[0]);
  Kernel psf = [&] {
    if (a.psf == "gaussian") return sim::gaussian_psf(psf_extents, a.sigma);
    if (a.psf == "delta") return sim::delta_psf(psf_extents);
    throw Error("unknown --psf kind '" + a.psf + "' (expected gaussian or delta)");
  }();

  const Tensor blurred = conv_full(truth, psf);
  const Tensor observed =
      sim::add_gaussian_noise(blurred, {a.noise_mean, a.noise_std, a.seed});

  fs::create_directories(a.outdir);
  const fs::path dir(a.outdir);
  io::write_tensor(truth, dir / "truth.ndt");
  io::write_pgm(truth, dir / "truth.pgm", /*clamp=*/true);
  io::write_tensor(psf.tensor(), dir / "psf.ndt");
  io::write_tensor(observed, dir / "observed.ndt");
  io::write_pgm(observed, dir / "observed.pgm", /*clamp=*/true);

  Manifest m = manifest_header("simulate");
  m.add("phantom", a.phantom);
  m.add("size", shape_csv(truth.shape()));
  m.add("lines", a.lines);
  m.add("psf", a.psf);
  m.add("psf_size", shape_csv(psf.shape()));
  m.add("sigma", a.sigma);
  m.add("noise_mean", a.noise_mean);
  m.add("noise_std", a.noise_std);
  m.add("seed", a.seed);
  m.add("outdir", a.outdir);
  m.add("truth", (dir / "truth.ndt").string());
  m.add("psf_file", (dir / "psf.ndt").string());
  m.add("observed", (dir / "observed.ndt").string());
  m.add("observed_shape", shape_csv(observed.shape()));
  m.write(dir / "manifest.txt");
  return 0;
}

struct VerifyArgs {
  std::size_t ndim = 3, max_extent = 5, max_radius = 2, cases = 200;
  std::uint64_t seed = 20240915;
};

int run_verify(const VerifyArgs& a) {
  verify::VerifyOptions opt;
  opt.max_ndim = a.ndim;
  opt.max_extent = a.max_extent;
  opt.max_radius = a.max_radius;
  opt.cases = a.cases;
  opt.seed = a.seed;
  const auto checks = verify::run_property_checks(opt);
  bool all_ok = true;
  for (const auto& c : checks) {
    std::printf("[%s] %s: cases=%zu worst=%.3e tol=%.0e\n",
                c.passed ? "pass" : "FAIL", c.name.c_str(), c.cases_run,
                c.worst_error, c.tolerance);
    all_ok = all_ok && c.passed;
  }
  if (!all_ok) throw NumericError("property verification failed");
  return 0;
}

struct MetricsArgs {
  std::string reference, estimate;
};

int run_metrics(const MetricsArgs& a) {
  const Tensor ref = load_tensor(a.reference);
  const Tensor est = load_tensor(a.estimate);
  const double snr = sim::snr_db(ref, est);
  if (std::isinf(snr))
    std::printf("inf\n");
  else
    std::printf("%.12f\n", snr);
  return 0;
}

struct MatrixArgs {
  std::string kernel, output;
  std::vector<std::size_t> shape;
};

int run_matrix(const MatrixArgs& a) {
  const Kernel h = load_kernel(a.kernel);
  const Shape x_shape = shape_from(a.shape);
  const ExplicitConvMatrix mat = build_matrix(h, x_shape);
  std::ofstream out(a.output);
  if (!out) throw FormatError("cannot write " + a.output);
  char buf[40];
  for (std::size_t r = 0; r < mat.rows(); ++r) {
    for (std::size_t c = 0; c < mat.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.16e", mat.at(r, c));
      if (c) out << ",";
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw FormatError("matrix write failure: " + a.output);
  Manifest m = manifest_header("matrix");
  m.add("kernel", a.kernel);
  m.add("shape", shape_csv(x_shape));
  m.add("rows", mat.rows());
  m.add("cols", mat.cols());
  m.add("output", a.output);
  m.write(a.output + ".manifest");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"n-dimensional convolution and deconvolution toolkit"};
  app.require_subcommand(1);

  std::size_t threads = 1;
  app.add_option("--threads", threads, "max worker threads for convolutions")
      ->check(CLI::PositiveNumber);

  ConvolveArgs conv_args;
  auto* conv_cmd = app.add_subcommand("convolve", "full convolution of a tensor");
  conv_cmd->add_option("--input", conv_args.input, "input tensor (.ndt or .pgm)")
      ->required();
  conv_cmd->add_option("--kernel", conv_args.kernel, "kernel tensor, odd extents")
      ->required();
  conv_cmd->add_option("--output", conv_args.output, "output path")->required();

  DeconvArgs dec_args;
  auto* dec_cmd = app.add_subcommand("deconv", "nonnegative deconvolution");
  dec_cmd->add_option("--observed", dec_args.observed, "observed tensor")->required();
  dec_cmd->add_option("--kernel", dec_args.kernel, "blur kernel")->required();
  dec_cmd->add_option("--shape", dec_args.shape, "estimate shape, e.g. 128,128")
      ->required()
      ->delimiter(',');
  dec_cmd->add_option("--method", dec_args.method, "pg (projected gradient) or rl")
      ->check(CLI::IsMember({"pg", "rl"}));
  dec_cmd->add_option("--max-iters", dec_args.max_iters, "iteration budget")
      ->check(CLI::PositiveNumber);
  dec_cmd->add_option("--tol", dec_args.tol,
                      "relative objective-decrease (pg) or change (rl) tolerance")
      ->check(CLI::NonNegativeNumber);
  dec_cmd->add_option("--step", dec_args.step,
                      "initial trial step for pg; 0 selects 1/lambda_max")
      ->check(CLI::NonNegativeNumber);
  dec_cmd->add_flag("--seedless", dec_args.seedless,
                    "assert the run uses no randomness (always true; recorded)");
  dec_cmd->add_option("--trace-csv", dec_args.trace_csv,
                      "write per-iteration objective/kkt CSV here");
  dec_cmd->add_option("--output", dec_args.output, "estimate output path")->required();

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "generate a blurred noisy phantom");
  sim_cmd->add_option("--phantom", sim_args.phantom,
                      "lines, texture, or a PGM file path");
  sim_cmd->add_option("--size", sim_args.size, "rows[,cols] of the phantom")
      ->delimiter(',')
      ->expected(1, 2);
  sim_cmd->add_option("--lines", sim_args.lines, "line count for the lines phantom")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--psf", sim_args.psf, "gaussian or delta");
  sim_cmd->add_option("--psf-size", sim_args.psf_size, "kernel extents, odd")
      ->delimiter(',')
      ->expected(1, 2);
  sim_cmd->add_option("--sigma", sim_args.sigma, "gaussian psf width");
  sim_cmd->add_option("--noise-mean", sim_args.noise_mean, "additive noise mean");
  sim_cmd->add_option("--noise-std", sim_args.noise_std,
                      "additive noise standard deviation");
  sim_cmd->add_option("--seed", sim_args.seed, "noise seed");
  sim_cmd->add_option("--outdir", sim_args.outdir, "output directory")->required();

  VerifyArgs ver_args;
  auto* ver_cmd =
      app.add_subcommand("verify", "randomized matrix-oracle property checks");
  ver_cmd->add_option("--ndim", ver_args.ndim, "max dimensionality")
      ->check(CLI::PositiveNumber);
  ver_cmd->add_option("--max-extent", ver_args.max_extent, "max extent per dim")
      ->check(CLI::PositiveNumber);
  ver_cmd->add_option("--max-radius", ver_args.max_radius, "max kernel radius");
  ver_cmd->add_option("--cases", ver_args.cases, "random cases per property")
      ->check(CLI::PositiveNumber);
  ver_cmd->add_option("--seed", ver_args.seed, "generator seed");

  MetricsArgs met_args;
  auto* met_cmd = app.add_subcommand("metrics", "signal-to-noise ratio in dB");
  met_cmd->add_option("--reference", met_args.reference, "ground-truth tensor")
      ->required();
  met_cmd->add_option("--estimate", met_args.estimate, "estimate tensor")->required();

  MatrixArgs mat_args;
  auto* mat_cmd =
      app.add_subcommand("matrix", "dump the explicit convolution matrix as CSV");
  mat_cmd->add_option("--kernel", mat_args.kernel, "kernel tensor")->required();
  mat_cmd->add_option("--shape", mat_args.shape, "input shape, e.g. 4,4")
      ->required()
      ->delimiter(',');
  mat_cmd->add_option("--output", mat_args.output, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit clean, usage errors exit 2
  }

  try {
    set_max_threads(threads);
    if (conv_cmd->parsed()) return run_convolve(conv_args);
    if (dec_cmd->parsed()) return run_deconv(dec_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (ver_cmd->parsed()) return run_verify(ver_args);
    if (met_cmd->parsed()) return run_metrics(met_args);
    if (mat_cmd->parsed()) return run_matrix(mat_args);
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return 3;
  } catch (const ShapeError& e) {
    std::fprintf(stderr, "shape error: %s\n", e.what());
    return 4;
  } catch (const BoundsError& e) {
    std::fprintf(stderr, "bounds error: %s\n", e.what());
    return 4;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 5;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
}
