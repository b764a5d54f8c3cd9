// colorq: quantize PPM images, benchmark the quantizers, and sweep K for
// scaling measurements.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "colorq/bench.hpp"
#include "colorq/image_ops.hpp"
#include "colorq/methods.hpp"
#include "colorq/metrics.hpp"
#include "colorq/ppm.hpp"

namespace {

constexpr int kExitIo = 2;
constexpr int kExitBadMethod = 3;
constexpr int kExitBadParams = 4;

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const colorq::PpmError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const colorq::UnknownMethodError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadMethod;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadParams;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int env_threads() {
  if (const char* v = std::getenv("COLORQ_THREADS")) {
    const int n = std::atoi(v);
    if (n >= 1) return n;
  }
  return 1;
}

std::vector<int> parse_k_list(const std::string& s) {
  std::vector<int> ks;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    ks.push_back(std::stoi(tok));
  }
  if (ks.empty()) throw std::invalid_argument("empty K list");
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"colorq - color quantization toolkit (binary PPM in/out)"};
  app.require_subcommand(1);

  // ---- quantize ----
  std::string q_input, q_method = "wsm", q_output, q_palette, q_error_image, q_hist_csv;
  int q_k = 256;
  std::uint64_t q_seed = 1;
  int q_iters = -1;
  double q_epsilon = -1;

  auto* quantize = app.add_subcommand("quantize", "Quantize one image and report MSE/PSNR/time");
  quantize->add_option("input", q_input, "input PPM (binary, P6)")->required();
  quantize->add_option("--method,-m", q_method, "method id, e.g. wsm, wsm-c, km, mc, wu (default wsm)");
  quantize->add_option("--k,-k", q_k, "palette size (default 256)");
  quantize->add_option("--seed,-s", q_seed, "RNG seed for seeded methods (default 1)");
  quantize->add_option("--output,-o", q_output, "output PPM path")->required();
  quantize->add_option("--palette", q_palette, "also write the palette, one 'R G B' per line");
  quantize->add_option("--error-image", q_error_image, "also write the amplified error rendering");
  quantize->add_option("--dump-histogram", q_hist_csv, "write the unique-color histogram as CSV");
  quantize->add_option("--iters", q_iters, "override the fixed iteration budget");
  quantize->add_option("--epsilon", q_epsilon, "override the convergence threshold");

  quantize->callback([&]() {
    std::exit(guarded([&]() {
      colorq::MethodSpec spec = colorq::parse_method_spec(q_method);
      if (q_iters > 0) spec.params.iters = q_iters;
      if (q_epsilon > 0) spec.params.epsilon = q_epsilon;

      const colorq::RgbImage image = colorq::load_ppm(q_input);
      colorq::QuantizeOutcome qo = colorq::generate_palette(image, spec.params, q_k, q_seed);
      if (int(qo.palette.size()) < q_k)
        std::cerr << "note: image supports only " << qo.palette.size() << " of " << q_k
                  << " requested colors\n";

      const colorq::RgbImage mapped = colorq::map_pixels(image, qo.palette);
      qo.report.mse = colorq::mse(image, mapped);

      colorq::save_ppm(mapped, q_output);
      if (!q_palette.empty()) colorq::save_palette(qo.palette, q_palette);
      if (!q_error_image.empty()) colorq::save_ppm(colorq::error_image(image, mapped), q_error_image);
      if (!q_hist_csv.empty()) {
        std::ofstream out(q_hist_csv);
        if (!out) throw std::runtime_error("cannot open " + q_hist_csv + " for writing");
        colorq::write_histogram_csv(out, colorq::build_histogram(image));
      }

      std::printf("method=%s k=%d seed=%llu iterations=%d mse=%s psnr=%s time_ms=%s\n",
                  qo.report.method.c_str(), q_k, (unsigned long long)q_seed, qo.report.iterations,
                  colorq::fmt_g6(qo.report.mse).c_str(), colorq::fmt_g6(colorq::psnr(qo.report.mse)).c_str(),
                  colorq::fmt_g6(qo.report.elapsed_ms).c_str());
      return 0;
    }));
  });

  // ---- bench ----
  std::string b_config, b_images, b_methods, b_ks, b_output;
  int b_runs = -1, b_threads = -1;
  std::int64_t b_base_seed = -1;
  bool b_serial = false;

  auto* bench = app.add_subcommand("bench", "Run the benchmark grid and emit CSV reports");
  bench->add_option("--config,-c", b_config, "key=value config file");
  bench->add_option("--images", b_images, "comma-separated PPM paths (overrides config)");
  bench->add_option("--methods", b_methods, "comma-separated method ids (overrides config)");
  bench->add_option("--k-values", b_ks, "comma-separated K list (default 32,64,128,256)");
  bench->add_option("--runs", b_runs, "runs per cell (default 100)");
  bench->add_option("--base-seed", b_base_seed, "run r uses seed base_seed + r (default 1)");
  bench->add_option("--output", b_output, "output prefix for <prefix>_{runs,summary,ranks}.csv");
  bench->add_option("--threads", b_threads, "worker threads over grid cells (default $COLORQ_THREADS or 1)");
  bench->add_flag("--serial-timing", b_serial, "force one run at a time for clean timing");

  bench->callback([&]() {
    std::exit(guarded([&]() {
      colorq::BenchConfig cfg;
      cfg.threads = env_threads();
      if (!b_config.empty()) {
        std::ifstream in(b_config);
        if (!in) throw std::runtime_error("cannot open config file " + b_config);
        colorq::apply_config_text(cfg, in);
      }
      if (!b_images.empty()) cfg.images = colorq::benchdetail::split_list(b_images);
      if (!b_methods.empty()) {
        cfg.methods.clear();
        for (const std::string& tok : colorq::benchdetail::split_list(b_methods))
          cfg.methods.push_back(colorq::parse_method_spec(tok));
      }
      if (!b_ks.empty()) cfg.k_values = parse_k_list(b_ks);
      if (b_runs > 0) cfg.runs = b_runs;
      if (b_base_seed >= 0) cfg.base_seed = std::uint64_t(b_base_seed);
      if (!b_output.empty()) cfg.output_prefix = b_output;
      if (b_threads > 0) cfg.threads = b_threads;
      cfg.serial_timing = b_serial;

      const colorq::BenchResults res = colorq::run_bench(cfg);
      const auto paths = colorq::write_bench_outputs(res, cfg.output_prefix);
      for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
      std::cout << res.ranks_csv;
      return 0;
    }));
  });

  // ---- scaling ----
  std::string s_input, s_method = "wsm-c", s_ks = "2,4,8,16,32,64,128,256", s_output;
  std::uint64_t s_seed = 1;

  auto* scaling = app.add_subcommand("scaling", "Sweep K for one method, reporting time and distance evals");
  scaling->add_option("input", s_input, "input PPM")->required();
  scaling->add_option("--method,-m", s_method, "method id (default wsm-c)");
  scaling->add_option("--k-values", s_ks, "comma-separated K sweep");
  scaling->add_option("--seed,-s", s_seed, "RNG seed (default 1)");
  scaling->add_option("--output,-o", s_output, "CSV output path (default stdout)");

  scaling->callback([&]() {
    std::exit(guarded([&]() {
      const colorq::MethodSpec spec = colorq::parse_method_spec(s_method);
      const std::vector<int> ks = parse_k_list(s_ks);
      const colorq::RgbImage image = colorq::load_ppm(s_input);

      std::string csv = "k,elapsed_ms,dist_evals\n";
      for (const int k : ks) {
        const colorq::QuantizeOutcome qo = colorq::generate_palette(image, spec.params, k, s_seed);
        csv += std::to_string(k) + "," + colorq::fmt_g6(qo.report.elapsed_ms) + "," +
               std::to_string(qo.report.dist_evals) + "\n";
      }
      if (s_output.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(s_output);
        if (!out) throw std::runtime_error("cannot open " + s_output + " for writing");
        out << csv;
      }
      return 0;
    }));
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
