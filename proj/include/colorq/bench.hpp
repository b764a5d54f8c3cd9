#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "colorq/image_ops.hpp"
#include "colorq/methods.hpp"
#include "colorq/metrics.hpp"
#include "colorq/ppm.hpp"
#include "colorq/report.hpp"

namespace colorq {

/// One benchmark method entry: the id string as it appears in CSV output plus
/// its parameter overrides.
struct MethodSpec {
  std::string label;
  MethodParams params;
};

/// Parses "name" or "name(key=value,key=value)". Recognized keys: iters,
/// epsilon, k_prime, stable_iters, theta, q, delta, pixels.
inline MethodSpec parse_method_spec(const std::string& token) {
  std::string name = token;
  std::string args;
  const auto paren = token.find('(');
  if (paren != std::string::npos) {
    if (token.back() != ')') throw std::invalid_argument("malformed method token: " + token);
    name = token.substr(0, paren);
    args = token.substr(paren + 1, token.size() - paren - 2);
  }

  const auto id = parse_method(name);
  if (!id) throw UnknownMethodError("unknown method: " + name);

  MethodSpec spec;
  spec.label = name;
  spec.params.id = *id;

  std::istringstream in(args);
  std::string kv;
  while (std::getline(in, kv, ',')) {
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed method option: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    if (key == "iters") spec.params.iters = std::stoi(val);
    else if (key == "epsilon") spec.params.epsilon = std::stod(val);
    else if (key == "k_prime") spec.params.k_prime = std::stoi(val);
    else if (key == "stable_iters") spec.params.stable_iters = std::stoi(val);
    else if (key == "theta") spec.params.theta = std::stod(val);
    else if (key == "q") spec.params.q = std::stod(val);
    else if (key == "delta") spec.params.delta = std::stod(val);
    else if (key == "pixels") spec.params.fuzzy_on_pixels = (val == "1" || val == "true");
    else throw std::invalid_argument("unknown method option: " + key);
  }
  return spec;
}

struct BenchConfig {
  std::vector<std::string> images;
  std::vector<MethodSpec> methods;
  std::vector<int> k_values{32, 64, 128, 256};
  int runs = 100;
  std::uint64_t base_seed = 1;
  std::string output_prefix = "bench";
  int threads = 1;
  bool serial_timing = false;

  void validate() const {
    if (images.empty()) throw std::invalid_argument("bench config: no images");
    if (methods.empty()) throw std::invalid_argument("bench config: no methods");
    if (k_values.empty()) throw std::invalid_argument("bench config: no K values");
    if (runs < 1) throw std::invalid_argument("bench config: runs must be >= 1");
  }
};

namespace benchdetail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    // trim surrounding blanks
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace benchdetail

/// Flat key=value config file. Keys: images, methods, k_values, runs,
/// base_seed, output, threads. '#' starts a comment.
inline void apply_config_text(BenchConfig& cfg, std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);

    if (key == "images") cfg.images = benchdetail::split_list(val);
    else if (key == "methods") {
      cfg.methods.clear();
      for (const std::string& tok : benchdetail::split_list(val))
        cfg.methods.push_back(parse_method_spec(tok));
    } else if (key == "k_values") {
      cfg.k_values.clear();
      for (const std::string& tok : benchdetail::split_list(val)) cfg.k_values.push_back(std::stoi(tok));
    } else if (key == "runs") cfg.runs = std::stoi(val);
    else if (key == "base_seed") cfg.base_seed = std::stoull(val);
    else if (key == "output") cfg.output_prefix = val;
    else if (key == "threads") cfg.threads = std::stoi(val);
    else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

struct BenchCell {
  std::string image;
  int k = 0;
  const MethodSpec* method = nullptr;
  std::vector<RunReport> runs;
  BenchSummary summary;
};

struct BenchResults {
  std::vector<BenchCell> cells;  // ordered: image-major, then K, then method
  std::string runs_csv;
  std::string summary_csv;
  std::string ranks_csv;
};

/// Executes the full grid. Run r of every cell uses seed base_seed + r, so
/// per-cell statistics are reproducible; wall time is the only
/// nondeterministic output. Cells may run on several worker threads; pass
/// serial_timing (or threads = 1) when the timing columns matter.
inline BenchResults run_bench(const BenchConfig& cfg) {
  cfg.validate();

  struct LoadedImage {
    std::string name;
    RgbImage image;
  };
  std::vector<LoadedImage> images;
  for (const std::string& path : cfg.images) {
    try {
      images.push_back({std::filesystem::path(path).stem().string(), load_ppm(path)});
    } catch (const std::exception& e) {
      throw std::runtime_error("cannot load image '" + path + "': " + e.what());
    }
  }

  BenchResults results;
  for (const auto& img : images)
    for (const int k : cfg.k_values)
      for (const MethodSpec& m : cfg.methods) {
        BenchCell cell;
        cell.image = img.name;
        cell.k = k;
        cell.method = &m;
        results.cells.push_back(std::move(cell));
      }

  const int nthreads = cfg.serial_timing ? 1 : std::max(1, cfg.threads);
  std::atomic<std::size_t> next_cell{0};
  std::mutex err_mutex;
  std::string first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t ci = next_cell.fetch_add(1);
      if (ci >= results.cells.size()) return;
      BenchCell& cell = results.cells[ci];
      const std::size_t img_idx = ci / (cfg.k_values.size() * cfg.methods.size());
      const RgbImage& image = images[img_idx].image;
      try {
        for (int r = 0; r < cfg.runs; ++r) {
          QuantizeOutcome qo = generate_palette(image, cell.method->params, cell.k,
                                                cfg.base_seed + std::uint64_t(r));
          const RgbImage mapped = map_pixels(image, qo.palette);
          qo.report.mse = mse(image, mapped);
          cell.runs.push_back(std::move(qo.report));
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error.empty())
          first_error = "cell image=" + cell.image + " method=" + cell.method->label +
                        " k=" + std::to_string(cell.k) + ": " + e.what();
        return;
      }
    }
  };

  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);

  // Summaries.
  for (BenchCell& cell : results.cells) {
    std::vector<double> mses, psnrs, times, iters;
    for (const RunReport& r : cell.runs) {
      mses.push_back(r.mse);
      psnrs.push_back(psnr(r.mse));
      times.push_back(r.elapsed_ms);
      iters.push_back(double(r.iterations));
    }
    const MeanStd ms = mean_std(mses);
    BenchSummary& s = cell.summary;
    s.method = cell.method->label;
    s.k = cell.k;
    s.image = cell.image;
    s.runs = cfg.runs;
    s.mse_mean = ms.mean;
    s.mse_std = ms.std;
    s.psnr_mean = mean_std(psnrs).mean;
    s.time_mean_ms = mean_std(times).mean;
    s.stability = ms.mean > 0 ? stability(ms.mean, ms.std) : 100.0;
    s.iterations_mean = mean_std(iters).mean;
  }

  // CSV bodies.
  {
    std::string csv = "image," + RunReport::csv_header() + "\n";
    for (const BenchCell& cell : results.cells)
      for (const RunReport& r : cell.runs) csv += cell.image + "," + r.csv_row() + "\n";
    results.runs_csv = std::move(csv);
  }
  {
    std::string csv = BenchSummary::csv_header() + "\n";
    for (const BenchCell& cell : results.cells) csv += cell.summary.csv_row() + "\n";
    results.summary_csv = std::move(csv);
  }

  // Mean ranks over all (image, K) cells, ascending by MSE and by time;
  // stability ranks cover only the seeded methods (descending stability).
  {
    const std::size_t m = cfg.methods.size();
    const std::size_t ncells = results.cells.size() / m;
    std::vector<std::vector<double>> mse_cells(ncells), time_cells(ncells), stab_cells(ncells);
    for (std::size_t c = 0; c < ncells; ++c)
      for (std::size_t j = 0; j < m; ++j) {
        const BenchSummary& s = results.cells[c * m + j].summary;
        mse_cells[c].push_back(s.mse_mean);
        time_cells[c].push_back(s.time_mean_ms);
        if (method_is_seeded(cfg.methods[j].params.id))
          stab_cells[c].push_back(-s.stability);
      }
    const std::vector<double> mse_rank = mean_ranks(mse_cells);
    const std::vector<double> time_rank = mean_ranks(time_cells);
    std::vector<double> stab_rank;
    if (!stab_cells.front().empty()) stab_rank = mean_ranks(stab_cells);

    std::string csv = "method,mse_rank,time_rank,mean_rank,stability_rank\n";
    std::size_t seeded_idx = 0;
    for (std::size_t j = 0; j < m; ++j) {
      csv += cfg.methods[j].label + "," + fmt_g6(mse_rank[j]) + "," + fmt_g6(time_rank[j]) + "," +
             fmt_g6((mse_rank[j] + time_rank[j]) / 2.0) + ",";
      if (method_is_seeded(cfg.methods[j].params.id) && !stab_rank.empty())
        csv += fmt_g6(stab_rank[seeded_idx++]);
      csv += "\n";
    }
    results.ranks_csv = std::move(csv);
  }

  return results;
}

/// Writes the three CSV files next to the configured prefix and returns their
/// paths in (runs, summary, ranks) order.
inline std::vector<std::filesystem::path> write_bench_outputs(const BenchResults& res,
                                                              const std::string& prefix) {
  const std::vector<std::pair<std::string, const std::string*>> files = {
      {prefix + "_runs.csv", &res.runs_csv},
      {prefix + "_summary.csv", &res.summary_csv},
      {prefix + "_ranks.csv", &res.ranks_csv},
  };
  std::vector<std::filesystem::path> paths;
  for (const auto& [name, body] : files) {
    std::ofstream out(name);
    if (!out) throw std::runtime_error("cannot open " + name + " for writing");
    out << *body;
    paths.emplace_back(name);
  }
  return paths;
}

}  // namespace colorq
