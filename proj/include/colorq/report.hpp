#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace colorq {

/// Formats a double with 6 significant digits, the precision used by all CSV
/// output. Infinities serialize as "inf".
inline std::string fmt_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class StopWatch {
 public:
  StopWatch() : start_(clock::now()) {}

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

/// Outcome of a single palette-generation run.
struct RunReport {
  std::string method;
  int k = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  double sse = 0.0;         // weighted SSE at the last assignment
  double mse = 0.0;         // full-image MSE of the mapped result
  double elapsed_ms = 0.0;  // palette generation only
  std::uint64_t dist_evals = 0;
  std::vector<double> sse_history;  // one value per iteration

  static std::string csv_header() {
    return "method,k,seed,iterations,sse,mse,elapsed_ms,dist_evals";
  }

  std::string csv_row() const {
    return method + "," + std::to_string(k) + "," + std::to_string(seed) + "," +
           std::to_string(iterations) + "," + fmt_g6(sse) + "," + fmt_g6(mse) + "," +
           fmt_g6(elapsed_ms) + "," + std::to_string(dist_evals);
  }
};

/// Aggregate of repeated runs of one method on one image at one K.
struct BenchSummary {
  std::string method;
  int k = 0;
  std::string image;
  int runs = 0;
  double mse_mean = 0.0;
  double mse_std = 0.0;
  double psnr_mean = 0.0;
  double time_mean_ms = 0.0;
  double stability = 0.0;  // 100 * (1 - sigma/mu)
  double iterations_mean = 0.0;

  static std::string csv_header() {
    return "method,k,image,runs,mse_mean,mse_std,psnr_mean,time_mean_ms,stability,iterations_mean";
  }

  std::string csv_row() const {
    return method + "," + std::to_string(k) + "," + image + "," + std::to_string(runs) + "," +
           fmt_g6(mse_mean) + "," + fmt_g6(mse_std) + "," + fmt_g6(psnr_mean) + "," +
           fmt_g6(time_mean_ms) + "," + fmt_g6(stability) + "," + fmt_g6(iterations_mean);
  }
};

}  // namespace colorq
