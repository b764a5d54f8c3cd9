#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "colorq/color.hpp"

namespace colorq {

/// Mean squared RGB error between two images of equal size: the per-pixel
/// squared Euclidean distance summed over all three channels, averaged over
/// pixels.
inline double mse(const RgbImage& a, const RgbImage& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("mse: dimension mismatch");
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t dr = std::int64_t(a.pixels[i].r) - b.pixels[i].r;
    const std::int64_t dg = std::int64_t(a.pixels[i].g) - b.pixels[i].g;
    const std::int64_t db = std::int64_t(a.pixels[i].b) - b.pixels[i].b;
    sum += std::uint64_t(dr * dr + dg * dg + db * db);
  }
  return double(sum) / double(a.size());
}

/// PSNR = 20 log10(255 / sqrt(MSE)), in decibels. Zero MSE maps to +infinity.
inline double psnr(double mse_value) {
  if (mse_value < 0) throw std::invalid_argument("psnr: negative MSE");
  if (mse_value == 0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(255.0 / std::sqrt(mse_value));
}

/// Repeatability score of a randomly initialized method over repeated runs:
/// 100 * (1 - sigma/mu). Higher is more stable.
inline double stability(double mu, double sigma) {
  if (mu <= 0) throw std::invalid_argument("stability: mu must be positive");
  if (sigma < 0) throw std::invalid_argument("stability: sigma must be nonnegative");
  return 100.0 * (1.0 - sigma / mu);
}

/// Ranks methods within each cell (ascending score, ties share the average
/// rank) and returns the per-method mean rank over all cells. Every cell must
/// score every method.
inline std::vector<double> mean_ranks(const std::vector<std::vector<double>>& cells) {
  if (cells.empty()) throw std::invalid_argument("mean_ranks: no cells");
  const std::size_t m = cells.front().size();
  if (m == 0) throw std::invalid_argument("mean_ranks: no methods");

  std::vector<double> total(m, 0.0);
  for (const auto& cell : cells) {
    if (cell.size() != m) throw std::invalid_argument("mean_ranks: missing method score in a cell");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&cell](std::size_t a, std::size_t b) { return cell[a] < cell[b]; });

    // Walk runs of equal scores; each run shares the average of the ranks it
    // spans (1-based).
    std::size_t i = 0;
    while (i < m) {
      std::size_t j = i;
      while (j + 1 < m && cell[order[j + 1]] == cell[order[i]]) ++j;
      const double shared = (double(i + 1) + double(j + 1)) / 2.0;
      for (std::size_t r = i; r <= j; ++r) total[order[r]] += shared;
      i = j + 1;
    }
  }

  for (double& t : total) t /= double(cells.size());
  return total;
}

/// Sample mean and standard deviation (n-1 denominator; zero for n == 1).
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean_std: empty sample");
  MeanStd r;
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / double(xs.size() - 1));
  }
  return r;
}

}  // namespace colorq
