#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "colorq/kmeans.hpp"
#include "colorq/palette.hpp"

namespace colorq {

/// Channel weights of the minmax distance: green dominates, blue counts least.
inline constexpr Vec3 kMinmaxChannelWeights{0.5, 1.0, 0.25};

inline double minmax_dist2(const Vec3& a, const Vec3& b) {
  const double dr = a[0] - b[0];
  const double dg = a[1] - b[1];
  const double db = a[2] - b[2];
  return kMinmaxChannelWeights[0] * dr * dr + kMinmaxChannelWeights[1] * dg * dg +
         kMinmaxChannelWeights[2] * db * db;
}

/// Modified minmax quantizer with an explicit first center: each later center
/// is the point with the largest minimum channel-weighted squared distance to
/// the centers chosen so far, then every center is replaced by the
/// frequency-weighted mean of the points assigned to it (one pass, same
/// channel-weighted metric).
inline Palette mmm_from_first(std::span<const Vec3> points, std::span<const double> weights, int k,
                              std::size_t first_index) {
  const std::size_t n = points.size();
  if (k < 1) throw std::invalid_argument("mmm: k must be >= 1");
  if (std::size_t(k) > n) throw std::invalid_argument("mmm: k exceeds the number of points");
  if (first_index >= n) throw std::invalid_argument("mmm: first center index out of range");

  std::vector<std::size_t> chosen{first_index};
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());

  while (int(chosen.size()) < k) {
    const Vec3& latest = points[chosen.back()];
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = minmax_dist2(points[i], latest);
      if (d < min_d[i]) min_d[i] = d;
      if (min_d[i] > best) {
        best = min_d[i];
        best_i = i;
      }
    }
    chosen.push_back(best_i);
  }

  // One assignment pass, then each center becomes its cluster's weighted mean.
  std::vector<Vec3> sums(chosen.size(), Vec3{0, 0, 0});
  std::vector<double> wsum(chosen.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = minmax_dist2(points[i], points[chosen[0]]);
    std::size_t best_c = 0;
    for (std::size_t c = 1; c < chosen.size(); ++c) {
      const double d = minmax_dist2(points[i], points[chosen[c]]);
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    const double w = weights[i];
    sums[best_c][0] += w * points[i][0];
    sums[best_c][1] += w * points[i][1];
    sums[best_c][2] += w * points[i][2];
    wsum[best_c] += w;
  }

  Palette p;
  p.centers.resize(chosen.size());
  for (std::size_t c = 0; c < chosen.size(); ++c) {
    if (wsum[c] > 0)
      p[c] = Vec3{sums[c][0] / wsum[c], sums[c][1] / wsum[c], sums[c][2] / wsum[c]};
    else
      p[c] = points[chosen[c]];  // a center always covers at least itself
  }
  return p;
}

/// First center drawn uniformly from the points under the seed.
inline Palette mmm(std::span<const Vec3> points, std::span<const double> weights, int k,
                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t first = std::size_t(bounded_rand(rng, points.size()));
  return mmm_from_first(points, weights, k, first);
}

inline Palette mmm(const ColorHistogram& hist, int k, std::uint64_t seed) {
  return mmm(std::span<const Vec3>(hist.colors), std::span<const double>(hist.weights), k, seed);
}

}  // namespace colorq
