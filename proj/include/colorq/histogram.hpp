#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "colorq/color.hpp"

namespace colorq {

/// Parameters of the hash family h_a(x) = (a1*x1 + a2*x2 + a3*x3) mod m,
/// with m prime and coefficients drawn from {0, ..., m-1}.
struct UniversalHashParams {
  std::uint64_t m = 2;
  std::array<std::uint64_t, 3> a{0, 0, 0};
};

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

inline std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  while (!is_prime(n)) ++n;
  return n;
}

/// Table size: smallest prime giving load factor <= 0.5 for the expected
/// number of unique colors. Coefficients come from the seeded generator.
inline UniversalHashParams make_hash_params(std::uint64_t expected_unique, std::uint64_t seed) {
  UniversalHashParams p;
  p.m = next_prime(expected_unique < 2 ? 2 : 2 * expected_unique);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> coeff(0, p.m - 1);
  for (auto& a : p.a) a = coeff(rng);
  return p;
}

inline std::uint64_t universal_hash(RgbColor c, const UniversalHashParams& p) {
  // Max term sum is 3 * 255 * (m-1); fits in 64 bits for any table that
  // can index 24-bit color space.
  const std::uint64_t s = p.a[0] * c.r + p.a[1] * c.g + p.a[2] * c.b;
  return s % p.m;
}

/// The unique colors of an image with their frequency weights. Entries are
/// ordered by first occurrence in row-major scan order; weights are counts
/// normalized by the pixel total and sum to 1.
struct ColorHistogram {
  std::vector<Vec3> colors;
  std::vector<double> weights;
  std::vector<std::uint32_t> counts;
  std::uint64_t total_pixels = 0;

  std::size_t size() const { return colors.size(); }
};

inline ColorHistogram build_histogram(const RgbImage& img, const UniversalHashParams& params) {
  if (img.size() == 0) throw std::invalid_argument("build_histogram: empty image");

  // Chained hash table over packed 24-bit keys. head[h] is the index of the
  // newest entry in bucket h; next[] threads the chain through entry indices.
  std::vector<std::int32_t> head(params.m, -1);
  std::vector<std::int32_t> next;
  std::vector<std::uint32_t> keys;

  ColorHistogram hist;
  hist.total_pixels = img.size();

  for (const RgbColor& px : img.pixels) {
    const std::uint32_t key = pack_rgb(px);
    const std::uint64_t h = universal_hash(px, params);
    std::int32_t i = head[h];
    while (i >= 0 && keys[std::size_t(i)] != key) i = next[std::size_t(i)];
    if (i >= 0) {
      ++hist.counts[std::size_t(i)];
    } else {
      const auto idx = std::int32_t(hist.colors.size());
      hist.colors.push_back(to_vec3(px));
      hist.counts.push_back(1);
      keys.push_back(key);
      next.push_back(head[h]);
      head[h] = idx;
    }
  }

  hist.weights.resize(hist.size());
  const double inv_total = 1.0 / double(hist.total_pixels);
  for (std::size_t i = 0; i < hist.size(); ++i)
    hist.weights[i] = double(hist.counts[i]) * inv_total;
  return hist;
}

inline constexpr std::uint64_t kDefaultHashSeed = 0x5eed0c01;

/// Default table sizing assumes about one unique color per four pixels,
/// typical of photographs.
inline ColorHistogram build_histogram(const RgbImage& img) {
  const std::uint64_t expected = (img.size() + 3) / 4;
  return build_histogram(img, make_hash_params(expected, kDefaultHashSeed));
}

/// Test-fixture dump: "r,g,b,count" per entry in scan order.
inline void write_histogram_csv(std::ostream& out, const ColorHistogram& hist) {
  out << "r,g,b,count\n";
  for (std::size_t i = 0; i < hist.size(); ++i) {
    out << int(hist.colors[i][0]) << ',' << int(hist.colors[i][1]) << ','
        << int(hist.colors[i][2]) << ',' << hist.counts[i] << '\n';
  }
}

}  // namespace colorq
