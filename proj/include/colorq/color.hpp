#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace colorq {

/// Real-valued RGB point used for all clustering math. Channels live in
/// [0, 255] but are not constrained to integers.
using Vec3 = std::array<double, 3>;

/// An 8-bit RGB pixel.
struct RgbColor {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const RgbColor&, const RgbColor&) = default;
};

/// Packs a color into a single 24-bit key (r high, b low).
constexpr std::uint32_t pack_rgb(RgbColor c) {
  return (std::uint32_t(c.r) << 16) | (std::uint32_t(c.g) << 8) | std::uint32_t(c.b);
}

constexpr RgbColor unpack_rgb(std::uint32_t key) {
  return RgbColor{std::uint8_t(key >> 16), std::uint8_t(key >> 8), std::uint8_t(key)};
}

inline Vec3 to_vec3(RgbColor c) {
  return Vec3{double(c.r), double(c.g), double(c.b)};
}

/// Rounds a real-valued color to the nearest 8-bit pixel, clamping to [0, 255].
inline RgbColor round_to_rgb(const Vec3& v) {
  auto chan = [](double x) {
    long r = std::lround(x);
    if (r < 0) r = 0;
    if (r > 255) r = 255;
    return std::uint8_t(r);
  };
  return RgbColor{chan(v[0]), chan(v[1]), chan(v[2])};
}

/// Squared Euclidean distance between two real-valued colors.
inline double dist2(const Vec3& a, const Vec3& b) {
  const double dr = a[0] - b[0];
  const double dg = a[1] - b[1];
  const double db = a[2] - b[2];
  return dr * dr + dg * dg + db * db;
}

/// Row-major raster of 8-bit RGB pixels.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<RgbColor> pixels;

  RgbImage() = default;

  RgbImage(int w, int h, RgbColor fill = RgbColor{})
      : width(w), height(h), pixels(std::size_t(w) * std::size_t(h), fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("image dimensions must be positive");
  }

  std::size_t size() const { return pixels.size(); }

  RgbColor& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
  const RgbColor& at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

}  // namespace colorq
