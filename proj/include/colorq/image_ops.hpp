#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "colorq/color.hpp"
#include "colorq/palette.hpp"

namespace colorq {

/// Replaces every pixel by the nearest rounded palette entry (squared
/// Euclidean distance, ties to the lowest palette index). Distances are taken
/// against the rounded entries, which makes the mapping a projection: mapping
/// an already-mapped image is a no-op.
inline RgbImage map_pixels(const RgbImage& img, const Palette& palette) {
  if (palette.empty()) throw std::invalid_argument("map_pixels: empty palette");

  const std::vector<RgbColor> rounded = round_palette(palette);

  // Distinct input colors repeat heavily in photographs; resolve each
  // 24-bit color once.
  std::unordered_map<std::uint32_t, RgbColor> resolved;
  resolved.reserve(1024);

  RgbImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const RgbColor px = img.pixels[i];
    const std::uint32_t key = pack_rgb(px);
    auto it = resolved.find(key);
    if (it == resolved.end()) {
      std::int32_t best = INT32_MAX;
      std::size_t best_idx = 0;
      for (std::size_t k = 0; k < rounded.size(); ++k) {
        const std::int32_t dr = std::int32_t(px.r) - rounded[k].r;
        const std::int32_t dg = std::int32_t(px.g) - rounded[k].g;
        const std::int32_t db = std::int32_t(px.b) - rounded[k].b;
        const std::int32_t d = dr * dr + dg * dg + db * db;
        if (d < best) {
          best = d;
          best_idx = k;
        }
      }
      it = resolved.emplace(key, rounded[best_idx]).first;
    }
    out.pixels[i] = it->second;
  }
  return out;
}

/// Per-channel difference rendering: 255 - min(255, 4*|orig - quant|).
/// Identical images come out uniformly white.
inline RgbImage error_image(const RgbImage& original, const RgbImage& quantized) {
  if (original.width != quantized.width || original.height != quantized.height)
    throw std::invalid_argument("error_image: dimension mismatch");

  auto chan = [](std::uint8_t a, std::uint8_t b) {
    const int diff = 4 * std::abs(int(a) - int(b));
    return std::uint8_t(255 - (diff > 255 ? 255 : diff));
  };

  RgbImage out(original.width, original.height);
  for (std::size_t i = 0; i < original.size(); ++i) {
    const RgbColor& o = original.pixels[i];
    const RgbColor& q = quantized.pixels[i];
    out.pixels[i] = RgbColor{chan(o.r, q.r), chan(o.g, q.g), chan(o.b, q.b)};
  }
  return out;
}

}  // namespace colorq
