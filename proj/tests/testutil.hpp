#pragma once

// Shared fixtures for the test suites: deterministic synthetic images and
// random weighted point instances.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "colorq/color.hpp"
#include "colorq/histogram.hpp"

namespace testutil {

// Multi-octave value-noise field in [-1, 1], bilinearly interpolated.
class NoiseField {
 public:
  NoiseField(std::mt19937_64& rng, double base_amp) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double amp = base_amp;
    for (int cells = 2; cells <= 32; cells *= 2) {
      Octave oct;
      oct.cells = cells;
      oct.amp = amp;
      oct.v.resize(std::size_t(cells + 1) * std::size_t(cells + 1));
      for (double& x : oct.v) x = uni(rng);
      octaves_.push_back(std::move(oct));
      amp *= 0.55;
    }
  }

  double sample(double u, double v) const {
    double out = 0;
    for (const Octave& oct : octaves_) {
      const double fx = u * oct.cells, fy = v * oct.cells;
      const int ix = std::min(int(fx), oct.cells - 1);
      const int iy = std::min(int(fy), oct.cells - 1);
      const double tx = fx - ix, ty = fy - iy;
      const int stride = oct.cells + 1;
      const double v00 = oct.v[std::size_t(iy) * stride + ix];
      const double v10 = oct.v[std::size_t(iy) * stride + ix + 1];
      const double v01 = oct.v[std::size_t(iy + 1) * stride + ix];
      const double v11 = oct.v[std::size_t(iy + 1) * stride + ix + 1];
      const double top = v00 + (v10 - v00) * tx;
      const double bot = v01 + (v11 - v01) * tx;
      out += oct.amp * (top + (bot - top) * ty);
    }
    return out;
  }

 private:
  struct Octave {
    int cells;
    double amp;
    std::vector<double> v;
  };
  std::vector<Octave> octaves_;
};

// Photo-like synthetic image: a few smoothly bounded regions with distinct
// base hues (objects), a dominant shared luminance field, weaker per-channel
// chroma fields, and fine per-pixel noise. Channels correlate the way they do
// in photographs, the color distribution is multimodal, and the unique color
// count is large.
inline colorq::RgbImage synth_photo(int w, int h, std::uint64_t seed, double noise_amp = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  const int nregions = 4 + int(seed % 4);
  std::vector<std::array<double, 3>> region_base(std::size_t(nregions), {0, 0, 0});
  std::uniform_real_distribution<double> hue(55.0, 200.0);
  for (auto& b : region_base) b = {hue(rng), hue(rng), hue(rng)};

  const NoiseField region_field(rng, 1.0);
  const NoiseField luma(rng, 55.0);
  const NoiseField chroma_r(rng, 22.0);
  const NoiseField chroma_g(rng, 22.0);
  const NoiseField chroma_b(rng, 22.0);
  std::uniform_real_distribution<double> noise(-noise_amp, noise_amp);

  colorq::RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = double(x) / w, v = double(y) / h;
      const double rf = region_field.sample(u, v);  // roughly in [-2, 2]
      const int region = std::clamp(int((rf * 0.3 + 0.5) * nregions), 0, nregions - 1);
      const auto& base = region_base[std::size_t(region)];
      const double l = luma.sample(u, v);
      const colorq::Vec3 px{base[0] + l + chroma_r.sample(u, v) + noise(rng),
                            base[1] + l + chroma_g.sample(u, v) + noise(rng),
                            base[2] + l + chroma_b.sample(u, v) + noise(rng)};
      img.at(x, y) = colorq::round_to_rgb(px);
    }
  }
  return img;
}

// Image drawn from a limited random color table with a skewed frequency
// distribution, so unique-color weights vary widely.
inline colorq::RgbImage synth_palette_image(int w, int h, int ncolors, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> chan(0, 255);
  std::vector<colorq::RgbColor> table;
  table.reserve(std::size_t(ncolors));
  for (int i = 0; i < ncolors; ++i)
    table.push_back(colorq::RgbColor{std::uint8_t(chan(rng)), std::uint8_t(chan(rng)),
                                     std::uint8_t(chan(rng))});

  std::vector<double> freq(std::size_t(ncolors), 0.0);
  for (int i = 0; i < ncolors; ++i) freq[std::size_t(i)] = 1.0 / double(i + 1);
  std::discrete_distribution<int> pick(freq.begin(), freq.end());

  colorq::RgbImage img(w, h);
  for (auto& px : img.pixels) px = table[std::size_t(pick(rng))];
  return img;
}

struct Instance {
  std::vector<colorq::Vec3> points;
  std::vector<double> weights;
};

// Uniformly random points in the RGB cube with normalized random weights.
inline Instance random_instance(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 255.0);
  std::uniform_real_distribution<double> wdist(0.05, 1.0);
  Instance inst;
  inst.points.reserve(n);
  inst.weights.reserve(n);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    inst.points.push_back({coord(rng), coord(rng), coord(rng)});
    inst.weights.push_back(wdist(rng));
    total += inst.weights.back();
  }
  for (double& w : inst.weights) w /= total;
  return inst;
}

// Gaussian blobs; gives k-means something worth pruning.
inline Instance blob_instance(std::size_t n, int nblobs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(20.0, 235.0);
  std::normal_distribution<double> jitter(0.0, 12.0);
  std::uniform_int_distribution<int> pick(0, nblobs - 1);
  std::uniform_real_distribution<double> wdist(0.05, 1.0);

  std::vector<colorq::Vec3> blobs;
  for (int b = 0; b < nblobs; ++b) blobs.push_back({center(rng), center(rng), center(rng)});

  Instance inst;
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const colorq::Vec3& c = blobs[std::size_t(pick(rng))];
    auto clamp = [](double v) { return std::min(255.0, std::max(0.0, v)); };
    inst.points.push_back({clamp(c[0] + jitter(rng)), clamp(c[1] + jitter(rng)), clamp(c[2] + jitter(rng))});
    inst.weights.push_back(wdist(rng));
    total += inst.weights.back();
  }
  for (double& w : inst.weights) w /= total;
  return inst;
}

}  // namespace testutil
