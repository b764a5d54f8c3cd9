#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "colorq/color.hpp"

namespace colorq {

/// A set of K real-valued cluster centers in RGB space.
struct Palette {
  std::vector<Vec3> centers;

  Palette() = default;
  explicit Palette(std::vector<Vec3> c) : centers(std::move(c)) {}

  std::size_t size() const { return centers.size(); }
  bool empty() const { return centers.empty(); }
  Vec3& operator[](std::size_t i) { return centers[i]; }
  const Vec3& operator[](std::size_t i) const { return centers[i]; }
};

/// Rounded 8-bit view of a palette, used for pixel mapping and serialization.
inline std::vector<RgbColor> round_palette(const Palette& p) {
  std::vector<RgbColor> out;
  out.reserve(p.size());
  for (const Vec3& c : p.centers) out.push_back(round_to_rgb(c));
  return out;
}

/// One "R G B" float triple per line, ordered by palette index.
inline std::string palette_to_text(const Palette& p) {
  std::string out;
  char buf[96];
  for (const Vec3& c : p.centers) {
    std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g\n", c[0], c[1], c[2]);
    out += buf;
  }
  return out;
}

inline Palette palette_from_text(const std::string& text) {
  Palette p;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vec3 c{};
    if (!(ls >> c[0] >> c[1] >> c[2]))
      throw std::runtime_error("malformed palette line: '" + line + "'");
    p.centers.push_back(c);
  }
  return p;
}

inline void save_palette(const Palette& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << palette_to_text(p);
}

inline Palette load_palette(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return palette_from_text(ss.str());
}

}  // namespace colorq
