#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "colorq/color.hpp"

namespace colorq {

/// Parse failure for binary PPM input. `kind` distinguishes the failure modes
/// so callers can report them separately.
struct PpmError : std::runtime_error {
  enum class Kind { BadMagic, BadHeader, BadMaxval, Truncated };

  PpmError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}

  Kind kind;
};

namespace detail {

// Header token scanner: skips whitespace and '#' comments (which run to
// end of line), then reads one token.
class PpmScanner {
 public:
  explicit PpmScanner(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::string next_token() {
    skip_space_and_comments();
    std::string tok;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) tok.push_back(char(bytes_[pos_++]));
    if (tok.empty()) throw PpmError(PpmError::Kind::BadHeader, "unexpected end of PPM header");
    return tok;
  }

  int next_int(const char* what) {
    const std::string tok = next_token();
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw PpmError(PpmError::Kind::BadHeader, std::string("invalid ") + what + " in PPM header: '" + tok + "'");
    }
    if (used != tok.size() || value <= 0)
      throw PpmError(PpmError::Kind::BadHeader, std::string("invalid ") + what + " in PPM header: '" + tok + "'");
    return value;
  }

  // One whitespace byte separates the maxval from the pixel payload.
  void consume_single_space() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
      throw PpmError(PpmError::Kind::BadHeader, "missing separator before PPM pixel data");
    ++pos_;
  }

  std::span<const unsigned char> rest() const { return bytes_.subspan(pos_); }

 private:
  static bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Decodes a binary PPM (magic "P6", maxval 255). '#' comments are accepted
/// anywhere in the header.
inline RgbImage read_ppm(std::span<const unsigned char> bytes) {
  detail::PpmScanner scan(bytes);

  std::string magic;
  try {
    magic = scan.next_token();
  } catch (const PpmError&) {
    throw PpmError(PpmError::Kind::BadMagic, "not a PPM file: empty input");
  }
  if (magic != "P6")
    throw PpmError(PpmError::Kind::BadMagic, "not a binary PPM: expected magic 'P6', got '" + magic + "'");

  const int width = scan.next_int("width");
  const int height = scan.next_int("height");
  const int maxval = scan.next_int("maxval");
  if (maxval != 255)
    throw PpmError(PpmError::Kind::BadMaxval, "unsupported maxval " + std::to_string(maxval) + " (only 255)");
  scan.consume_single_space();

  const auto payload = scan.rest();
  const std::size_t need = std::size_t(width) * std::size_t(height) * 3;
  if (payload.size() < need)
    throw PpmError(PpmError::Kind::Truncated,
                   "truncated PPM pixel data: need " + std::to_string(need) + " bytes, have " +
                       std::to_string(payload.size()));

  RgbImage img(width, height);
  for (std::size_t i = 0; i < img.size(); ++i)
    img.pixels[i] = RgbColor{payload[3 * i], payload[3 * i + 1], payload[3 * i + 2]};
  return img;
}

/// Encodes as "P6\n<w> <h>\n255\n" followed by raw pixel bytes.
inline std::vector<unsigned char> write_ppm(const RgbImage& img) {
  std::string header =
      "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<unsigned char> out;
  out.reserve(header.size() + img.size() * 3);
  out.insert(out.end(), header.begin(), header.end());
  for (const RgbColor& p : img.pixels) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

inline RgbImage load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_ppm(bytes);
}

inline void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  const auto bytes = write_ppm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace colorq
