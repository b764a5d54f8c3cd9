#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "colorq/boxquant.hpp"
#include "colorq/fast_variants.hpp"
#include "colorq/fuzzy.hpp"
#include "colorq/histogram.hpp"
#include "colorq/kmeans.hpp"
#include "colorq/mmm.hpp"
#include "colorq/palette.hpp"
#include "colorq/report.hpp"

namespace colorq {

enum class MethodId { Mc, Wan, Wu, Mmm, Fcm, Pim, Km, KmC, Fkm, FkmC, Skm, Wsm, WsmC };

/// Raised for method ids that do not name any implemented quantizer, so the
/// CLI can report them separately from other bad parameters.
struct UnknownMethodError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline const char* method_name(MethodId id) {
  switch (id) {
    case MethodId::Mc: return "mc";
    case MethodId::Wan: return "wan";
    case MethodId::Wu: return "wu";
    case MethodId::Mmm: return "mmm";
    case MethodId::Fcm: return "fcm";
    case MethodId::Pim: return "pim";
    case MethodId::Km: return "km";
    case MethodId::KmC: return "km-c";
    case MethodId::Fkm: return "fkm";
    case MethodId::FkmC: return "fkm-c";
    case MethodId::Skm: return "skm";
    case MethodId::Wsm: return "wsm";
    case MethodId::WsmC: return "wsm-c";
  }
  return "?";
}

inline std::optional<MethodId> parse_method(const std::string& s) {
  static const std::pair<const char*, MethodId> table[] = {
      {"mc", MethodId::Mc},   {"wan", MethodId::Wan},     {"wu", MethodId::Wu},
      {"mmm", MethodId::Mmm}, {"fcm", MethodId::Fcm},     {"pim", MethodId::Pim},
      {"km", MethodId::Km},   {"km-c", MethodId::KmC},    {"fkm", MethodId::Fkm},
      {"fkm-c", MethodId::FkmC}, {"skm", MethodId::Skm},  {"wsm", MethodId::Wsm},
      {"wsm-c", MethodId::WsmC}};
  for (const auto& [name, id] : table)
    if (s == name) return id;
  return std::nullopt;
}

/// Whether the method draws random initial centers (and therefore varies with
/// the seed). The box splitters are fully deterministic.
inline bool method_is_seeded(MethodId id) {
  return id != MethodId::Mc && id != MethodId::Wan && id != MethodId::Wu;
}

inline bool method_is_convergent(MethodId id) {
  return id == MethodId::KmC || id == MethodId::FkmC || id == MethodId::WsmC || id == MethodId::Skm;
}

/// Per-method knobs with the defaults used throughout the benchmark harness.
struct MethodParams {
  MethodId id = MethodId::Wsm;
  int iters = 10;           // fixed-iteration budget (also the fuzzy budget)
  double epsilon = 1e-4;    // convergent threshold
  int k_prime = 8;          // fkm neighbor count
  int stable_iters = 10;    // skm warm-up iterations
  double theta = 1.0;       // skm stability threshold (squared distance)
  double q = 2.0;           // fcm/pim fuzziness
  double delta = 0.4;       // pim offset fraction
  bool fuzzy_on_pixels = false;  // run fcm/pim on raw pixels instead of the histogram

  Termination termination() const {
    return method_is_convergent(id) ? Termination::convergent(epsilon) : Termination::fixed(iters);
  }
};

struct QuantizeOutcome {
  Palette palette;
  RunReport report;
};

namespace methoddetail {

inline void pixels_as_points(const RgbImage& img, std::vector<Vec3>& points,
                             std::vector<double>& weights) {
  points.clear();
  points.reserve(img.size());
  for (const RgbColor& px : img.pixels) points.push_back(to_vec3(px));
  weights.assign(points.size(), 1.0 / double(points.size()));
}

}  // namespace methoddetail

/// Runs one palette generation. The reported time covers the whole
/// palette-generation phase (including data reduction where the method uses
/// it) but not image I/O or pixel mapping; the caller fills report.mse.
inline QuantizeOutcome generate_palette(const RgbImage& image, const MethodParams& mp, int k,
                                        std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  StopWatch watch;
  QuantizeOutcome out;
  out.report.method = method_name(mp.id);
  out.report.k = k;
  out.report.seed = seed;
  out.report.sse = std::nan("");

  switch (mp.id) {
    case MethodId::Mc:
      out.palette = median_cut(image, k);
      break;
    case MethodId::Wan:
      out.palette = wan_split(image, k);
      break;
    case MethodId::Wu:
      out.palette = wu_bipartition(image, k);
      break;

    case MethodId::Mmm: {
      const ColorHistogram hist = build_histogram(image);
      out.palette = mmm(hist, k, seed);
      out.report.iterations = 1;
      break;
    }

    case MethodId::Fcm:
    case MethodId::Pim: {
      FuzzyRunResult res;
      if (mp.fuzzy_on_pixels) {
        std::vector<Vec3> points;
        std::vector<double> weights;
        methoddetail::pixels_as_points(image, points, weights);
        res = mp.id == MethodId::Fcm ? fcm(points, weights, k, mp.q, mp.iters, seed)
                                     : pim(points, weights, k, mp.q, mp.delta, mp.iters, seed);
      } else {
        const ColorHistogram hist = build_histogram(image);
        res = mp.id == MethodId::Fcm ? fcm(hist.colors, hist.weights, k, mp.q, mp.iters, seed)
                                     : pim(hist.colors, hist.weights, k, mp.q, mp.delta, mp.iters, seed);
      }
      out.palette = std::move(res.palette);
      out.report = std::move(res.report);
      break;
    }

    case MethodId::Km:
    case MethodId::KmC: {
      auto res = run_km_full(image, k, mp.termination(), seed);
      out.palette = std::move(res.palette);
      out.report = std::move(res.report);
      break;
    }

    case MethodId::Fkm:
    case MethodId::FkmC:
    case MethodId::Skm: {
      const ColorHistogram hist = build_histogram(image);
      Palette init = init_centers(hist, k, seed);
      std::vector<Vec3> points;
      std::vector<double> weights;
      methoddetail::pixels_as_points(image, points, weights);
      KmRunResult res =
          mp.id == MethodId::Skm
              ? run_skm(points, weights, std::move(init), mp.stable_iters, mp.theta,
                        mp.termination())
              : run_fkm(points, weights, std::move(init), mp.k_prime, mp.termination());
      out.palette = std::move(res.palette);
      out.report = std::move(res.report);
      out.report.method = method_name(mp.id);
      break;
    }

    case MethodId::Wsm:
    case MethodId::WsmC: {
      const ColorHistogram hist = build_histogram(image);
      auto res = run_wsm(hist, k, mp.termination(), seed);
      out.palette = std::move(res.palette);
      out.report = std::move(res.report);
      break;
    }
  }

  out.report.method = method_name(mp.id);
  out.report.k = k;
  out.report.seed = seed;
  out.report.elapsed_ms = watch.elapsed_ms();
  return out;
}

}  // namespace colorq
