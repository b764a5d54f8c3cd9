#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "colorq/kmeans.hpp"
#include "colorq/palette.hpp"
#include "colorq/report.hpp"

namespace colorq {

/// Settings for the fuzzy clustering family. alpha_delta = 0 gives plain
/// fuzzy c-means; a positive delta enables the partition-index offset, where
/// alpha = delta * min_{i != j} ||v_i - v_j||^2 is recomputed every iteration
/// and subtracted from the (unsquared) point-prototype distances inside the
/// membership update.
struct FuzzyOptions {
  double q = 2.0;            // fuzziness, > 1
  int iters = 10;
  double alpha_delta = 0.0;  // in [0, 0.5)
  double clamp_floor = 1e-12;
};

/// One membership row: u_k proportional to g_k^(-2/(q-1)) with
/// g_k = max(||x - v_k|| - alpha, floor). Rows sum to 1 by construction.
inline std::vector<double> fuzzy_memberships(const Vec3& x, const Palette& prototypes, double q,
                                             double alpha, double floor = 1e-12) {
  const std::size_t k = prototypes.size();
  std::vector<double> u(k);
  const double exponent = -2.0 / (q - 1.0);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double g = std::max(std::sqrt(dist2(x, prototypes[j])) - alpha, floor);
    u[j] = q == 2.0 ? 1.0 / (g * g) : std::pow(g, exponent);
    total += u[j];
  }
  for (double& v : u) v /= total;
  return u;
}

struct FuzzyRunResult {
  Palette palette;
  RunReport report;  // sse_history carries the objective J_q per iteration
};

/// Alternating membership/prototype optimization in the linear-memory
/// formulation: memberships are recomputed row by row and folded into the
/// prototype accumulators, so no N x K matrix is ever stored. Frequency
/// weights multiply the u^q terms.
inline FuzzyRunResult fuzzy_cmeans(std::span<const Vec3> points, std::span<const double> weights,
                                   int k, const FuzzyOptions& opt, std::uint64_t seed,
                                   std::vector<Palette>* trajectory = nullptr) {
  if (opt.q <= 1.0) throw std::invalid_argument("fuzzy_cmeans: q must be > 1");
  if (opt.alpha_delta < 0.0 || opt.alpha_delta >= 0.5)
    throw std::invalid_argument("fuzzy_cmeans: delta must be in [0, 0.5)");
  if (opt.iters < 1) throw std::invalid_argument("fuzzy_cmeans: iters must be >= 1");

  StopWatch watch;
  FuzzyRunResult out;
  out.palette = init_centers(points, k, seed);

  const std::size_t n = points.size();
  const double exponent = -2.0 / (opt.q - 1.0);

  std::vector<double> t(std::size_t(k), 0.0);
  std::vector<double> d2row(std::size_t(k), 0.0);
  std::vector<Vec3> num(std::size_t(k), Vec3{0, 0, 0});
  std::vector<double> den(std::size_t(k), 0.0);

  for (int iter = 1; iter <= opt.iters; ++iter) {
    double alpha = 0.0;
    if (opt.alpha_delta > 0.0) {
      double min_d2 = std::numeric_limits<double>::infinity();
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          min_d2 = std::min(min_d2, dist2(out.palette[std::size_t(i)], out.palette[std::size_t(j)]));
      out.report.dist_evals += std::uint64_t(k) * (k - 1) / 2;
      alpha = opt.alpha_delta * min_d2;
    }

    std::fill(num.begin(), num.end(), Vec3{0, 0, 0});
    std::fill(den.begin(), den.end(), 0.0);
    double objective = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
      double total = 0.0;
      for (int j = 0; j < k; ++j) {
        const double d2v = dist2(points[i], out.palette[std::size_t(j)]);
        d2row[std::size_t(j)] = d2v;
        const double g = std::max(std::sqrt(d2v) - alpha, opt.clamp_floor);
        t[std::size_t(j)] = opt.q == 2.0 ? 1.0 / (g * g) : std::pow(g, exponent);
        total += t[std::size_t(j)];
      }
      const double w = weights[i];
      for (int j = 0; j < k; ++j) {
        const double u = t[std::size_t(j)] / total;
        const double uq = opt.q == 2.0 ? u * u : std::pow(u, opt.q);
        const double wuq = w * uq;
        num[std::size_t(j)][0] += wuq * points[i][0];
        num[std::size_t(j)][1] += wuq * points[i][1];
        num[std::size_t(j)][2] += wuq * points[i][2];
        den[std::size_t(j)] += wuq;
        objective += wuq * d2row[std::size_t(j)];
      }
    }
    out.report.dist_evals += std::uint64_t(n) * std::uint64_t(k);

    for (int j = 0; j < k; ++j)
      if (den[std::size_t(j)] > 0.0)
        out.palette[std::size_t(j)] = Vec3{num[std::size_t(j)][0] / den[std::size_t(j)],
                                           num[std::size_t(j)][1] / den[std::size_t(j)],
                                           num[std::size_t(j)][2] / den[std::size_t(j)]};

    out.report.sse_history.push_back(objective);
    out.report.iterations = iter;
    if (trajectory) trajectory->push_back(out.palette);
  }

  out.report.sse = out.report.sse_history.back();
  out.report.k = k;
  out.report.seed = seed;
  out.report.elapsed_ms = watch.elapsed_ms();
  return out;
}

inline FuzzyRunResult fcm(std::span<const Vec3> points, std::span<const double> weights, int k,
                          double q, int iters, std::uint64_t seed,
                          std::vector<Palette>* trajectory = nullptr) {
  FuzzyOptions opt;
  opt.q = q;
  opt.iters = iters;
  auto res = fuzzy_cmeans(points, weights, k, opt, seed, trajectory);
  res.report.method = "fcm";
  return res;
}

inline FuzzyRunResult pim(std::span<const Vec3> points, std::span<const double> weights, int k,
                          double q, double delta, int iters, std::uint64_t seed,
                          std::vector<Palette>* trajectory = nullptr) {
  FuzzyOptions opt;
  opt.q = q;
  opt.iters = iters;
  opt.alpha_delta = delta;
  auto res = fuzzy_cmeans(points, weights, k, opt, seed, trajectory);
  res.report.method = "pim";
  return res;
}

}  // namespace colorq
