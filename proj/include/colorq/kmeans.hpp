#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "colorq/color.hpp"
#include "colorq/histogram.hpp"
#include "colorq/palette.hpp"
#include "colorq/report.hpp"

namespace colorq {

using Memberships = std::vector<std::int32_t>;

/// Stopping rule for the iterative quantizers: either a fixed iteration
/// budget, or run until the relative SSE decrease drops to epsilon
/// (with a hard cap as a safety valve).
struct Termination {
  enum class Mode { FixedIterations, Convergent };

  Mode mode = Mode::FixedIterations;
  int max_iters = 10;
  double epsilon = 1e-4;
  int hard_cap = 1000;

  static Termination fixed(int iters) { return Termination{Mode::FixedIterations, iters, 1e-4, 1000}; }
  static Termination convergent(double eps = 1e-4, int cap = 1000) {
    if (eps <= 0) throw std::invalid_argument("convergent termination requires epsilon > 0");
    return Termination{Mode::Convergent, 10, eps, cap};
  }
};

/// Unbiased draw from [0, bound) using the raw mt19937_64 stream. The
/// generator is fully specified by the standard, so seeded results are
/// identical across platforms.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % bound;
}

/// K distinct points chosen uniformly without replacement (partial
/// Fisher-Yates). Deterministic for a given (points, k, seed).
inline Palette init_centers(std::span<const Vec3> points, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("init_centers: k must be >= 1");
  if (std::size_t(k) > points.size())
    throw std::invalid_argument("init_centers: k exceeds the number of candidate points");

  std::vector<std::uint32_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::mt19937_64 rng(seed);

  Palette p;
  p.centers.reserve(std::size_t(k));
  for (int i = 0; i < k; ++i) {
    const std::uint64_t j = i + bounded_rand(rng, points.size() - std::size_t(i));
    std::swap(idx[std::size_t(i)], idx[j]);
    p.centers.push_back(points[idx[std::size_t(i)]]);
  }
  return p;
}

inline Palette init_centers(const ColorHistogram& hist, int k, std::uint64_t seed) {
  return init_centers(std::span<const Vec3>(hist.colors), k, seed);
}

struct AssignResult {
  double weighted_sse = 0.0;
  std::uint64_t dist_evals = 0;
};

/// Exhaustive nearest-center assignment; the pruning oracle. Ties go to the
/// lowest center index.
inline AssignResult assign_naive(std::span<const Vec3> points, std::span<const double> weights,
                                 const Palette& palette, Memberships& out) {
  if (palette.empty()) throw std::invalid_argument("assign_naive: empty palette");
  const std::size_t n = points.size();
  const std::size_t k = palette.size();
  out.resize(n);

  AssignResult res;
  for (std::size_t i = 0; i < n; ++i) {
    double best = dist2(points[i], palette[0]);
    std::size_t best_k = 0;
    for (std::size_t c = 1; c < k; ++c) {
      const double d = dist2(points[i], palette[c]);
      if (d < best) {
        best = d;
        best_k = c;
      }
    }
    out[i] = std::int32_t(best_k);
    res.weighted_sse += weights[i] * best;
  }
  res.dist_evals = std::uint64_t(n) * k;
  return res;
}

inline Memberships assign_naive(const ColorHistogram& hist, const Palette& palette) {
  Memberships m;
  assign_naive(hist.colors, hist.weights, palette, m);
  return m;
}

/// Working set of the accelerated assignment: previous memberships, the K x K
/// squared center-center distance table d, and the row-sorted order matrix M
/// (row i lists all centers by increasing distance from center i, starting
/// with i itself).
struct ClusterState {
  Memberships memberships;
  std::vector<double> center_dists;        // k*k, symmetric, zero diagonal
  std::vector<std::int32_t> sorted_order;  // k*k
  int k = 0;

  double d(int i, int j) const { return center_dists[std::size_t(i) * k + j]; }
  const std::int32_t* order_row(int i) const { return &sorted_order[std::size_t(i) * k]; }

  /// Recomputes d and M for the given centers, bit-identical to a full
  /// rebuild. Between iterations only some centers move, so distances whose
  /// endpoints both held still are kept, and rows (nearly sorted already) are
  /// repaired by insertion. Counts the recomputed pairwise distances into
  /// `pair_evals` when provided.
  void update_center_tables(const Palette& palette, std::uint64_t* pair_evals = nullptr) {
    const int nk = int(palette.size());
    const bool incremental = nk == k && prev_centers_.size() == std::size_t(nk);
    k = nk;

    moved_.assign(std::size_t(k), true);
    if (incremental)
      for (int i = 0; i < k; ++i) moved_[std::size_t(i)] = palette[std::size_t(i)] != prev_centers_[std::size_t(i)];

    if (!incremental) {
      center_dists.assign(std::size_t(k) * k, 0.0);
      sorted_order.resize(std::size_t(k) * k);
    }

    std::uint64_t evals = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        if (incremental && !moved_[std::size_t(i)] && !moved_[std::size_t(j)]) continue;
        const double d2 = dist2(palette[std::size_t(i)], palette[std::size_t(j)]);
        center_dists[std::size_t(i) * k + j] = d2;
        center_dists[std::size_t(j) * k + i] = d2;
        ++evals;
      }
    if (pair_evals) *pair_evals += evals;

    for (int i = 0; i < k; ++i) {
      auto* row = &sorted_order[std::size_t(i) * k];
      const double* drow = &center_dists[std::size_t(i) * k];
      const auto before = [drow](std::int32_t a, std::int32_t b) {
        return drow[a] != drow[b] ? drow[a] < drow[b] : a < b;
      };
      if (!incremental) {
        int n = 0;
        for (int j = 0; j < k; ++j)
          if (j != i) row[1 + n++] = j;
        row[0] = i;  // self first, even if another center coincides
        std::sort(row + 1, row + k, before);
      } else {
        // the previous permutation is almost in order; insertion repair
        for (int j = 2; j < k; ++j) {
          const std::int32_t v = row[j];
          int p = j - 1;
          while (p >= 1 && before(v, row[p])) {
            row[p + 1] = row[p];
            --p;
          }
          row[p + 1] = v;
        }
      }
    }

    prev_centers_ = palette.centers;
  }

 private:
  std::vector<Vec3> prev_centers_;
  std::vector<bool> moved_;
};

/// Called when the sorted scan for one point stops early: all centers from
/// `first_skipped_rank` onward in M[prev_center] were skipped.
using SkipAudit =
    std::function<void(std::size_t point, int prev_center, int first_skipped_rank, double prev_dist)>;

/// Nearest-center assignment that scans candidates in increasing
/// center-center distance from each point's previous center and stops as soon
/// as d[p][t] >= 4 * prev_dist: by the triangle inequality no remaining
/// center can be closer. Produces the same memberships as assign_naive
/// (ties to the lowest index).
inline AssignResult assign_sort_means(std::span<const Vec3> points, std::span<const double> weights,
                                      const Palette& palette, ClusterState& state,
                                      const SkipAudit* audit = nullptr) {
  const std::size_t n = points.size();
  const int k = int(palette.size());
  if (state.k != k || state.memberships.size() != n)
    throw std::invalid_argument("assign_sort_means: state does not match inputs");

  AssignResult res;
  std::uint64_t evals = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int p = state.memberships[i];
    const double prev_dist = dist2(points[i], palette[std::size_t(p)]);
    ++evals;
    double min_dist = prev_dist;
    int best = p;

    const std::int32_t* order = state.order_row(p);
    const double* drow = &state.center_dists[std::size_t(p) * k];
    const double bound = 4.0 * prev_dist;
    for (int j = 1; j < k; ++j) {
      const int t = order[j];
      if (drow[t] >= bound) {
        if (audit) (*audit)(i, p, j, prev_dist);
        break;
      }
      const double dist = dist2(points[i], palette[std::size_t(t)]);
      ++evals;
      if (dist < min_dist || (dist == min_dist && t < best)) {
        min_dist = dist;
        best = t;
      }
    }
    state.memberships[i] = best;
    res.weighted_sse += weights[i] * min_dist;
  }
  res.dist_evals = evals;
  return res;
}

/// Weighted mean of each cluster. An empty cluster is re-seeded at the point
/// farthest (squared distance) from its previously assigned center, skipping
/// points already used to re-seed another cluster this round; its membership
/// corrects itself on the next assignment.
inline Palette update_centers(std::span<const Vec3> points, std::span<const double> weights,
                              const Memberships& memberships, const Palette& prev) {
  const std::size_t n = points.size();
  const std::size_t k = prev.size();

  std::vector<Vec3> sums(k, Vec3{0, 0, 0});
  std::vector<double> wsum(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = std::size_t(memberships[i]);
    const double w = weights[i];
    sums[c][0] += w * points[i][0];
    sums[c][1] += w * points[i][1];
    sums[c][2] += w * points[i][2];
    wsum[c] += w;
  }

  Palette next;
  next.centers.resize(k);
  std::vector<std::size_t> empty;
  for (std::size_t c = 0; c < k; ++c) {
    if (wsum[c] > 0.0) {
      next[c] = Vec3{sums[c][0] / wsum[c], sums[c][1] / wsum[c], sums[c][2] / wsum[c]};
    } else {
      empty.push_back(c);
    }
  }

  if (!empty.empty()) {
    std::vector<Vec3> taken;
    for (const std::size_t c : empty) {
      double best = -1.0;
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = dist2(points[i], prev[std::size_t(memberships[i])]);
        if (d > best) {
          bool used = false;
          for (const Vec3& t : taken)
            if (t == points[i]) {
              used = true;
              break;
            }
          if (used) continue;
          best = d;
          best_i = i;
        }
      }
      next[c] = points[best_i];
      taken.push_back(points[best_i]);
    }
  }
  return next;
}

inline Palette update_centers(const ColorHistogram& hist, const Memberships& memberships,
                              const Palette& prev) {
  return update_centers(std::span<const Vec3>(hist.colors), std::span<const double>(hist.weights),
                        memberships, prev);
}

/// Sum_i w_i * ||x_i - c_{m[i]}||^2. With weights normalized by the pixel
/// count this equals the full-image MSE of the induced mapping.
inline double weighted_sse(std::span<const Vec3> points, std::span<const double> weights,
                           const Palette& palette, const Memberships& memberships) {
  double sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    sse += weights[i] * dist2(points[i], palette[std::size_t(memberships[i])]);
  return sse;
}

inline double weighted_sse(const ColorHistogram& hist, const Palette& palette,
                           const Memberships& memberships) {
  return weighted_sse(hist.colors, hist.weights, palette, memberships);
}

enum class AssignMode {
  Naive,      // exhaustive scan every iteration (conventional k-means)
  SortMeans,  // naive bootstrap, then triangle-inequality pruned scans
};

struct KmRunResult {
  Palette palette;
  RunReport report;
};

/// The shared batch iteration: assign, record SSE, update, test termination.
/// `trajectory`, when given, receives the palette after every update.
///
/// In SortMeans mode the first pass already runs the pruned scan, seeded with
/// all-zero memberships: the early-exit bound only needs *some* valid
/// starting center per point, so the result equals the exhaustive scan from
/// the very first iteration.
inline KmRunResult run_weighted_kmeans(std::span<const Vec3> points, std::span<const double> weights,
                                       Palette initial, const Termination& term, AssignMode mode,
                                       std::vector<Palette>* trajectory = nullptr,
                                       const SkipAudit* audit = nullptr) {
  StopWatch watch;
  KmRunResult out;
  out.palette = std::move(initial);

  ClusterState state;
  double prev_sse = std::numeric_limits<double>::infinity();

  for (int iter = 1;; ++iter) {
    AssignResult ar;
    if (mode == AssignMode::Naive) {
      ar = assign_naive(points, weights, out.palette, state.memberships);
    } else {
      if (iter == 1) state.memberships.assign(points.size(), 0);
      state.update_center_tables(out.palette, &out.report.dist_evals);
      ar = assign_sort_means(points, weights, out.palette, state, audit);
    }
    out.report.dist_evals += ar.dist_evals;
    out.report.sse_history.push_back(ar.weighted_sse);
    out.report.iterations = iter;

    out.palette = update_centers(points, weights, state.memberships, out.palette);
    if (trajectory) trajectory->push_back(out.palette);

    if (term.mode == Termination::Mode::FixedIterations) {
      if (iter >= term.max_iters) break;
    } else {
      if (ar.weighted_sse == 0.0) break;
      if ((prev_sse - ar.weighted_sse) / ar.weighted_sse <= term.epsilon) break;
      if (iter >= term.hard_cap) break;
    }
    prev_sse = ar.weighted_sse;
  }

  out.report.sse = out.report.sse_history.back();
  out.report.elapsed_ms = watch.elapsed_ms();
  return out;
}

/// Weighted Sort-Means over an arbitrary weighted point set.
inline KmRunResult run_wsm_points(std::span<const Vec3> points, std::span<const double> weights,
                                  int k, const Termination& term, std::uint64_t seed,
                                  std::vector<Palette>* trajectory = nullptr) {
  StopWatch watch;
  auto res = run_weighted_kmeans(points, weights, init_centers(points, k, seed), term,
                                 AssignMode::SortMeans, trajectory);
  res.report.method = term.mode == Termination::Mode::Convergent ? "wsm-c" : "wsm";
  res.report.k = k;
  res.report.seed = seed;
  res.report.elapsed_ms = watch.elapsed_ms();
  return res;
}

/// Weighted Sort-Means: k-means over the unique-color histogram with
/// frequency weights and exact triangle-inequality pruning.
inline KmRunResult run_wsm(const ColorHistogram& hist, int k, const Termination& term,
                           std::uint64_t seed, std::vector<Palette>* trajectory = nullptr) {
  StopWatch watch;
  auto res = run_weighted_kmeans(hist.colors, hist.weights, init_centers(hist, k, seed), term,
                                 AssignMode::SortMeans, trajectory);
  res.report.method = term.mode == Termination::Mode::Convergent ? "wsm-c" : "wsm";
  res.report.k = k;
  res.report.seed = seed;
  res.report.elapsed_ms = watch.elapsed_ms();
  return res;
}

/// Conventional k-means over every pixel (the unaccelerated baseline).
/// Initial centers are K distinct colors drawn with the same seeded
/// procedure as run_wsm, so trajectories are comparable.
inline KmRunResult run_km_full(const RgbImage& image, int k, const Termination& term,
                               std::uint64_t seed, std::vector<Palette>* trajectory = nullptr) {
  StopWatch watch;
  const ColorHistogram hist = build_histogram(image);
  const Palette init = init_centers(hist, k, seed);

  std::vector<Vec3> points;
  points.reserve(image.size());
  for (const RgbColor& px : image.pixels) points.push_back(to_vec3(px));
  const std::vector<double> weights(points.size(), 1.0 / double(points.size()));

  auto res = run_weighted_kmeans(points, weights, init, term, AssignMode::Naive, trajectory);
  res.report.method = term.mode == Termination::Mode::Convergent ? "km-c" : "km";
  res.report.k = k;
  res.report.seed = seed;
  res.report.elapsed_ms = watch.elapsed_ms();
  return res;
}

}  // namespace colorq
