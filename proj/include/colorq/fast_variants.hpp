#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "colorq/kmeans.hpp"
#include "colorq/palette.hpp"
#include "colorq/report.hpp"

namespace colorq {

/// Finite-state k-means: the first iteration is a full nearest-center search;
/// afterwards each point only searches the k_prime centers nearest to the
/// center it was assigned to previously. Neighbor lists are rebuilt from the
/// current centers every iteration. k_prime == k reproduces conventional
/// k-means exactly.
inline KmRunResult run_fkm(std::span<const Vec3> points, std::span<const double> weights,
                           Palette initial, int k_prime, const Termination& term,
                           std::vector<Palette>* trajectory = nullptr,
                           std::vector<Memberships>* membership_trajectory = nullptr) {
  const int k = int(initial.size());
  if (k_prime < 1 || k_prime > k) throw std::invalid_argument("run_fkm: need 1 <= k_prime <= k");

  StopWatch watch;
  KmRunResult out;
  out.palette = std::move(initial);

  ClusterState state;
  const std::size_t n = points.size();
  double prev_sse = std::numeric_limits<double>::infinity();

  for (int iter = 1;; ++iter) {
    double sse = 0.0;
    if (iter == 1) {
      const AssignResult ar = assign_naive(points, weights, out.palette, state.memberships);
      sse = ar.weighted_sse;
      out.report.dist_evals += ar.dist_evals;
    } else {
      state.update_center_tables(out.palette, &out.report.dist_evals);
      for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t* order = state.order_row(state.memberships[i]);
        double best = dist2(points[i], out.palette[std::size_t(order[0])]);
        int best_c = order[0];
        for (int j = 1; j < k_prime; ++j) {
          const int t = order[j];
          const double d = dist2(points[i], out.palette[std::size_t(t)]);
          if (d < best || (d == best && t < best_c)) {
            best = d;
            best_c = t;
          }
        }
        state.memberships[i] = best_c;
        sse += weights[i] * best;
      }
      out.report.dist_evals += std::uint64_t(n) * std::uint64_t(k_prime);
    }

    out.report.sse_history.push_back(sse);
    out.report.iterations = iter;
    if (membership_trajectory) membership_trajectory->push_back(state.memberships);

    out.palette = update_centers(points, weights, state.memberships, out.palette);
    if (trajectory) trajectory->push_back(out.palette);

    if (term.mode == Termination::Mode::FixedIterations) {
      if (iter >= term.max_iters) break;
    } else {
      if (sse == 0.0) break;
      if ((prev_sse - sse) / sse <= term.epsilon) break;
      if (iter >= term.hard_cap) break;
    }
    prev_sse = sse;
  }

  out.report.sse = out.report.sse_history.back();
  out.report.elapsed_ms = watch.elapsed_ms();
  return out;
}

/// Stable-flags k-means: conventional for the first stable_iters iterations;
/// afterwards a center whose update moved it by at most theta (squared
/// distance) is frozen as stable, points assigned to stable centers stop
/// being reassigned, and only unstable centers are recomputed.
inline KmRunResult run_skm(std::span<const Vec3> points, std::span<const double> weights,
                           Palette initial, int stable_iters, double theta, const Termination& term,
                           std::vector<Palette>* trajectory = nullptr) {
  if (stable_iters < 1) throw std::invalid_argument("run_skm: stable_iters must be >= 1");
  if (theta < 0) throw std::invalid_argument("run_skm: theta must be >= 0");

  StopWatch watch;
  KmRunResult out;
  out.palette = std::move(initial);

  const std::size_t n = points.size();
  const int k = int(out.palette.size());
  Memberships members(n, 0);
  std::vector<double> point_dist(n, 0.0);  // cached squared distance to the owning center
  std::vector<bool> stable(std::size_t(k), false);
  double prev_sse = std::numeric_limits<double>::infinity();

  for (int iter = 1;; ++iter) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (iter > 1 && stable[std::size_t(members[i])]) {
        sse += weights[i] * point_dist[i];  // inactive: the owning center has not moved
        continue;
      }
      double best = dist2(points[i], out.palette[0]);
      int best_c = 0;
      for (int c = 1; c < k; ++c) {
        const double d = dist2(points[i], out.palette[std::size_t(c)]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      out.report.dist_evals += std::uint64_t(k);
      members[i] = best_c;
      point_dist[i] = best;
      sse += weights[i] * best;
    }

    out.report.sse_history.push_back(sse);
    out.report.iterations = iter;

    const Palette prev = out.palette;
    Palette updated = update_centers(points, weights, members, prev);
    for (int c = 0; c < k; ++c)
      if (stable[std::size_t(c)]) updated[std::size_t(c)] = prev[std::size_t(c)];
    out.palette = std::move(updated);

    if (iter >= stable_iters) {
      for (int c = 0; c < k; ++c)
        if (!stable[std::size_t(c)] &&
            dist2(out.palette[std::size_t(c)], prev[std::size_t(c)]) <= theta)
          stable[std::size_t(c)] = true;
    }
    if (trajectory) trajectory->push_back(out.palette);

    if (term.mode == Termination::Mode::FixedIterations) {
      if (iter >= term.max_iters) break;
    } else {
      if (sse == 0.0) break;
      if ((prev_sse - sse) / sse <= term.epsilon) break;
      if (iter >= term.hard_cap) break;
    }
    prev_sse = sse;
  }

  out.report.sse = out.report.sse_history.back();
  out.report.elapsed_ms = watch.elapsed_ms();
  return out;
}

}  // namespace colorq
