#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "colorq/color.hpp"
#include "colorq/palette.hpp"

namespace colorq {

namespace boxdetail {

// A 32x32x32 grid over RGB (5 bits per channel). Each occupied cell keeps the
// moments of the original 8-bit pixel values that fell into it: count, the
// per-channel sum, and the six second-order products needed for variances and
// covariances.
struct CellGrid {
  struct Cell {
    std::uint32_t id = 0;  // r5 << 10 | g5 << 5 | b5
    double count = 0;
    Vec3 sum{0, 0, 0};
    std::array<double, 6> m2{0, 0, 0, 0, 0, 0};  // rr, gg, bb, rg, rb, gb
  };

  std::vector<Cell> cells;

  static int coord(std::uint32_t id, int axis) { return int(id >> (10 - 5 * axis)) & 31; }
};

inline CellGrid build_grid(const RgbImage& img) {
  std::vector<CellGrid::Cell> slots(32 * 32 * 32);
  for (const RgbColor& px : img.pixels) {
    const std::uint32_t id =
        (std::uint32_t(px.r >> 3) << 10) | (std::uint32_t(px.g >> 3) << 5) | std::uint32_t(px.b >> 3);
    auto& c = slots[id];
    const double r = px.r, g = px.g, b = px.b;
    c.count += 1;
    c.sum[0] += r;
    c.sum[1] += g;
    c.sum[2] += b;
    c.m2[0] += r * r;
    c.m2[1] += g * g;
    c.m2[2] += b * b;
    c.m2[3] += r * g;
    c.m2[4] += r * b;
    c.m2[5] += g * b;
  }
  CellGrid grid;
  for (std::uint32_t id = 0; id < slots.size(); ++id)
    if (slots[id].count > 0) {
      slots[id].id = id;
      grid.cells.push_back(slots[id]);
    }
  return grid;
}

struct Agg {
  double n = 0;
  Vec3 sum{0, 0, 0};
  std::array<double, 6> m2{0, 0, 0, 0, 0, 0};

  void add(const CellGrid::Cell& c) {
    n += c.count;
    for (int i = 0; i < 3; ++i) sum[i] += c.sum[i];
    for (int i = 0; i < 6; ++i) m2[i] += c.m2[i];
  }

  void add_agg(const Agg& o) {
    n += o.n;
    for (int i = 0; i < 3; ++i) sum[i] += o.sum[i];
    for (int i = 0; i < 6; ++i) m2[i] += o.m2[i];
  }

  // Total squared deviation from the mean, all channels.
  double sse() const {
    if (n <= 0) return 0;
    const double s = m2[0] + m2[1] + m2[2];
    return s - (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]) / n;
  }

  // Squared deviation of the projections onto unit vector v.
  double marginal_sse(const Vec3& v) const {
    if (n <= 0) return 0;
    const double vm2v = v[0] * v[0] * m2[0] + v[1] * v[1] * m2[1] + v[2] * v[2] * m2[2] +
                        2 * (v[0] * v[1] * m2[3] + v[0] * v[2] * m2[4] + v[1] * v[2] * m2[5]);
    const double vs = v[0] * sum[0] + v[1] * sum[1] + v[2] * sum[2];
    return vm2v - vs * vs / n;
  }

  Vec3 mean() const { return Vec3{sum[0] / n, sum[1] / n, sum[2] / n}; }
};

struct Box {
  std::vector<std::uint32_t> cell_ids;  // indices into grid.cells
  Agg agg;
  bool dead = false;  // a split attempt failed; never reconsidered
};

inline Box make_box(const CellGrid& grid, std::vector<std::uint32_t> ids) {
  Box b;
  b.cell_ids = std::move(ids);
  for (std::uint32_t i : b.cell_ids) b.agg.add(grid.cells[i]);
  return b;
}

/// Principal eigenvector of the covariance of an aggregate, by power
/// iteration to tolerance 1e-10. Sign is fixed so the largest-magnitude
/// component is positive. Returns false when the covariance is (near) zero.
inline bool principal_axis(const Agg& a, Vec3& v_out) {
  const Vec3 mu = a.mean();
  double c[3][3];
  c[0][0] = a.m2[0] / a.n - mu[0] * mu[0];
  c[1][1] = a.m2[1] / a.n - mu[1] * mu[1];
  c[2][2] = a.m2[2] / a.n - mu[2] * mu[2];
  c[0][1] = c[1][0] = a.m2[3] / a.n - mu[0] * mu[1];
  c[0][2] = c[2][0] = a.m2[4] / a.n - mu[0] * mu[2];
  c[1][2] = c[2][1] = a.m2[5] / a.n - mu[1] * mu[2];

  const double trace = c[0][0] + c[1][1] + c[2][2];
  if (trace <= 1e-12) return false;

  // Start along the axis of largest variance.
  Vec3 v{0, 0, 0};
  int start = 0;
  if (c[1][1] > c[start][start]) start = 1;
  if (c[2][2] > c[start][start]) start = 2;
  v[start] = 1.0;

  for (int it = 0; it < 10000; ++it) {
    Vec3 w{c[0][0] * v[0] + c[0][1] * v[1] + c[0][2] * v[2],
           c[1][0] * v[0] + c[1][1] * v[1] + c[1][2] * v[2],
           c[2][0] * v[0] + c[2][1] * v[1] + c[2][2] * v[2]};
    const double norm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    if (norm <= 1e-300) return false;
    for (int i = 0; i < 3; ++i) w[i] /= norm;
    // the eigenvector is defined up to sign
    const double dot = w[0] * v[0] + w[1] * v[1] + w[2] * v[2];
    if (dot < 0)
      for (int i = 0; i < 3; ++i) w[i] = -w[i];
    const double delta = std::abs(w[0] - v[0]) + std::abs(w[1] - v[1]) + std::abs(w[2] - v[2]);
    v = w;
    if (delta < 1e-10) break;
  }

  int big = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[big])) big = i;
  if (v[big] < 0)
    for (int i = 0; i < 3; ++i) v[i] = -v[i];
  v_out = v;
  return true;
}

}  // namespace boxdetail

enum class BoxMethod {
  MedianCut,          // most-populous box, longest axis, population median
  AxisMarginal,       // max-SSE box, highest-variance axis, min marginal squared error
  AxisMeanCut,        // max-SSE box, highest-variance axis, cut at the marginal mean
  PrincipalMarginal,  // max-SSE box, principal eigenvector axis, min marginal squared error
  AxisMinSse,         // max-SSE box, best axis-aligned cut by summed SSE
};

/// Shared driver for the divisive box quantizers. Splits until K boxes exist
/// or nothing remains splittable (a box spanning a single occupied grid cell
/// cannot split further); in the latter case fewer than K centers come back.
/// Palette entries are the population means of the final boxes.
inline Palette box_quantize(const RgbImage& img, int k, BoxMethod method) {
  if (k < 1) throw std::invalid_argument("box_quantize: k must be >= 1");
  if (img.size() == 0) throw std::invalid_argument("box_quantize: empty image");

  using namespace boxdetail;
  const CellGrid grid = build_grid(img);

  std::vector<Box> boxes;
  {
    std::vector<std::uint32_t> all(grid.cells.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    boxes.push_back(make_box(grid, std::move(all)));
  }

  while (int(boxes.size()) < k) {
    // Select the best live box with at least two cells; earlier boxes win ties.
    int pick = -1;
    double best_score = -1.0;
    for (int i = 0; i < int(boxes.size()); ++i) {
      const Box& b = boxes[std::size_t(i)];
      if (b.dead || b.cell_ids.size() < 2) continue;
      const double score = method == BoxMethod::MedianCut ? b.agg.n : b.agg.sse();
      if (score > best_score) {
        best_score = score;
        pick = i;
      }
    }
    if (pick < 0) break;

    Box& box = boxes[std::size_t(pick)];
    std::vector<std::uint32_t> left, right;

    if (method == BoxMethod::MedianCut) {
      // Shrink bounds to the occupied cells, pick the longest axis, cut at
      // the population median (right side kept non-empty).
      int lo[3] = {31, 31, 31}, hi[3] = {0, 0, 0};
      for (std::uint32_t ci : box.cell_ids)
        for (int a = 0; a < 3; ++a) {
          const int c = CellGrid::coord(grid.cells[ci].id, a);
          lo[a] = std::min(lo[a], c);
          hi[a] = std::max(hi[a], c);
        }
      int axis = 0;
      for (int a = 1; a < 3; ++a)
        if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;

      double slice_count[32] = {};
      for (std::uint32_t ci : box.cell_ids)
        slice_count[CellGrid::coord(grid.cells[ci].id, axis)] += grid.cells[ci].count;

      int cut = hi[axis] - 1;
      double cum = 0;
      for (int t = lo[axis]; t < hi[axis]; ++t) {
        cum += slice_count[t];
        if (2 * cum >= box.agg.n) {
          cut = t;
          break;
        }
      }
      for (std::uint32_t ci : box.cell_ids)
        (CellGrid::coord(grid.cells[ci].id, axis) <= cut ? left : right).push_back(ci);
    } else if (method == BoxMethod::AxisMarginal) {
      // Cut along the coordinate axis carrying the largest marginal
      // variance, at the plane minimizing the 1-D marginal SSE; the dominant
      // color dimension decides alone, the other two are ignored.
      Agg slice[3][32];
      bool occupied[3][32] = {};
      int nslices[3] = {0, 0, 0};
      for (std::uint32_t ci : box.cell_ids)
        for (int a = 0; a < 3; ++a) {
          const int c = CellGrid::coord(grid.cells[ci].id, a);
          slice[a][c].add(grid.cells[ci]);
          if (!occupied[a][c]) {
            occupied[a][c] = true;
            ++nslices[a];
          }
        }

      auto marginal = [](const Agg& a, int axis) {
        return a.n > 0 ? a.m2[axis] - a.sum[axis] * a.sum[axis] / a.n : 0.0;
      };

      int axis = -1;
      double best_var = -1.0;
      for (int a = 0; a < 3; ++a) {
        if (nslices[a] < 2) continue;  // cannot cut at cell granularity
        const double var = marginal(box.agg, a);
        if (var > best_var) {
          best_var = var;
          axis = a;
        }
      }
      if (axis < 0) {
        box.dead = true;
        continue;
      }

      double best = std::numeric_limits<double>::infinity();
      int best_cut = -1;
      Agg leftAgg;
      for (int t = 0; t < 31; ++t) {
        if (occupied[axis][t]) leftAgg.add_agg(slice[axis][t]);
        if (leftAgg.n == 0 || leftAgg.n == box.agg.n) continue;
        Agg rightAgg = box.agg;
        rightAgg.n -= leftAgg.n;
        for (int i = 0; i < 3; ++i) rightAgg.sum[i] -= leftAgg.sum[i];
        for (int i = 0; i < 6; ++i) rightAgg.m2[i] -= leftAgg.m2[i];
        const double err = marginal(leftAgg, axis) + marginal(rightAgg, axis);
        if (err < best) {
          best = err;
          best_cut = t;
        }
      }
      if (best_cut < 0) {
        box.dead = true;
        continue;
      }
      for (std::uint32_t ci : box.cell_ids)
        (CellGrid::coord(grid.cells[ci].id, axis) <= best_cut ? left : right).push_back(ci);
    } else if (method == BoxMethod::AxisMeanCut) {
      Agg slice[3][32];
      bool occupied[3][32] = {};
      int nslices[3] = {0, 0, 0};
      for (std::uint32_t ci : box.cell_ids)
        for (int a = 0; a < 3; ++a) {
          const int c = CellGrid::coord(grid.cells[ci].id, a);
          slice[a][c].add(grid.cells[ci]);
          if (!occupied[a][c]) {
            occupied[a][c] = true;
            ++nslices[a];
          }
        }
      auto marginal = [](const Agg& a, int axis) {
        return a.n > 0 ? a.m2[axis] - a.sum[axis] * a.sum[axis] / a.n : 0.0;
      };
      int axis = -1;
      double best_var = -1.0;
      for (int a = 0; a < 3; ++a) {
        if (nslices[a] < 2) continue;
        const double var = marginal(box.agg, a);
        if (var > best_var) {
          best_var = var;
          axis = a;
        }
      }
      if (axis < 0) {
        box.dead = true;
        continue;
      }
      // cut at the marginal mean, nudged so both sides stay populated
      int cut = int((box.agg.sum[axis] / box.agg.n) / 8.0);
      int lo = 31, hi = 0;
      for (int t = 0; t < 32; ++t)
        if (occupied[axis][t]) {
          lo = std::min(lo, t);
          hi = std::max(hi, t);
        }
      cut = std::clamp(cut, lo, hi - 1);
      for (std::uint32_t ci : box.cell_ids)
        (CellGrid::coord(grid.cells[ci].id, axis) <= cut ? left : right).push_back(ci);
    } else if (method == BoxMethod::PrincipalMarginal) {
      Vec3 v;
      if (!principal_axis(box.agg, v)) {
        box.dead = true;
        continue;
      }
      // Order cells by the projection of their centroid and scan the
      // boundaries between distinct projections.
      std::vector<std::pair<double, std::uint32_t>> proj;
      proj.reserve(box.cell_ids.size());
      for (std::uint32_t ci : box.cell_ids) {
        const Vec3 mu = Vec3{grid.cells[ci].sum[0] / grid.cells[ci].count,
                             grid.cells[ci].sum[1] / grid.cells[ci].count,
                             grid.cells[ci].sum[2] / grid.cells[ci].count};
        proj.emplace_back(v[0] * mu[0] + v[1] * mu[1] + v[2] * mu[2], ci);
      }
      std::sort(proj.begin(), proj.end());

      std::vector<Agg> prefix(proj.size());
      Agg run;
      for (std::size_t i = 0; i < proj.size(); ++i) {
        run.add(grid.cells[proj[i].second]);
        prefix[i] = run;
      }

      double best = std::numeric_limits<double>::infinity();
      std::size_t best_b = 0;
      for (std::size_t b = 1; b < proj.size(); ++b) {
        if (proj[b].first == proj[b - 1].first) continue;
        Agg rightAgg = box.agg;
        rightAgg.n -= prefix[b - 1].n;
        for (int i = 0; i < 3; ++i) rightAgg.sum[i] -= prefix[b - 1].sum[i];
        for (int i = 0; i < 6; ++i) rightAgg.m2[i] -= prefix[b - 1].m2[i];
        const double err = prefix[b - 1].marginal_sse(v) + rightAgg.marginal_sse(v);
        if (err < best) {
          best = err;
          best_b = b;
        }
      }
      if (best_b == 0) {
        box.dead = true;  // all centroid projections coincide
        continue;
      }
      for (std::size_t i = 0; i < proj.size(); ++i)
        (i < best_b ? left : right).push_back(proj[i].second);
    } else {
      // All three axes x all cut planes, by cumulative moments; minimize the
      // summed SSE of the two sides.
      double best = std::numeric_limits<double>::infinity();
      int best_axis = -1, best_cut = 0;
      for (int axis = 0; axis < 3; ++axis) {
        Agg slice[32];
        bool occupied[32] = {};
        for (std::uint32_t ci : box.cell_ids) {
          const int c = CellGrid::coord(grid.cells[ci].id, axis);
          slice[c].add(grid.cells[ci]);
          occupied[c] = true;
        }
        Agg leftAgg;
        for (int t = 0; t < 31; ++t) {
          if (occupied[t]) leftAgg.add_agg(slice[t]);
          if (leftAgg.n == 0 || leftAgg.n == box.agg.n) continue;
          Agg rightAgg = box.agg;
          rightAgg.n -= leftAgg.n;
          for (int i = 0; i < 3; ++i) rightAgg.sum[i] -= leftAgg.sum[i];
          for (int i = 0; i < 6; ++i) rightAgg.m2[i] -= leftAgg.m2[i];
          const double err = leftAgg.sse() + rightAgg.sse();
          if (err < best) {
            best = err;
            best_axis = axis;
            best_cut = t;
          }
        }
      }
      if (best_axis < 0) {
        box.dead = true;
        continue;
      }
      for (std::uint32_t ci : box.cell_ids)
        (CellGrid::coord(grid.cells[ci].id, best_axis) <= best_cut ? left : right).push_back(ci);
    }

    if (left.empty() || right.empty()) {
      box.dead = true;
      continue;
    }
    boxes[std::size_t(pick)] = make_box(grid, std::move(left));
    boxes.push_back(make_box(grid, std::move(right)));
  }

  Palette p;
  p.centers.reserve(boxes.size());
  for (const Box& b : boxes) p.centers.push_back(b.agg.mean());
  return p;
}

/// Heckbert-style median cut on the 5-bit grid.
inline Palette median_cut(const RgbImage& img, int k) {
  return box_quantize(img, k, BoxMethod::MedianCut);
}

/// Variance-based splitting: max-SSE box cut along its dominant color axis at
/// the marginal mean, the point minimizing the marginal squared error. (The
/// AxisMarginal and PrincipalMarginal policies, which scan for the threshold
/// minimizing the two-sided marginal SSE instead, remain available through
/// box_quantize.)
inline Palette wan_split(const RgbImage& img, int k) {
  return box_quantize(img, k, BoxMethod::AxisMeanCut);
}

/// Greedy orthogonal bipartitioning: max-SSE box, best axis-aligned cut by
/// total two-sided SSE.
inline Palette wu_bipartition(const RgbImage& img, int k) {
  return box_quantize(img, k, BoxMethod::AxisMinSse);
}

}  // namespace colorq
