#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "colorq/fuzzy.hpp"
#include "colorq/mmm.hpp"
#include "testutil.hpp"

using colorq::Palette;
using colorq::Vec3;

TEST_CASE("mmm with k = 1 returns the weighted mean") {
  const auto inst = testutil::random_instance(40, 9);
  const Palette p = colorq::mmm_from_first(inst.points, inst.weights, 1, 0);
  Vec3 mean{0, 0, 0};
  for (std::size_t i = 0; i < inst.points.size(); ++i)
    for (int c = 0; c < 3; ++c) mean[c] += inst.weights[i] * inst.points[i][c];
  for (int c = 0; c < 3; ++c) REQUIRE(p[0][c] == Catch::Approx(mean[c]).margin(1e-12));
}

TEST_CASE("mmm picks the farthest gray point second") {
  const std::vector<Vec3> pts{Vec3{0, 0, 0}, Vec3{1, 1, 1}, Vec3{10, 10, 10}};
  const std::vector<double> w{0.5, 0.3, 0.2};
  const Palette p = colorq::mmm_from_first(pts, w, 2, 0);
  REQUIRE(p.size() == 2);
  // second center is the maximin point (10,10,10); the point at 1 joins the
  // first cluster, so the first center is the weighted mean of {0, 1}
  REQUIRE(p[1] == Vec3{10, 10, 10});
  const double expected = (0.5 * 0.0 + 0.3 * 1.0) / 0.8;
  for (int c = 0; c < 3; ++c) REQUIRE(p[0][c] == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("mmm equals a from-scratch maximin oracle") {
  const auto inst = testutil::random_instance(120, 77);
  const int k = 9;
  const std::size_t first = 17;

  // oracle: recompute every min-distance from scratch at each step
  std::vector<std::size_t> chosen{first};
  while (int(chosen.size()) < k) {
    double best = -1;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < inst.points.size(); ++i) {
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t c : chosen)
        dmin = std::min(dmin, colorq::minmax_dist2(inst.points[i], inst.points[c]));
      if (dmin > best) {
        best = dmin;
        best_i = i;
      }
    }
    chosen.push_back(best_i);
  }
  std::vector<Vec3> sums(std::size_t(k), Vec3{0, 0, 0});
  std::vector<double> ws(std::size_t(k), 0.0);
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    double bestd = std::numeric_limits<double>::infinity();
    std::size_t bestc = 0;
    for (std::size_t c = 0; c < chosen.size(); ++c) {
      const double d = colorq::minmax_dist2(inst.points[i], inst.points[chosen[c]]);
      if (d < bestd) {
        bestd = d;
        bestc = c;
      }
    }
    for (int d = 0; d < 3; ++d) sums[bestc][d] += inst.weights[i] * inst.points[i][d];
    ws[bestc] += inst.weights[i];
  }

  const Palette p = colorq::mmm_from_first(inst.points, inst.weights, k, first);
  REQUIRE(p.size() == std::size_t(k));
  for (std::size_t c = 0; c < p.size(); ++c)
    for (int d = 0; d < 3; ++d)
      REQUIRE(p[c][d] == Catch::Approx(sums[c][d] / ws[c]).margin(1e-9));
}

TEST_CASE("mmm validates its inputs") {
  const auto inst = testutil::random_instance(5, 1);
  REQUIRE_THROWS_AS(colorq::mmm_from_first(inst.points, inst.weights, 6, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(colorq::mmm_from_first(inst.points, inst.weights, 2, 99), std::invalid_argument);
}

TEST_CASE("fcm with one prototype is the weighted mean with full membership") {
  const auto inst = testutil::random_instance(30, 15);
  const auto res = colorq::fcm(inst.points, inst.weights, 1, 2.0, 5, 3);
  Vec3 mean{0, 0, 0};
  for (std::size_t i = 0; i < inst.points.size(); ++i)
    for (int c = 0; c < 3; ++c) mean[c] += inst.weights[i] * inst.points[i][c];
  for (int c = 0; c < 3; ++c) REQUIRE(res.palette[0][c] == Catch::Approx(mean[c]).margin(1e-9));

  const auto u = colorq::fuzzy_memberships(inst.points[0], res.palette, 2.0, 0.0);
  REQUIRE(u.size() == 1);
  REQUIRE(u[0] == 1.0);
}

TEST_CASE("memberships split evenly between equidistant prototypes") {
  Palette protos;
  protos.centers = {Vec3{0, 0, 0}, Vec3{10, 0, 0}};
  const auto u = colorq::fuzzy_memberships(Vec3{5, 0, 0}, protos, 2.0, 0.0);
  REQUIRE(u[0] == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(u[1] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("membership rows sum to one for random configurations") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> chan(0.0, 255.0);
  for (int trial = 0; trial < 50; ++trial) {
    Palette protos;
    const int k = 2 + int(rng() % 12);
    for (int c = 0; c < k; ++c) protos.centers.push_back(Vec3{chan(rng), chan(rng), chan(rng)});
    const Vec3 x{chan(rng), chan(rng), chan(rng)};
    const double q = 1.4 + double(rng() % 30) / 10.0;
    const auto u = colorq::fuzzy_memberships(x, protos, q, 0.0);
    double sum = 0;
    for (double v : u) {
      REQUIRE(v >= 0.0);
      sum += v;
    }
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("a point coincident with a prototype takes membership one") {
  Palette protos;
  protos.centers = {Vec3{50, 60, 70}, Vec3{200, 10, 30}};
  const auto u = colorq::fuzzy_memberships(Vec3{50, 60, 70}, protos, 2.0, 0.0);
  REQUIRE(u[0] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(u[1] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("fcm objective is nonincreasing") {
  const auto inst = testutil::blob_instance(400, 5, 83);
  const auto res = colorq::fcm(inst.points, inst.weights, 6, 2.0, 10, 21);
  REQUIRE(res.report.sse_history.size() == 10);
  for (std::size_t i = 1; i < res.report.sse_history.size(); ++i)
    REQUIRE(res.report.sse_history[i] <= res.report.sse_history[i - 1] + 1e-9);
}

TEST_CASE("pim with delta = 0 walks exactly the fcm trajectory") {
  const auto inst = testutil::random_instance(200, 19);
  std::vector<Palette> fcm_traj, pim_traj;
  colorq::fcm(inst.points, inst.weights, 5, 2.0, 8, 7, &fcm_traj);
  colorq::pim(inst.points, inst.weights, 5, 2.0, 0.0, 8, 7, &pim_traj);
  REQUIRE(fcm_traj.size() == pim_traj.size());
  for (std::size_t t = 0; t < fcm_traj.size(); ++t)
    for (std::size_t c = 0; c < fcm_traj[t].size(); ++c)
      for (int d = 0; d < 3; ++d) REQUIRE(pim_traj[t][c][d] == fcm_traj[t][c][d]);
}

TEST_CASE("pim keeps a mirror-symmetric instance symmetric") {
  // two points mirrored about 128 with equal weights; prototypes start on the
  // points themselves
  const std::vector<Vec3> pts{Vec3{100, 100, 100}, Vec3{156, 156, 156}};
  const std::vector<double> w{0.5, 0.5};

  std::vector<Palette> traj;
  colorq::FuzzyOptions opt;
  opt.alpha_delta = 0.4;
  opt.iters = 6;
  // find a seed whose init picks both points (k = n makes that automatic)
  colorq::fuzzy_cmeans(pts, w, 2, opt, 1, &traj);
  for (const Palette& p : traj) {
    for (int d = 0; d < 3; ++d)
      REQUIRE(p[0][d] + p[1][d] == Catch::Approx(256.0).margin(1e-9));
  }
}

TEST_CASE("fuzzy options are validated") {
  const auto inst = testutil::random_instance(10, 3);
  colorq::FuzzyOptions bad_q;
  bad_q.q = 1.0;
  REQUIRE_THROWS_AS(colorq::fuzzy_cmeans(inst.points, inst.weights, 2, bad_q, 1),
                    std::invalid_argument);
  colorq::FuzzyOptions bad_delta;
  bad_delta.alpha_delta = 0.5;
  REQUIRE_THROWS_AS(colorq::fuzzy_cmeans(inst.points, inst.weights, 2, bad_delta, 1),
                    std::invalid_argument);
}
