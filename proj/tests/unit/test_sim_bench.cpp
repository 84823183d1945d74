// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "boxloss/sim_bench.hpp"

namespace boxloss {
namespace {

SimConfig small_config(int points = 6, int iterations = 12) {
  SimConfig c;
  c.num_points = points;
  c.adam.iterations = iterations;
  c.seed = 4;
  return c;
}

TEST(SimConfig, DefaultCaseCount) {
  const SimConfig c;
  EXPECT_EQ(case_count(c), 1715000u);
  EXPECT_EQ(case_count(small_config(200)), 68600u);
  EXPECT_NO_THROW(validate(c));
}

TEST(SimConfig, Validation) {
  SimConfig c = small_config();
  c.num_points = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = small_config();
  c.radius = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = small_config();
  c.scales.clear();
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = small_config();
  c.aspects = {1.0, -2.0};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = small_config();
  c.siou.theta = 8;
  EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(SimConfig, MakeBoxKeepsAreaAndAspect) {
  const Box2D b = make_box({1, 2}, 1.33, 0.25);
  EXPECT_DOUBLE_EQ(b.cx, 1);
  EXPECT_DOUBLE_EQ(b.cy, 2);
  EXPECT_NEAR(b.w * b.h, 1.33, 1e-14);
  EXPECT_NEAR(b.w / b.h, 0.25, 1e-14);
}

TEST(Points, UniformOverDisk) {
  SimConfig c;
  c.num_points = 100000;
  const auto pts = generate_points(c);
  ASSERT_EQ(pts.size(), 100000u);
  double sum_r = 0, sum_x = 0, sum_y = 0;
  int inner = 0;
  for (const auto& p : pts) {
    const double r = std::hypot(p.x - 10, p.y - 10);
    ASSERT_LE(r, 3.0 + 1e-12);
    sum_r += r;
    sum_x += p.x - 10;
    sum_y += p.y - 10;
    if (r < 1.5) ++inner;
  }
  // Uniform over area: E[r] = 2R/3, a quarter of the points within R/2.
  EXPECT_NEAR(sum_r / pts.size(), 2.0, 0.02);
  EXPECT_NEAR(inner / 100000.0, 0.25, 0.01);
  EXPECT_NEAR(sum_x / pts.size(), 0.0, 0.02);
  EXPECT_NEAR(sum_y / pts.size(), 0.0, 0.02);
  EXPECT_EQ(generate_points(c), pts);
}

TEST(CaseGrid, OrderAndTargets) {
  const SimConfig c = small_config(3);
  const CaseGrid g(c);
  ASSERT_EQ(g.size(), 3u * 343u);
  const SimCase first = g[0];
  EXPECT_EQ(first.point_index, 0u);
  EXPECT_NEAR(first.target.w * first.target.h, 1.0, 1e-15);
  EXPECT_EQ(first.target.cx, 10.0);
  EXPECT_EQ(first.target.cy, 10.0);
  EXPECT_EQ(g[343].point_index, 1u);
  // Targets vary fastest, then anchor aspect, then scale.
  EXPECT_NEAR(g[1].target.w / g[1].target.h, c.target_aspects[1], 1e-14);
  EXPECT_NEAR(g[7].anchor.w / g[7].anchor.h, c.aspects[1], 1e-14);
  EXPECT_NEAR(g[49].anchor.w * g[49].anchor.h, c.scales[1], 1e-14);
  EXPECT_THROW(g[g.size()], std::out_of_range);
}

TEST(Run, InitialErrorMatchesDirectSum) {
  const SimConfig c = small_config(5, 3);
  const auto pts = generate_points(c);
  double expected = 0;
  for (const auto& p : pts) {
    for (double s : c.scales) {
      for (double a : c.aspects) {
        for (double t : c.target_aspects) {
          const double w = std::sqrt(s * a), h = std::sqrt(s / a);
          const double tw = std::sqrt(t), th = 1 / std::sqrt(t);
          expected += std::abs(p.x - 10) + std::abs(p.y - 10) +
                      std::abs(w - tw) + std::abs(h - th);
        }
      }
    }
  }
  const ErrorSeries s = run(c, 1);
  ASSERT_EQ(s.per_iteration_total.size(), 4u);
  EXPECT_NEAR(s.per_iteration_total[0], expected, 1e-9 * expected);
  EXPECT_EQ(s.case_count, 5u * 343u);
  EXPECT_LT(s.per_iteration_total.back(), s.per_iteration_total.front());
}

TEST(Run, PerPointFinalsSumToTotal) {
  const ErrorSeries s = run(small_config(), 2);
  const double sum = std::accumulate(s.per_point_final.begin(), s.per_point_final.end(), 0.0);
  EXPECT_NEAR(sum, s.per_iteration_total.back(), 1e-9 * sum);
}

TEST(Run, BitwiseIndependentOfThreads) {
  for (LossKind k : {LossKind::kSIoU, LossKind::kCIoU}) {
    SimConfig c = small_config(9, 15);
    c.kind = k;
    const ErrorSeries a = run(c, 1);
    for (unsigned t : {2u, 3u, 4u, 8u}) {
      const ErrorSeries b = run(c, t);
      EXPECT_EQ(a.per_iteration_total, b.per_iteration_total) << t;
      EXPECT_EQ(a.per_point_final, b.per_point_final) << t;
      EXPECT_EQ(a.flagged_cases, b.flagged_cases);
    }
  }
}

TEST(Run, IdenticalAnchorsGiveZeroError) {
  SimConfig c = small_config();
  c.scales = {1.0};
  c.aspects = {1.0};
  c.target_aspects = {1.0};
  const std::vector<Point> at_center(4, c.center);
  const ErrorSeries s = run(c, at_center, 2);
  for (double e : s.per_iteration_total) EXPECT_EQ(e, 0.0);
}

TEST(PairwiseSum, MatchesExactSmallIntegers) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(pairwise_sum(v), 500500.0);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(Surface, ConservesPointsAndErrors) {
  SimConfig c = small_config(400);
  const auto pts = generate_points(c);
  std::vector<double> finals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) finals[i] = 0.5 + i % 7;
  const ErrorSurface s = surface(finals, pts, 8, c.center, c.radius);
  EXPECT_EQ(s.resolution, 8);
  EXPECT_DOUBLE_EQ(s.x_min, 7.0);
  EXPECT_DOUBLE_EQ(s.x_max, 13.0);
  std::uint64_t n = 0;
  double total = 0;
  for (int iy = 0; iy < 8; ++iy) {
    for (int ix = 0; ix < 8; ++ix) {
      n += s.count[s.index(ix, iy)];
      total += s.sum[s.index(ix, iy)];
      if (s.empty(ix, iy)) EXPECT_TRUE(std::isnan(s.mean(ix, iy)));
    }
  }
  EXPECT_EQ(n, pts.size());
  EXPECT_NEAR(total, std::accumulate(finals.begin(), finals.end(), 0.0), 1e-9);
  // Corners of the square lie outside the disk.
  EXPECT_TRUE(s.empty(0, 0));
}

TEST(Surface, BinsByLocationAndClampsOutsiders) {
  const std::vector<Point> pts{{0.1, 0.1}, {0.9, 0.9}, {5, 5}, {-5, 0.6}};
  const std::vector<double> e{1, 2, 3, 4};
  const ErrorSurface s = surface(e, pts, 2, {0.5, 0.5}, 0.5);
  EXPECT_DOUBLE_EQ(s.mean(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s.mean(1, 1), 2.5);
  EXPECT_DOUBLE_EQ(s.mean(0, 1), 4.0);
  EXPECT_TRUE(s.empty(1, 0));
  EXPECT_THROW(surface(e, pts, 1, {0, 0}, 1), std::invalid_argument);
  EXPECT_THROW(surface(std::vector<double>{1}, pts, 4, {0, 0}, 1),
               std::invalid_argument);
}

}  // namespace
}  // namespace boxloss
