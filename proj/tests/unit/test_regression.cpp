// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "boxloss/regression.hpp"

namespace boxloss {
namespace {

TEST(LearningRate, StepSchedule) {
  AdamConfig c;
  EXPECT_DOUBLE_EQ(lr_at(c, 0), 0.1);
  EXPECT_DOUBLE_EQ(lr_at(c, 79), 0.1);
  EXPECT_DOUBLE_EQ(lr_at(c, 80), 0.1 * 0.1);
  EXPECT_DOUBLE_EQ(lr_at(c, 159), 0.1 * 0.1);
  EXPECT_DOUBLE_EQ(lr_at(c, 160), 0.1 * 0.1 * 0.1);
  c.gamma = 1.0;
  EXPECT_DOUBLE_EQ(lr_at(c, 999), 0.1);
  EXPECT_THROW(lr_at(c, -1), std::invalid_argument);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // Bias correction makes the first update lr * g / (|g| + eps).
  const Grad4 g{2.0, -0.5, 1e-3, -7.0};
  const Box2D box{1, 2, 3, 4};
  const auto r = adam_step({}, g, 0.1, box);
  EXPECT_FALSE(r.rejected);
  EXPECT_FALSE(r.clamped);
  const auto ga = g.as_array();
  const std::array<double, 4> start{1, 2, 3, 4};
  const std::array<double, 4> got{r.box.cx, r.box.cy, r.box.w, r.box.h};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(got[i], start[i] - 0.1 * ga[i] / (std::abs(ga[i]) + 1e-8), 1e-15);
  }
  EXPECT_EQ(r.state.t, 1);
}

TEST(Adam, MatchesReferenceRecurrence) {
  const AdamConfig c;
  AdamState s;
  Box2D box{0, 0, 5, 5};
  double m = 0, v = 0, x = 0;
  for (int t = 1; t <= 50; ++t) {
    const double gx = std::sin(0.3 * t) + 0.2;
    auto r = adam_step(s, {gx, 0, 0, 0}, 0.05, box, c);
    s = r.state;
    box = r.box;
    m = 0.9 * m + 0.1 * gx;
    v = 0.999 * v + 0.001 * gx * gx;
    const double mh = m / (1 - std::pow(0.9, t));
    const double vh = v / (1 - std::pow(0.999, t));
    x -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
    ASSERT_NEAR(box.cx, x, 1e-12) << t;
  }
}

TEST(Adam, ZeroGradientAndZeroRateLeaveBoxUnchanged) {
  const Box2D box{1, 2, 3, 4};
  EXPECT_EQ(adam_step({}, {}, 0.1, box).box, box);
  EXPECT_EQ(adam_step({}, {1, 1, 1, 1}, 0.0, box).box, box);
}

TEST(Adam, ClampsSizeAndRejectsNonFinite) {
  const Box2D box{0, 0, 1e-6, 1};
  const auto r = adam_step({}, {0, 0, 1, 0}, 0.1, box);
  EXPECT_TRUE(r.clamped);
  EXPECT_EQ(r.box.w, kMinBoxSize);
  const auto bad = adam_step({}, {NAN, 0, 0, 0}, 0.1, {1, 1, 1, 1});
  EXPECT_TRUE(bad.rejected);
  EXPECT_EQ(bad.box, (Box2D{1, 1, 1, 1}));
  EXPECT_EQ(bad.state.t, 0);
}

TEST(Fit, RecordsEveryStateAndConverges) {
  AdamConfig c;
  c.iterations = 300;
  c.step_size = 200;
  const Box2D anchor{8, 8, 0.5, 2}, target{10, 10, 1, 1};
  const Trajectory t = fit(anchor, target, LossKind::kSIoU, {}, c);
  ASSERT_EQ(t.boxes.size(), 301u);
  ASSERT_EQ(t.l1_errors.size(), 301u);
  EXPECT_EQ(t.boxes.front(), anchor);
  EXPECT_DOUBLE_EQ(t.l1_errors.front(), 2 + 2 + 0.5 + 1);
  ASSERT_TRUE(t.converged_at.has_value());
  EXPECT_LT(t.l1_errors[*t.converged_at], c.tolerance);
  for (int k = 0; k < *t.converged_at; ++k) EXPECT_GE(t.l1_errors[k], c.tolerance);
  for (std::size_t k = 0; k < t.boxes.size(); ++k) {
    EXPECT_DOUBLE_EQ(t.l1_errors[k], l1_error(t.boxes[k], target));
  }
}

TEST(Fit, DeterministicAndConsistentWithFitErrors) {
  const AdamConfig c;
  const Box2D anchor{9, 11, 2, 0.7}, target{10, 10, 0.5, 2};
  for (LossKind k : kAllLossKinds) {
    const Trajectory a = fit(anchor, target, k, {}, c);
    const Trajectory b = fit(anchor, target, k, {}, c);
    std::vector<double> errs(c.iterations + 1);
    const FitStats s = fit_errors(anchor, target, k, {}, c, errs);
    EXPECT_EQ(a.l1_errors, b.l1_errors);
    EXPECT_EQ(a.l1_errors, errs);
    EXPECT_EQ(a.converged_at, s.converged_at);
  }
}

TEST(Fit, AnchorEqualToTargetStaysPut) {
  const Box2D b{3, 4, 1, 2};
  const Trajectory t = fit(b, b, LossKind::kSIoU, {}, {});
  for (const auto& x : t.boxes) EXPECT_EQ(x, b);
  EXPECT_EQ(t.converged_at, 0);
}

TEST(Fit, ValidatesInputs) {
  AdamConfig c;
  c.lr0 = 0;
  EXPECT_THROW(fit({0, 0, 1, 1}, {0, 0, 1, 1}, LossKind::kIoU, {}, c),
               std::invalid_argument);
  EXPECT_THROW(fit({0, 0, -1, 1}, {0, 0, 1, 1}, LossKind::kIoU, {}, {}),
               std::invalid_argument);
  EXPECT_THROW(fit({0, 0, 1, 1}, {0, 0, 1, 1}, LossKind::kSIoU, {7.0}, {}),
               std::invalid_argument);
  std::vector<double> wrong(3);
  EXPECT_THROW(fit_errors({0, 0, 1, 1}, {0, 0, 1, 1}, LossKind::kIoU, {}, {}, wrong),
               std::invalid_argument);
}

}  // namespace
}  // namespace boxloss
