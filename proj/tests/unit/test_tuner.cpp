// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "boxloss/tuner.hpp"

namespace boxloss {
namespace {

double bowl(double theta) { return (theta - 3.3) * (theta - 3.3); }

TEST(Tuner, FindsMinimumOfSmoothBowl) {
  GaConfig c;
  const GaResult r = tune(c, bowl);
  EXPECT_NEAR(r.best_theta, 3.3, 0.05);
  EXPECT_DOUBLE_EQ(r.best_fitness, bowl(r.best_theta));
  ASSERT_EQ(r.history.size(), static_cast<std::size_t>(c.generations) + 1);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    EXPECT_LE(r.history[i], r.history[i - 1]);
  }
  EXPECT_EQ(r.history.back(), r.best_fitness);
}

TEST(Tuner, ReproducibleForSeed) {
  GaConfig c;
  c.seed = 99;
  const GaResult a = tune(c, bowl);
  const GaResult b = tune(c, bowl);
  EXPECT_EQ(a.best_theta, b.best_theta);
  EXPECT_EQ(a.history, b.history);
  c.seed = 100;
  EXPECT_NE(tune(c, bowl).history, a.history);
}

TEST(Tuner, StaysInsideBounds) {
  GaConfig c;
  c.theta_min = 2.5;
  c.theta_max = 3.0;
  c.mutation_sigma = 2.0;
  int calls = 0;
  const GaResult r = tune(c, [&](double t) {
    EXPECT_GE(t, 2.5);
    EXPECT_LE(t, 3.0);
    ++calls;
    return -t;
  });
  EXPECT_EQ(r.best_theta, 3.0);
  EXPECT_EQ(r.evaluations, calls);
}

TEST(Tuner, IdenticalPopulationWithoutVariationNeverMoves) {
  GaConfig c;
  c.mutation_sigma = 0.0;
  const std::vector<double> pop(c.population, 4.0);
  const GaResult r = tune(c, bowl, pop);
  EXPECT_EQ(r.best_theta, 4.0);
  EXPECT_EQ(r.evaluations, 1);  // cached after the first call
  for (double h : r.history) EXPECT_EQ(h, bowl(4.0));
}

TEST(Tuner, StopsAtThreshold) {
  GaConfig c;
  c.fitness_threshold = 0.5;
  const GaResult r = tune(c, bowl);
  EXPECT_LT(r.best_fitness, 0.5);
  EXPECT_LT(r.history.size(), static_cast<std::size_t>(c.generations) + 1);
}

TEST(Tuner, Validation) {
  GaConfig c;
  c.population = 1;
  EXPECT_THROW(tune(c, bowl), std::invalid_argument);
  c = GaConfig{};
  c.theta_min = 1.0;
  EXPECT_THROW(tune(c, bowl), std::invalid_argument);
  c = GaConfig{};
  c.theta_min = 5;
  c.theta_max = 4;
  EXPECT_THROW(tune(c, bowl), std::invalid_argument);
  EXPECT_THROW(tune(GaConfig{}, bowl, {3.0}), std::invalid_argument);
}

TEST(Tuner, SimulationFitnessIsFinalError) {
  SimConfig s;
  s.num_points = 2;
  s.adam.iterations = 5;
  s.kind = LossKind::kCIoU;  // fitness always runs SIoU
  SimConfig expect = s;
  expect.kind = LossKind::kSIoU;
  expect.siou.theta = 2.5;
  EXPECT_EQ(fitness(2.5, s, 1), run(expect, 1).per_iteration_total.back());
}

}  // namespace
}  // namespace boxloss
