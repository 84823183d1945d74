// SPDX-License-Identifier: Apache-2.0
//
// Genetic-algorithm search for the SIoU shape exponent theta. The fitness of
// a theta is the final total L1 error of a (reduced) simulation run.
#ifndef BOXLOSS_TUNER_HPP_
#define BOXLOSS_TUNER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "boxloss/losses.hpp"
#include "boxloss/sim_bench.hpp"

namespace boxloss {

struct GaConfig {
  int population = 16;
  int generations = 20;
  double theta_min = kThetaMin;
  double theta_max = kThetaMax;
  double mutation_sigma = 0.3;
  double crossover_rate = 0.5;
  std::optional<double> fitness_threshold;  // stop once best < threshold
  std::uint64_t seed = 1;
};

void validate(const GaConfig& config);

struct GaResult {
  double best_theta = 0.0;
  double best_fitness = 0.0;
  std::vector<double> history;  // best-so-far fitness after each generation
  int evaluations = 0;          // distinct fitness evaluations
};

using FitnessFn = std::function<double(double)>;

/// Final E of a SIoU run of `sim` with the given theta.
double fitness(double theta, const SimConfig& sim, unsigned threads = 0);

/// Minimizes fitness over theta. Tournament selection (size 2), blend
/// crossover (BLX-0.5), Gaussian mutation clipped to the bounds, elitism of
/// one. Each child draws from its own RNG substream keyed by (seed,
/// generation, index). An empty initial population is drawn uniformly from
/// the bounds.
GaResult tune(const GaConfig& config, const FitnessFn& fitness,
              std::vector<double> initial_population = {});

/// tune() with the simulation fitness.
GaResult tune_theta(const GaConfig& config, const SimConfig& sim,
                    unsigned threads = 0);

}  // namespace boxloss

#endif  // BOXLOSS_TUNER_HPP_
