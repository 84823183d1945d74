// SPDX-License-Identifier: Apache-2.0
#include "boxloss/tuner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "boxloss/rng.hpp"

namespace boxloss {

namespace {

// Substream used for the initial population; generations use 1, 2, ...
constexpr std::uint64_t kInitStream = 0;

std::size_t tournament(Rng& rng, const std::vector<double>& fit) {
  const auto a = static_cast<std::size_t>(rng.below(fit.size()));
  const auto b = static_cast<std::size_t>(rng.below(fit.size()));
  return fit[b] < fit[a] ? b : a;
}

}  // namespace

void validate(const GaConfig& c) {
  if (c.population < 2) throw std::invalid_argument("population must be >= 2");
  if (c.generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (!(c.theta_min <= c.theta_max) || c.theta_min < kThetaMin ||
      c.theta_max > kThetaMax) {
    throw std::invalid_argument("theta bounds must be ordered within [2, 6]");
  }
  if (!(c.mutation_sigma >= 0.0) || !std::isfinite(c.mutation_sigma)) {
    throw std::invalid_argument("mutation_sigma must be >= 0");
  }
  if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0)) {
    throw std::invalid_argument("crossover_rate must lie in [0, 1]");
  }
}

double fitness(double theta, const SimConfig& sim, unsigned threads) {
  SimConfig config = sim;
  config.kind = LossKind::kSIoU;
  config.siou.theta = theta;
  const ErrorSeries series = run(config, threads);
  return series.per_iteration_total.back();
}

GaResult tune(const GaConfig& config, const FitnessFn& fitness_fn,
              std::vector<double> population) {
  validate(config);
  const auto size = static_cast<std::size_t>(config.population);
  if (population.empty()) {
    for (std::size_t i = 0; i < size; ++i) {
      Rng rng(substream_seed(config.seed, kInitStream, i));
      population.push_back(rng.uniform(config.theta_min, config.theta_max));
    }
  } else if (population.size() != size) {
    throw std::invalid_argument("initial population must match population size");
  }
  for (double& theta : population) {
    theta = std::clamp(theta, config.theta_min, config.theta_max);
  }

  GaResult result;
  std::unordered_map<std::uint64_t, double> cache;
  auto evaluate = [&](double theta) {
    const auto key = std::bit_cast<std::uint64_t>(theta);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const double f = fitness_fn(theta);
    ++result.evaluations;
    cache.emplace(key, f);
    return f;
  };

  std::vector<double> fit(size);
  std::size_t best = 0;
  auto score_generation = [&] {
    for (std::size_t i = 0; i < size; ++i) fit[i] = evaluate(population[i]);
    best = static_cast<std::size_t>(
        std::min_element(fit.begin(), fit.end()) - fit.begin());
    // Elite sits at index 0, so a tie keeps the incumbent and history never
    // increases.
    result.best_theta = population[best];
    result.best_fitness = fit[best];
    result.history.push_back(fit[best]);
  };
  auto reached_threshold = [&] {
    return config.fitness_threshold &&
           result.best_fitness < *config.fitness_threshold;
  };

  score_generation();
  for (int g = 1; g <= config.generations && !reached_threshold(); ++g) {
    std::vector<double> next(size);
    next[0] = population[best];
    for (std::size_t i = 1; i < size; ++i) {
      Rng rng(substream_seed(config.seed, static_cast<std::uint64_t>(g), i));
      const double a = population[tournament(rng, fit)];
      const double b = population[tournament(rng, fit)];
      double child = a;
      if (rng.uniform01() < config.crossover_rate) {
        child = a + rng.uniform(-0.5, 1.5) * (b - a);
      }
      if (config.mutation_sigma > 0.0) {
        child += config.mutation_sigma * rng.normal();
      }
      next[i] = std::clamp(child, config.theta_min, config.theta_max);
    }
    population = std::move(next);
    score_generation();
  }
  return result;
}

GaResult tune_theta(const GaConfig& config, const SimConfig& sim,
                    unsigned threads) {
  validate(sim);
  return tune(config,
              [&](double theta) { return fitness(theta, sim, threads); });
}

}  // namespace boxloss
