// SPDX-License-Identifier: Apache-2.0
#ifndef BOXLOSS_REGRESSION_HPP_
#define BOXLOSS_REGRESSION_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "boxloss/geometry.hpp"
#include "boxloss/losses.hpp"

namespace boxloss {

/// Smallest width/height an optimizer step may produce.
inline constexpr double kMinBoxSize = 1e-6;

/// Adam with a step learning-rate schedule. One iteration is one Adam step on
/// one anchor/target pair.
struct AdamConfig {
  double lr0 = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int step_size = 80;  // iterations between learning-rate decays
  double gamma = 0.1;  // decay factor
  int iterations = 100;
  double tolerance = 1e-2;  // L1 error below which a fit counts as converged
};

/// Throws std::invalid_argument on out-of-range fields.
void validate(const AdamConfig& config);

/// lr0 * gamma^floor(iteration / step_size)
double lr_at(const AdamConfig& config, int iteration);

struct AdamState {
  std::array<double, 4> m{};
  std::array<double, 4> v{};
  std::int64_t t = 0;
};

struct AdamStepResult {
  AdamState state;
  Box2D box;
  bool rejected = false;  // non-finite gradient, nothing changed
  bool clamped = false;   // w or h hit kMinBoxSize
};

AdamStepResult adam_step(const AdamState& state, const Grad4& g, double lr,
                         const Box2D& box, const AdamConfig& config = {});

/// |dcx| + |dcy| + |dw| + |dh|
double l1_error(const Box2D& box, const Box2D& gt) noexcept;

struct Trajectory {
  std::vector<Box2D> boxes;       // iterations + 1 entries, boxes[0] = anchor
  std::vector<double> l1_errors;  // l1_error(boxes[k], target)
  std::optional<int> converged_at;
  int rejected_steps = 0;
  int clamped_steps = 0;
};

/// Per-fit counters when only the error curve is recorded.
struct FitStats {
  std::optional<int> converged_at;
  int rejected_steps = 0;
  int clamped_steps = 0;
};

/// Runs config.iterations Adam steps on the chosen loss, starting from anchor.
Trajectory fit(const Box2D& anchor, const Box2D& target, LossKind kind,
               const SiouParams& params, const AdamConfig& config);

/// Same optimization as fit() but only writes the L1 error at every
/// iteration into errors (size config.iterations + 1). Skips validation;
/// callers validate once per batch.
FitStats fit_errors(const Box2D& anchor, const Box2D& target, LossKind kind,
                    const SiouParams& params, const AdamConfig& config,
                    std::span<double> errors);

}  // namespace boxloss

#endif  // BOXLOSS_REGRESSION_HPP_
