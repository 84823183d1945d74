// SPDX-License-Identifier: Apache-2.0
#ifndef BOXLOSS_GRADCHECK_HPP_
#define BOXLOSS_GRADCHECK_HPP_

#include <cstdint>

#include "boxloss/losses.hpp"

namespace boxloss {

/// Pairs closer than this to a kink are skipped by gradcheck().
inline constexpr double kKinkMargin = 1e-3;

/// Pass threshold on the max relative error.
inline constexpr double kGradTolerance = 1e-6;

struct GradCheckReport {
  std::uint64_t samples = 0;       // pairs compared
  std::uint64_t kink_skipped = 0;  // pairs drawn but rejected near kinks
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  Box2D worst_pred;
  Box2D worst_gt;
  Grad4 worst_analytic;
  Grad4 worst_numeric;

  bool passed(double tolerance = kGradTolerance) const noexcept {
    return max_rel_error <= tolerance;
  }
};

/// Compares grad() with grad_fd() on `samples` seeded random pairs that are
/// at least kKinkMargin away from every kink. Sizes are drawn from
/// [0.25, 4] and pred's center lies within 1.5 of gt's on each axis, so the
/// sample mixes overlapping and disjoint pairs.
GradCheckReport gradcheck(LossKind kind, const SiouParams& params,
                          std::uint64_t samples, std::uint64_t seed,
                          double step = 1e-6);

}  // namespace boxloss

#endif  // BOXLOSS_GRADCHECK_HPP_
