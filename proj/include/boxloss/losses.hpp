// SPDX-License-Identifier: Apache-2.0
//
// IoU-family bounding-box regression losses. SIoU adds an angle-aware
// distance penalty and a shape penalty to the IoU term:
//
//   L = 1 - IoU + (distance_cost + shape_cost) / 2
//
// The baselines (IoU, GIoU, DIoU, CIoU) are provided for comparison runs.
// Every loss has an analytic gradient with respect to the predicted box and
// a central-difference oracle to check it against.
#ifndef BOXLOSS_LOSSES_HPP_
#define BOXLOSS_LOSSES_HPP_

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "boxloss/geometry.hpp"

namespace boxloss {

enum class LossKind { kIoU, kGIoU, kDIoU, kCIoU, kSIoU };

inline constexpr std::array<LossKind, 5> kAllLossKinds = {
    LossKind::kIoU, LossKind::kGIoU, LossKind::kDIoU, LossKind::kCIoU,
    LossKind::kSIoU};

/// Lower-case name: "iou", "giou", "diou", "ciou", "siou".
std::string_view to_string(LossKind kind) noexcept;
std::optional<LossKind> parse_loss_kind(std::string_view name) noexcept;

/// Which length normalizes the squared vertical center offset in the
/// distance cost. kEnclosing uses the enclosing-box height. kCenterOffset
/// uses the vertical center offset itself, which makes that term 1 whenever
/// the centers differ vertically; it exists for sensitivity comparisons.
enum class ChInterpretation { kEnclosing, kCenterOffset };

std::string_view to_string(ChInterpretation ch) noexcept;
std::optional<ChInterpretation> parse_ch_interpretation(
    std::string_view name) noexcept;

inline constexpr double kThetaMin = 2.0;
inline constexpr double kThetaMax = 6.0;

struct SiouParams {
  double theta = 4.0;  // shape-cost exponent, within [kThetaMin, kThetaMax]
  ChInterpretation ch = ChInterpretation::kEnclosing;
};

/// Throws std::invalid_argument when theta is outside [2, 6] or not finite.
void validate(const SiouParams& params);

struct LossBreakdown {
  double iou = 0.0;
  double angle_cost = 0.0;
  double distance_cost = 0.0;
  double shape_cost = 0.0;
  double total = 0.0;
};

/// Partial derivatives of a loss with respect to the predicted box's
/// (cx, cy, w, h). at_kink is set when some term was evaluated exactly at a
/// nondifferentiable point and a subgradient convention was applied.
struct Grad4 {
  double d_cx = 0.0;
  double d_cy = 0.0;
  double d_w = 0.0;
  double d_h = 0.0;
  bool at_kink = false;

  std::array<double, 4> as_array() const noexcept {
    return {d_cx, d_cy, d_w, d_h};
  }
};

/// Angle cost in [0, 1]: 0 when the center offset lies along an axis, 1 at
/// 45 degrees. Coincident centers give 0.
double angle_cost(const Box2D& pred, const Box2D& gt) noexcept;

/// Distance cost in [0, 2) given a precomputed angle cost.
double distance_cost(const Box2D& pred, const Box2D& gt, double angle,
                     ChInterpretation ch = ChInterpretation::kEnclosing) noexcept;

double shape_cost(const Box2D& pred, const Box2D& gt,
                  const SiouParams& params = {});

LossBreakdown siou_loss(const Box2D& pred, const Box2D& gt,
                        const SiouParams& params = {});

/// IoU, GIoU, DIoU or CIoU loss. Throws std::invalid_argument for kSIoU;
/// use siou_loss or loss() for that.
double baseline_loss(LossKind kind, const Box2D& pred, const Box2D& gt);

/// Scalar loss of any kind.
double loss(LossKind kind, const Box2D& pred, const Box2D& gt,
            const SiouParams& params = {});

/// The CIoU trade-off weight alpha = v / ((1 - IoU) + v); 0 when both terms
/// vanish.
double ciou_alpha(const Box2D& pred, const Box2D& gt) noexcept;

/// CIoU loss with a caller-supplied alpha, i.e. the objective whose gradient
/// grad() returns for LossKind::kCIoU.
double ciou_loss_with_alpha(const Box2D& pred, const Box2D& gt,
                            double alpha) noexcept;

/// Analytic gradient with respect to pred. Requires a valid pred box.
/// Subgradient conventions at kinks: d|u|/du = 0 at u = 0, ties in max/min
/// split 1/2 each. CIoU's alpha is held constant.
Grad4 grad(LossKind kind, const Box2D& pred, const Box2D& gt,
           const SiouParams& params = {});

/// Central differences of a function of four variables.
template <typename F>
std::array<double, 4> central_difference(F&& f, std::array<double, 4> x,
                                         double step) {
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = f(x);
    x[i] = saved - step;
    const double down = f(x);
    x[i] = saved;
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

/// Central-difference gradient of loss(kind, ., gt) at pred. For CIoU alpha
/// is frozen at its value at pred, matching grad(). Requires step > 0 and
/// pred.w, pred.h > 2 * step.
Grad4 grad_fd(LossKind kind, const Box2D& pred, const Box2D& gt,
              const SiouParams& params = {}, double step = 1e-6);

/// max_i |a_i - b_i| / max(1, |a_i|)
double gradient_rel_error(const Grad4& analytic, const Grad4& numeric) noexcept;

/// True when pred and gt are at least `margin` away from every kink of the
/// losses: coincident edges, zero center offsets, equal sizes, and
/// touching overlaps along either axis.
bool away_from_kinks(const Box2D& pred, const Box2D& gt,
                     double margin) noexcept;

}  // namespace boxloss

#endif  // BOXLOSS_LOSSES_HPP_
