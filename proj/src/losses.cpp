// SPDX-License-Identifier: Apache-2.0
#include "boxloss/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "corners.hpp"
#include "jet.hpp"

namespace boxloss {
namespace detail {
namespace {

using std::atan;
using std::exp;
using std::pow;

constexpr double kPi = std::numbers::pi;

template <typename T>
struct BoxT {
  T cx, cy, w, h;
};

BoxT<double> lift(const Box2D& b) { return {b.cx, b.cy, b.w, b.h}; }

BoxT<Jet> lift_jet(const Box2D& b) {
  return {Jet(b.cx, 0), Jet(b.cy, 1), Jet(b.w, 2), Jet(b.h, 3)};
}

template <typename T>
struct OverlapT {
  T iou;
  T union_area;
  T cw;  // enclosing width
  T ch;  // enclosing height
  T dx;  // gt.cx - pred.cx
  T dy;  // gt.cy - pred.cy
};

template <typename T>
OverlapT<T> overlap_terms(const BoxT<T>& p, const Box2D& gt, KinkFlag& kink) {
  const auto g = to_corners(gt);
  const T x1 = p.cx - 0.5 * p.w;
  const T x2 = p.cx + 0.5 * p.w;
  const T y1 = p.cy - 0.5 * p.h;
  const T y2 = p.cy + 0.5 * p.h;

  const T raw_w = tie_min(x2, T(g.x2), kink) - tie_max(x1, T(g.x1), kink);
  const T raw_h = tie_min(y2, T(g.y2), kink) - tie_max(y1, T(g.y1), kink);
  const T inter = tie_max(raw_w, T(0.0), kink) * tie_max(raw_h, T(0.0), kink);
  const T pred_area = (x2 - x1) * (y2 - y1);
  const double gt_area = (g.x2 - g.x1) * (g.y2 - g.y1);
  const T uni = pred_area + gt_area - inter;

  OverlapT<T> out{inter / uni,
                  uni,
                  tie_max(x2, T(g.x2), kink) - tie_min(x1, T(g.x1), kink),
                  tie_max(y2, T(g.y2), kink) - tie_min(y1, T(g.y1), kink),
                  gt.cx - p.cx,
                  gt.cy - p.cy};
  return out;
}

// 1 - 2 sin^2(arcsin(|dy| / sigma) - pi/4) rewritten as sin(2 alpha) =
// 2 |dx| |dy| / sigma^2. The arcsin form loses ~1e-11 near 90 degrees.
double angle_value(double dx, double dy) {
  const double sigma = std::hypot(dx, dy);
  if (sigma == 0.0) {
    return 0.0;
  }
  return std::clamp(2.0 * (std::abs(dx) / sigma) * (std::abs(dy) / sigma), 0.0, 1.0);
}

Jet angle_value(const Jet& dx, const Jet& dy, KinkFlag& kink) {
  const Jet a = abs_value(dx, kink);
  const Jet b = abs_value(dy, kink);
  const Jet s = a * a + b * b;
  if (s.v == 0.0) {
    kink.hit = true;
    return Jet(0.0);
  }
  return 2.0 * a * b / s;
}

template <typename T>
T angle_terms(const T& dx, const T& dy, KinkFlag& kink) {
  if constexpr (kIsJet<T>) {
    return angle_value(dx, dy, kink);
  } else {
    return angle_value(dx, dy);
  }
}

template <typename T>
T distance_terms(const T& dx, const T& dy, const T& cw, const T& ch,
                 const T& angle, ChInterpretation mode, KinkFlag& kink) {
  const T gamma = 2.0 - angle;
  const T rho_x = square(dx / cw);
  T rho_y(0.0);
  if (mode == ChInterpretation::kEnclosing) {
    rho_y = square(dy / ch);
  } else {
    const T offset = abs_value(dy, kink);
    if (value(offset) > 0.0) rho_y = square(dy / offset);
  }
  return (1.0 - exp(-gamma * rho_x)) + (1.0 - exp(-gamma * rho_y));
}

template <typename T>
T shape_terms(const T& w, const T& h, const Box2D& gt, double theta,
              KinkFlag& kink) {
  const T omega_w = abs_value(w - gt.w, kink) / tie_max(w, T(gt.w), kink);
  const T omega_h = abs_value(h - gt.h, kink) / tie_max(h, T(gt.h), kink);
  return pow(1.0 - exp(-omega_w), theta) + pow(1.0 - exp(-omega_h), theta);
}

template <typename T>
struct SiouTerms {
  T iou, angle, distance, shape, total;
};

template <typename T>
SiouTerms<T> siou_terms(const BoxT<T>& p, const Box2D& gt,
                        const SiouParams& params, KinkFlag& kink) {
  const auto o = overlap_terms(p, gt, kink);
  SiouTerms<T> t{o.iou, angle_terms(o.dx, o.dy, kink), T(0.0), T(0.0),
                 T(0.0)};
  t.distance = distance_terms(o.dx, o.dy, o.cw, o.ch, t.angle, params.ch, kink);
  t.shape = shape_terms(p.w, p.h, gt, params.theta, kink);
  t.total = 1.0 - t.iou + (t.distance + t.shape) / 2.0;
  return t;
}

template <typename T>
T aspect_consistency(const BoxT<T>& p, const Box2D& gt) {
  const T diff = atan(T(gt.w / gt.h)) - atan(p.w / p.h);
  return (4.0 / (kPi * kPi)) * diff * diff;
}

template <typename T>
T diou_value(const OverlapT<T>& o) {
  return 1.0 - o.iou + (o.dx * o.dx + o.dy * o.dy) / (o.cw * o.cw + o.ch * o.ch);
}

double alpha_from(double iou, double v) {
  const double denom = (1.0 - iou) + v;
  return denom > 0.0 ? v / denom : 0.0;
}

// frozen_alpha < 0 means "compute alpha from the current point".
template <typename T>
T loss_terms(LossKind kind, const BoxT<T>& p, const Box2D& gt,
             const SiouParams& params, double frozen_alpha, KinkFlag& kink) {
  if (kind == LossKind::kSIoU) {
    return siou_terms(p, gt, params, kink).total;
  }
  const auto o = overlap_terms(p, gt, kink);
  switch (kind) {
    case LossKind::kIoU:
      return 1.0 - o.iou;
    case LossKind::kGIoU: {
      const T c = o.cw * o.ch;
      return 1.0 - o.iou + (c - o.union_area) / c;
    }
    case LossKind::kDIoU:
      return diou_value(o);
    case LossKind::kCIoU: {
      const T v = aspect_consistency(p, gt);
      const double alpha =
          frozen_alpha >= 0.0 ? frozen_alpha : alpha_from(value(o.iou), value(v));
      return diou_value(o) + alpha * v;
    }
    case LossKind::kSIoU:
      break;
  }
  throw std::logic_error("unreachable loss kind");
}

void require_valid(const Box2D& b, const char* what) {
  if (!is_valid(b)) {
    throw std::invalid_argument(std::string(what) +
                                " box must be finite with w, h > 0");
  }
}

}  // namespace
}  // namespace detail

using detail::KinkFlag;

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::kIoU: return "iou";
    case LossKind::kGIoU: return "giou";
    case LossKind::kDIoU: return "diou";
    case LossKind::kCIoU: return "ciou";
    case LossKind::kSIoU: return "siou";
  }
  return "unknown";
}

std::optional<LossKind> parse_loss_kind(std::string_view name) noexcept {
  for (auto k : kAllLossKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ChInterpretation ch) noexcept {
  return ch == ChInterpretation::kEnclosing ? "enclosing" : "center-offset";
}

std::optional<ChInterpretation> parse_ch_interpretation(
    std::string_view name) noexcept {
  if (name == "enclosing") return ChInterpretation::kEnclosing;
  if (name == "center-offset") return ChInterpretation::kCenterOffset;
  return std::nullopt;
}

void validate(const SiouParams& params) {
  if (!(params.theta >= kThetaMin && params.theta <= kThetaMax)) {
    throw std::invalid_argument("theta must lie in [2, 6]");
  }
}

double angle_cost(const Box2D& pred, const Box2D& gt) noexcept {
  return detail::angle_value(gt.cx - pred.cx, gt.cy - pred.cy);
}

double distance_cost(const Box2D& pred, const Box2D& gt, double angle,
                     ChInterpretation ch) noexcept {
  KinkFlag kink;
  const auto o = detail::overlap_terms(detail::lift(pred), gt, kink);
  return detail::distance_terms(o.dx, o.dy, o.cw, o.ch, angle, ch, kink);
}

double shape_cost(const Box2D& pred, const Box2D& gt,
                  const SiouParams& params) {
  validate(params);
  KinkFlag kink;
  return detail::shape_terms(pred.w, pred.h, gt, params.theta, kink);
}

LossBreakdown siou_loss(const Box2D& pred, const Box2D& gt,
                        const SiouParams& params) {
  validate(params);
  KinkFlag kink;
  const auto t = detail::siou_terms(detail::lift(pred), gt, params, kink);
  return {t.iou, t.angle, t.distance, t.shape, t.total};
}

double baseline_loss(LossKind kind, const Box2D& pred, const Box2D& gt) {
  if (kind == LossKind::kSIoU) {
    throw std::invalid_argument("siou is not a baseline loss");
  }
  KinkFlag kink;
  return detail::loss_terms(kind, detail::lift(pred), gt, SiouParams{}, -1.0,
                            kink);
}

double loss(LossKind kind, const Box2D& pred, const Box2D& gt,
            const SiouParams& params) {
  if (kind == LossKind::kSIoU) return siou_loss(pred, gt, params).total;
  return baseline_loss(kind, pred, gt);
}

double ciou_alpha(const Box2D& pred, const Box2D& gt) noexcept {
  return detail::alpha_from(
      iou(pred, gt), detail::aspect_consistency(detail::lift(pred), gt));
}

double ciou_loss_with_alpha(const Box2D& pred, const Box2D& gt,
                            double alpha) noexcept {
  KinkFlag kink;
  return detail::loss_terms(LossKind::kCIoU, detail::lift(pred), gt,
                            SiouParams{}, std::max(alpha, 0.0), kink);
}

Grad4 grad(LossKind kind, const Box2D& pred, const Box2D& gt,
           const SiouParams& params) {
  detail::require_valid(pred, "pred");
  detail::require_valid(gt, "gt");
  if (kind == LossKind::kSIoU) validate(params);
  const double alpha = kind == LossKind::kCIoU ? ciou_alpha(pred, gt) : -1.0;
  KinkFlag kink;
  const detail::Jet l =
      detail::loss_terms(kind, detail::lift_jet(pred), gt, params, alpha, kink);
  return {l.d[0], l.d[1], l.d[2], l.d[3], kink.hit};
}

Grad4 grad_fd(LossKind kind, const Box2D& pred, const Box2D& gt,
              const SiouParams& params, double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("finite-difference step must be positive");
  }
  detail::require_valid(pred, "pred");
  detail::require_valid(gt, "gt");
  if (!(pred.w > 2.0 * step && pred.h > 2.0 * step)) {
    throw std::invalid_argument("pred w, h must exceed twice the step");
  }
  const double alpha = kind == LossKind::kCIoU ? ciou_alpha(pred, gt) : -1.0;
  auto f = [&](const std::array<double, 4>& x) {
    const Box2D b{x[0], x[1], x[2], x[3]};
    if (kind == LossKind::kCIoU) return ciou_loss_with_alpha(b, gt, alpha);
    return loss(kind, b, gt, params);
  };
  const auto d =
      central_difference(f, {pred.cx, pred.cy, pred.w, pred.h}, step);
  return {d[0], d[1], d[2], d[3], false};
}

double gradient_rel_error(const Grad4& analytic,
                          const Grad4& numeric) noexcept {
  const auto a = analytic.as_array();
  const auto n = numeric.as_array();
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double err = std::abs(a[i] - n[i]) / std::max(1.0, std::abs(a[i]));
    if (std::isnan(err)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, err);
  }
  return worst;
}

bool away_from_kinks(const Box2D& pred, const Box2D& gt,
                     double margin) noexcept {
  const auto p = detail::to_corners(pred);
  const auto g = detail::to_corners(gt);
  const double gaps[] = {
      p.x1 - g.x1, p.x2 - g.x2, p.x1 - g.x2, p.x2 - g.x1,
      p.y1 - g.y1, p.y2 - g.y2, p.y1 - g.y2, p.y2 - g.y1,
      gt.cx - pred.cx, gt.cy - pred.cy, pred.w - gt.w, pred.h - gt.h,
  };
  return std::all_of(std::begin(gaps), std::end(gaps),
                     [margin](double g) { return std::abs(g) > margin; });
}

}  // namespace boxloss
