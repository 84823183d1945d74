// SPDX-License-Identifier: Apache-2.0
#include "boxloss/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "corners.hpp"

namespace boxloss {

using detail::to_corners;

bool is_valid(const Box2D& box) noexcept {
  return std::isfinite(box.cx) && std::isfinite(box.cy) &&
         std::isfinite(box.w) && std::isfinite(box.h) && box.w > 0.0 &&
         box.h > 0.0;
}

double area(const Box2D& box) noexcept { return box.w * box.h; }

double intersection_area(const Box2D& a, const Box2D& b) noexcept {
  const auto ca = to_corners(a);
  const auto cb = to_corners(b);
  const double iw = std::min(ca.x2, cb.x2) - std::max(ca.x1, cb.x1);
  const double ih = std::min(ca.y2, cb.y2) - std::max(ca.y1, cb.y1);
  if (iw <= 0.0 || ih <= 0.0) {
    return 0.0;
  }
  return iw * ih;
}

// Areas are taken from corner form so that identical boxes produce an
// intersection equal to their area bit for bit.
namespace {
double corner_area(const Box2D& b) noexcept {
  const auto c = to_corners(b);
  return (c.x2 - c.x1) * (c.y2 - c.y1);
}
}  // namespace

double union_area(const Box2D& a, const Box2D& b) noexcept {
  return corner_area(a) + corner_area(b) - intersection_area(a, b);
}

double iou(const Box2D& a, const Box2D& b) noexcept {
  const double inter = intersection_area(a, b);
  return inter / (corner_area(a) + corner_area(b) - inter);
}

Enclosure enclosing(const Box2D& a, const Box2D& b) noexcept {
  const auto ca = to_corners(a);
  const auto cb = to_corners(b);
  return {std::max(ca.x2, cb.x2) - std::min(ca.x1, cb.x1),
          std::max(ca.y2, cb.y2) - std::min(ca.y1, cb.y1)};
}

}  // namespace boxloss
