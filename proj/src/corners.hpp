// SPDX-License-Identifier: Apache-2.0
#ifndef BOXLOSS_SRC_CORNERS_HPP_
#define BOXLOSS_SRC_CORNERS_HPP_

#include "boxloss/geometry.hpp"

namespace boxloss::detail {

struct Corners {
  double x1, y1, x2, y2;
};

inline Corners to_corners(const Box2D& b) noexcept {
  return {b.cx - 0.5 * b.w, b.cy - 0.5 * b.h, b.cx + 0.5 * b.w,
          b.cy + 0.5 * b.h};
}

}  // namespace boxloss::detail

#endif  // BOXLOSS_SRC_CORNERS_HPP_
