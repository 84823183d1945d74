// SPDX-License-Identifier: Apache-2.0
#ifndef BOXLOSS_GEOMETRY_HPP_
#define BOXLOSS_GEOMETRY_HPP_

namespace boxloss {

/// Axis-aligned box in center/size form. Width and height are strictly
/// positive for a valid box.
struct Box2D {
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;

  bool operator==(const Box2D&) const = default;
};

/// Width and height of the smallest axis-aligned box containing two boxes.
struct Enclosure {
  double cw = 0.0;
  double ch = 0.0;
};

bool is_valid(const Box2D& box) noexcept;

double area(const Box2D& box) noexcept;

/// Overlap area. Boxes that only touch along an edge give exactly 0.
double intersection_area(const Box2D& a, const Box2D& b) noexcept;

double union_area(const Box2D& a, const Box2D& b) noexcept;

/// Intersection over union, in [0, 1]. Symmetric in its arguments.
double iou(const Box2D& a, const Box2D& b) noexcept;

Enclosure enclosing(const Box2D& a, const Box2D& b) noexcept;

}  // namespace boxloss

#endif  // BOXLOSS_GEOMETRY_HPP_
