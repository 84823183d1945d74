// SPDX-License-Identifier: Apache-2.0
//
// Simulation benchmark: anchors scattered uniformly over a disk, each with
// every (scale, aspect) combination, are regressed onto unit-area targets of
// every target aspect centered at the disk center. The default configuration
// is the 5000-point, 7 x 7 x 7 grid (1,715,000 regression cases).
#ifndef BOXLOSS_SIM_BENCH_HPP_
#define BOXLOSS_SIM_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "boxloss/geometry.hpp"
#include "boxloss/losses.hpp"
#include "boxloss/regression.hpp"

namespace boxloss {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

struct SimConfig {
  int num_points = 5000;
  Point center{10.0, 10.0};
  double radius = 3.0;
  std::vector<double> scales{0.5, 0.67, 0.75, 1.0, 1.33, 1.5, 2.0};  // areas
  std::vector<double> aspects{0.25, 1.0 / 3.0, 0.5, 1.0, 2.0, 3.0, 4.0};  // w/h
  std::vector<double> target_aspects{0.25, 1.0 / 3.0, 0.5, 1.0,
                                     2.0,  3.0,       4.0};
  std::uint64_t seed = 1;
  LossKind kind = LossKind::kSIoU;
  SiouParams siou;
  AdamConfig adam;
};

/// Throws std::invalid_argument when the config is unusable.
void validate(const SimConfig& config);

std::uint64_t case_count(const SimConfig& config) noexcept;

/// Box of the given area and aspect ratio (w / h) centered at p.
Box2D make_box(Point p, double area, double aspect) noexcept;

/// num_points points uniform over the disk: radius * sqrt(u), angle 2 pi v.
std::vector<Point> generate_points(const SimConfig& config);

struct SimCase {
  std::size_t point_index = 0;
  Box2D anchor;
  Box2D target;
};

/// Random-access view of the case enumeration. Order is point-major, then
/// scale, anchor aspect, target aspect.
class CaseGrid {
 public:
  CaseGrid(const SimConfig& config, std::vector<Point> points);
  explicit CaseGrid(const SimConfig& config);

  std::uint64_t size() const noexcept { return size_; }
  std::size_t cases_per_point() const noexcept { return per_point_; }
  const std::vector<Point>& points() const noexcept { return points_; }

  SimCase operator[](std::uint64_t index) const;

 private:
  std::vector<Point> points_;
  std::vector<double> scales_;
  std::vector<double> aspects_;
  std::vector<Box2D> targets_;
  std::size_t per_point_ = 0;
  std::uint64_t size_ = 0;
};

struct ErrorSeries {
  /// E(i): L1 error summed over all cases after i iterations, i = 0..iters.
  std::vector<double> per_iteration_total;
  /// Final-iteration L1 error summed over each anchor point's cases.
  std::vector<double> per_point_final;
  std::uint64_t case_count = 0;
  std::uint64_t flagged_cases = 0;  // cases with any rejected or clamped step
  std::uint64_t rejected_steps = 0;
  std::uint64_t clamped_steps = 0;
};

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values) noexcept;

/// Fits every case and aggregates the error curves. threads == 0 means
/// hardware concurrency. The result is bitwise identical for any thread
/// count: per-point partial sums are formed in case order and reduced over
/// points in point order.
ErrorSeries run(const SimConfig& config, unsigned threads = 0);

/// Same, with an explicit point set.
ErrorSeries run(const SimConfig& config, std::span<const Point> points,
                unsigned threads = 0);

struct ErrorSurface {
  int resolution = 0;
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  std::vector<double> sum;           // row-major [iy * resolution + ix]
  std::vector<std::uint64_t> count;  // 0 marks an empty cell

  double cell_width() const noexcept { return (x_max - x_min) / resolution; }
  double cell_height() const noexcept { return (y_max - y_min) / resolution; }
  bool empty(int ix, int iy) const { return count.at(index(ix, iy)) == 0; }
  /// NaN for empty cells.
  double mean(int ix, int iy) const;
  std::size_t index(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(resolution) +
           static_cast<std::size_t>(ix);
  }
};

/// Bins per-point final errors over the square [center - radius,
/// center + radius]^2 with resolution x resolution cells. Points outside the
/// square are clamped into the border cells. Throws std::invalid_argument
/// when resolution < 2 or the spans differ in length.
ErrorSurface surface(std::span<const double> per_point_final,
                     std::span<const Point> points, int resolution,
                     Point center, double radius);

ErrorSurface surface(const ErrorSeries& series, std::span<const Point> points,
                     int resolution, const SimConfig& config);

}  // namespace boxloss

#endif  // BOXLOSS_SIM_BENCH_HPP_
