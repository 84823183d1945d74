// SPDX-License-Identifier: Apache-2.0
#include "boxloss/sim_bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "boxloss/rng.hpp"
#include "parallel.hpp"

namespace boxloss {

namespace {

void require_positive_list(const std::vector<double>& values, const char* what) {
  if (values.empty()) {
    throw std::invalid_argument(std::string(what) + " must not be empty");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) +
                                  " entries must be positive and finite");
    }
  }
}

}  // namespace

void validate(const SimConfig& config) {
  if (config.num_points < 1) {
    throw std::invalid_argument("num_points must be >= 1");
  }
  if (!(config.radius > 0.0) || !std::isfinite(config.radius)) {
    throw std::invalid_argument("radius must be positive");
  }
  if (!std::isfinite(config.center.x) || !std::isfinite(config.center.y)) {
    throw std::invalid_argument("center must be finite");
  }
  require_positive_list(config.scales, "scales");
  require_positive_list(config.aspects, "aspects");
  require_positive_list(config.target_aspects, "target_aspects");
  validate(config.adam);
  if (config.kind == LossKind::kSIoU) validate(config.siou);
}

std::uint64_t case_count(const SimConfig& config) noexcept {
  return static_cast<std::uint64_t>(std::max(config.num_points, 0)) *
         config.scales.size() * config.aspects.size() *
         config.target_aspects.size();
}

Box2D make_box(Point p, double area, double aspect) noexcept {
  return {p.x, p.y, std::sqrt(area * aspect), std::sqrt(area / aspect)};
}

std::vector<Point> generate_points(const SimConfig& config) {
  if (config.num_points < 1) {
    throw std::invalid_argument("num_points must be >= 1");
  }
  Rng rng(config.seed);
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(config.num_points));
  for (int i = 0; i < config.num_points; ++i) {
    const double r = config.radius * std::sqrt(rng.uniform01());
    const double angle = 2.0 * std::numbers::pi * rng.uniform01();
    points.push_back({config.center.x + r * std::cos(angle),
                      config.center.y + r * std::sin(angle)});
  }
  return points;
}

CaseGrid::CaseGrid(const SimConfig& config, std::vector<Point> points)
    : points_(std::move(points)),
      scales_(config.scales),
      aspects_(config.aspects) {
  targets_.reserve(config.target_aspects.size());
  for (double a : config.target_aspects) {
    targets_.push_back(make_box(config.center, 1.0, a));
  }
  per_point_ = scales_.size() * aspects_.size() * targets_.size();
  size_ = static_cast<std::uint64_t>(points_.size()) * per_point_;
}

CaseGrid::CaseGrid(const SimConfig& config)
    : CaseGrid(config, generate_points(config)) {}

SimCase CaseGrid::operator[](std::uint64_t index) const {
  if (index >= size_) throw std::out_of_range("case index out of range");
  const std::size_t point = static_cast<std::size_t>(index / per_point_);
  std::size_t rem = static_cast<std::size_t>(index % per_point_);
  const std::size_t t = rem % targets_.size();
  rem /= targets_.size();
  const std::size_t a = rem % aspects_.size();
  const std::size_t s = rem / aspects_.size();
  return {point, make_box(points_[point], scales_[s], aspects_[a]),
          targets_[t]};
}

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

ErrorSeries run(const SimConfig& config, unsigned threads) {
  validate(config);
  const auto points = generate_points(config);
  return run(config, points, threads);
}

ErrorSeries run(const SimConfig& config, std::span<const Point> points,
                unsigned threads) {
  validate(config);
  const CaseGrid grid(config, std::vector<Point>(points.begin(), points.end()));
  const std::size_t n_points = points.size();
  const std::size_t per_point = grid.cases_per_point();
  const std::size_t n_iter = static_cast<std::size_t>(config.adam.iterations) + 1;

  // point_sums[p * n_iter + i]: error of point p's cases after i iterations.
  std::vector<double> point_sums(n_points * n_iter, 0.0);
  struct PointFlags {
    std::uint64_t flagged = 0, rejected = 0, clamped = 0;
  };
  std::vector<PointFlags> flags(n_points);

  detail::parallel_for(n_points, threads, [&](std::size_t p) {
    // case_errors[i * per_point + c]: iteration-major so each iteration's
    // column is contiguous for the pairwise reduction.
    std::vector<double> case_errors(n_iter * per_point);
    std::vector<double> curve(n_iter);
    PointFlags f;
    for (std::size_t c = 0; c < per_point; ++c) {
      const SimCase sc = grid[static_cast<std::uint64_t>(p) * per_point + c];
      const FitStats stats =
          fit_errors(sc.anchor, sc.target, config.kind, config.siou,
                     config.adam, curve);
      for (std::size_t i = 0; i < n_iter; ++i) {
        case_errors[i * per_point + c] = curve[i];
      }
      if (stats.rejected_steps > 0 || stats.clamped_steps > 0) ++f.flagged;
      f.rejected += static_cast<std::uint64_t>(stats.rejected_steps);
      f.clamped += static_cast<std::uint64_t>(stats.clamped_steps);
    }
    for (std::size_t i = 0; i < n_iter; ++i) {
      point_sums[p * n_iter + i] = pairwise_sum(
          std::span<const double>(case_errors).subspan(i * per_point, per_point));
    }
    flags[p] = f;
  });

  ErrorSeries out;
  out.case_count = grid.size();
  out.per_iteration_total.resize(n_iter);
  std::vector<double> column(n_points);
  for (std::size_t i = 0; i < n_iter; ++i) {
    for (std::size_t p = 0; p < n_points; ++p) column[p] = point_sums[p * n_iter + i];
    out.per_iteration_total[i] = pairwise_sum(column);
  }
  out.per_point_final.resize(n_points);
  for (std::size_t p = 0; p < n_points; ++p) {
    out.per_point_final[p] = point_sums[p * n_iter + n_iter - 1];
  }
  for (const auto& f : flags) {
    out.flagged_cases += f.flagged;
    out.rejected_steps += f.rejected;
    out.clamped_steps += f.clamped;
  }
  return out;
}

double ErrorSurface::mean(int ix, int iy) const {
  const auto i = index(ix, iy);
  if (count.at(i) == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum[i] / static_cast<double>(count[i]);
}

ErrorSurface surface(std::span<const double> per_point_final,
                     std::span<const Point> points, int resolution,
                     Point center, double radius) {
  if (resolution < 2) {
    throw std::invalid_argument("surface resolution must be >= 2");
  }
  if (per_point_final.size() != points.size()) {
    throw std::invalid_argument("one final error per point is required");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  ErrorSurface s;
  s.resolution = resolution;
  s.x_min = center.x - radius;
  s.x_max = center.x + radius;
  s.y_min = center.y - radius;
  s.y_max = center.y + radius;
  const auto cells = static_cast<std::size_t>(resolution) * resolution;
  s.sum.assign(cells, 0.0);
  s.count.assign(cells, 0);
  auto bin = [resolution](double v, double lo, double width) {
    const double f = std::floor((v - lo) / width);
    return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(resolution - 1)));
  };
  for (std::size_t p = 0; p < points.size(); ++p) {
    const int ix = bin(points[p].x, s.x_min, s.cell_width());
    const int iy = bin(points[p].y, s.y_min, s.cell_height());
    s.sum[s.index(ix, iy)] += per_point_final[p];
    s.count[s.index(ix, iy)] += 1;
  }
  return s;
}

ErrorSurface surface(const ErrorSeries& series, std::span<const Point> points,
                     int resolution, const SimConfig& config) {
  return surface(series.per_point_final, points, resolution, config.center,
                 config.radius);
}

}  // namespace boxloss
