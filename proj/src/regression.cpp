// SPDX-License-Identifier: Apache-2.0
#include "boxloss/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace boxloss {

void validate(const AdamConfig& c) {
  if (!(c.lr0 > 0.0) || !std::isfinite(c.lr0)) {
    throw std::invalid_argument("lr0 must be positive");
  }
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0)) {
    throw std::invalid_argument("beta1, beta2 must lie in [0, 1)");
  }
  if (!(c.eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (c.step_size < 1) throw std::invalid_argument("step_size must be >= 1");
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1]");
  }
  if (c.iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (!(c.tolerance > 0.0)) {
    throw std::invalid_argument("tolerance must be positive");
  }
}

double lr_at(const AdamConfig& config, int iteration) {
  if (iteration < 0) throw std::invalid_argument("iteration must be >= 0");
  return config.lr0 * std::pow(config.gamma, iteration / config.step_size);
}

AdamStepResult adam_step(const AdamState& state, const Grad4& g, double lr,
                         const Box2D& box, const AdamConfig& config) {
  const auto grad = g.as_array();
  for (double x : grad) {
    if (!std::isfinite(x)) return {state, box, true, false};
  }

  AdamStepResult out{state, box, false, false};
  auto& s = out.state;
  s.t += 1;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(s.t));
  std::array<double, 4> params{box.cx, box.cy, box.w, box.h};
  for (std::size_t i = 0; i < 4; ++i) {
    s.m[i] = config.beta1 * s.m[i] + (1.0 - config.beta1) * grad[i];
    s.v[i] = config.beta2 * s.v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    const double m_hat = s.m[i] / c1;
    const double v_hat = s.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
  for (std::size_t i = 2; i < 4; ++i) {
    if (!(params[i] >= kMinBoxSize)) {
      params[i] = kMinBoxSize;
      out.clamped = true;
    }
  }
  out.box = {params[0], params[1], params[2], params[3]};
  return out;
}

double l1_error(const Box2D& box, const Box2D& gt) noexcept {
  return std::abs(box.cx - gt.cx) + std::abs(box.cy - gt.cy) +
         std::abs(box.w - gt.w) + std::abs(box.h - gt.h);
}

namespace {

// on_box(k, box, l1) is called for k = 0 .. iterations.
template <typename OnBox>
FitStats run_fit(const Box2D& anchor, const Box2D& target, LossKind kind,
                 const SiouParams& params, const AdamConfig& config,
                 OnBox&& on_box) {
  FitStats stats;
  AdamState state;
  Box2D box = anchor;
  auto record = [&](int k) {
    const double err = l1_error(box, target);
    if (!stats.converged_at && err < config.tolerance) stats.converged_at = k;
    on_box(k, box, err);
  };
  record(0);
  for (int k = 0; k < config.iterations; ++k) {
    const Grad4 g = grad(kind, box, target, params);
    auto step = adam_step(state, g, lr_at(config, k), box, config);
    if (step.rejected) ++stats.rejected_steps;
    if (step.clamped) ++stats.clamped_steps;
    state = step.state;
    box = step.box;
    record(k + 1);
  }
  return stats;
}

}  // namespace

Trajectory fit(const Box2D& anchor, const Box2D& target, LossKind kind,
               const SiouParams& params, const AdamConfig& config) {
  validate(config);
  if (kind == LossKind::kSIoU) validate(params);
  if (!is_valid(anchor) || !is_valid(target)) {
    throw std::invalid_argument("anchor and target must be valid boxes");
  }
  Trajectory traj;
  traj.boxes.reserve(static_cast<std::size_t>(config.iterations) + 1);
  traj.l1_errors.reserve(static_cast<std::size_t>(config.iterations) + 1);
  const auto stats = run_fit(anchor, target, kind, params, config,
                             [&](int, const Box2D& b, double err) {
                               traj.boxes.push_back(b);
                               traj.l1_errors.push_back(err);
                             });
  traj.converged_at = stats.converged_at;
  traj.rejected_steps = stats.rejected_steps;
  traj.clamped_steps = stats.clamped_steps;
  return traj;
}

FitStats fit_errors(const Box2D& anchor, const Box2D& target, LossKind kind,
                    const SiouParams& params, const AdamConfig& config,
                    std::span<double> errors) {
  if (errors.size() != static_cast<std::size_t>(config.iterations) + 1) {
    throw std::invalid_argument("errors span must hold iterations + 1 values");
  }
  return run_fit(anchor, target, kind, params, config,
                 [&](int k, const Box2D&, double err) {
                   errors[static_cast<std::size_t>(k)] = err;
                 });
}

}  // namespace boxloss
