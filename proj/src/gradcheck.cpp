// SPDX-License-Identifier: Apache-2.0
#include "boxloss/gradcheck.hpp"

#include <stdexcept>

#include "boxloss/rng.hpp"

namespace boxloss {

GradCheckReport gradcheck(LossKind kind, const SiouParams& params,
                          std::uint64_t samples, std::uint64_t seed,
                          double step) {
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  if (!(step > 0.0) || step > 0.01) {
    throw std::invalid_argument("step must lie in (0, 0.01]");
  }
  validate(params);
  Rng rng(seed);
  GradCheckReport report;
  double total = 0.0;
  while (report.samples < samples) {
    Box2D gt{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
             rng.uniform(0.25, 4.0), rng.uniform(0.25, 4.0)};
    Box2D pred{gt.cx + rng.uniform(-1.5, 1.5), gt.cy + rng.uniform(-1.5, 1.5),
               rng.uniform(0.25, 4.0), rng.uniform(0.25, 4.0)};
    if (!away_from_kinks(pred, gt, kKinkMargin)) {
      ++report.kink_skipped;
      continue;
    }
    const Grad4 analytic = grad(kind, pred, gt, params);
    const Grad4 numeric = grad_fd(kind, pred, gt, params, step);
    const double err = gradient_rel_error(analytic, numeric);
    ++report.samples;
    total += err;
    if (report.samples == 1 || err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst_pred = pred;
      report.worst_gt = gt;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  }
  report.mean_rel_error = total / static_cast<double>(report.samples);
  return report;
}

}  // namespace boxloss
