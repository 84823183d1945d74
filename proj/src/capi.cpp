// SPDX-License-Identifier: Apache-2.0
#include "boxloss/boxloss.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <stdexcept>
#include <string>

#include "boxloss/geometry.hpp"
#include "boxloss/gradcheck.hpp"
#include "boxloss/io.hpp"
#include "boxloss/losses.hpp"
#include "boxloss/regression.hpp"
#include "boxloss/sim_bench.hpp"
#include "boxloss/tuner.hpp"

#ifndef BOXLOSS_VERSION_STRING
#define BOXLOSS_VERSION_STRING "0.0.0"
#endif

namespace bl = boxloss;

struct bl_trajectory {
  bl::Trajectory rep;
};

struct bl_sim_config {
  bl::SimConfig rep;
};

struct bl_error_series {
  bl::ErrorSeries rep;
  std::vector<bl::Point> points;
  bl::SimConfig config;
};

struct bl_surface {
  bl::ErrorSurface rep;
};

struct bl_ga_config {
  bl::GaConfig rep;
};

struct bl_ga_result {
  bl::GaResult rep;
  bl::GaConfig ga;
  bl::SimConfig sim;
};

namespace {

thread_local std::string g_last_error;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bl_status fail(bl_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
bl_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return BL_OK;
  } catch (const std::invalid_argument& e) {
    return fail(BL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(BL_ERR_OUT_OF_RANGE, e.what());
  } catch (const IoError& e) {
    return fail(BL_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BL_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(BL_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(BL_ERR_RUNTIME, "unknown error");
  }
}

template <typename T>
const T& need(const T* p, const char* what) {
  if (p == nullptr) {
    throw std::invalid_argument(std::string(what) + " must not be NULL");
  }
  return *p;
}

template <typename T>
T& need_out(T* p) {
  if (p == nullptr) throw std::invalid_argument("output pointer must not be NULL");
  return *p;
}

bl::Box2D to_box(const bl_box* b, const char* what) {
  const auto& x = need(b, what);
  return {x.cx, x.cy, x.w, x.h};
}

bl_box from_box(const bl::Box2D& b) { return {b.cx, b.cy, b.w, b.h}; }

bl::LossKind to_kind(bl_loss_kind kind) {
  switch (kind) {
    case BL_LOSS_IOU: return bl::LossKind::kIoU;
    case BL_LOSS_GIOU: return bl::LossKind::kGIoU;
    case BL_LOSS_DIOU: return bl::LossKind::kDIoU;
    case BL_LOSS_CIOU: return bl::LossKind::kCIoU;
    case BL_LOSS_SIOU: return bl::LossKind::kSIoU;
  }
  throw std::invalid_argument("unknown loss kind");
}

bl_loss_kind from_kind(bl::LossKind kind) {
  return static_cast<bl_loss_kind>(static_cast<int>(kind));
}

bl::SiouParams to_params(const bl_siou_params* p) {
  if (p == nullptr) return {};
  if (p->ch != BL_CH_ENCLOSING && p->ch != BL_CH_CENTER_OFFSET) {
    throw std::invalid_argument("unknown ch interpretation");
  }
  return {p->theta, p->ch == BL_CH_ENCLOSING
                        ? bl::ChInterpretation::kEnclosing
                        : bl::ChInterpretation::kCenterOffset};
}

bl::AdamConfig to_adam(const bl_adam_config* c) {
  if (c == nullptr) return {};
  return {c->lr0,   c->beta1,      c->beta2,     c->eps,
          c->step_size, c->gamma, c->iterations, c->tolerance};
}

bl_grad4 from_grad(const bl::Grad4& g) {
  return {g.d_cx, g.d_cy, g.d_w, g.d_h, g.at_kink ? 1 : 0};
}

const char* need_str(const char* s, const char* what) {
  if (s == nullptr) {
    throw std::invalid_argument(std::string(what) + " must not be NULL");
  }
  return s;
}

template <typename Writer>
void write_file(const char* path, Writer&& writer) {
  need_str(path, "path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(std::string("cannot open '") + path + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError(std::string("write to '") + path + "' failed");
}

char* dup_string(const std::string& s) {
  auto* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* bl_version(void) { return BOXLOSS_VERSION_STRING; }

const char* bl_last_error(void) { return g_last_error.c_str(); }

void bl_string_free(char* s) { delete[] s; }

bl_status bl_loss_kind_parse(const char* name, bl_loss_kind* out) {
  return guarded([&] {
    const auto kind = bl::parse_loss_kind(need_str(name, "name"));
    if (!kind) throw std::invalid_argument(std::string("unknown loss '") + name + "'");
    need_out(out) = from_kind(*kind);
  });
}

const char* bl_loss_kind_name(bl_loss_kind kind) {
  switch (kind) {
    case BL_LOSS_IOU: return "iou";
    case BL_LOSS_GIOU: return "giou";
    case BL_LOSS_DIOU: return "diou";
    case BL_LOSS_CIOU: return "ciou";
    case BL_LOSS_SIOU: return "siou";
  }
  return nullptr;
}

bl_status bl_ch_interpretation_parse(const char* name,
                                     bl_ch_interpretation* out) {
  return guarded([&] {
    const auto ch = bl::parse_ch_interpretation(need_str(name, "name"));
    if (!ch) {
      throw std::invalid_argument("ch interpretation must be enclosing or center-offset");
    }
    need_out(out) = *ch == bl::ChInterpretation::kEnclosing ? BL_CH_ENCLOSING
                                                            : BL_CH_CENTER_OFFSET;
  });
}

void bl_siou_params_default(bl_siou_params* out) {
  if (out != nullptr) *out = {bl::SiouParams{}.theta, BL_CH_ENCLOSING};
}

void bl_adam_config_default(bl_adam_config* out) {
  if (out == nullptr) return;
  const bl::AdamConfig c;
  *out = {c.lr0, c.beta1, c.beta2, c.eps, c.step_size, c.gamma, c.iterations,
          c.tolerance};
}

bl_status bl_intersection_area(const bl_box* a, const bl_box* b, double* out) {
  return guarded([&] {
    need_out(out) = bl::intersection_area(to_box(a, "a"), to_box(b, "b"));
  });
}

bl_status bl_iou(const bl_box* a, const bl_box* b, double* out) {
  return guarded([&] {
    const auto ba = to_box(a, "a");
    const auto bb = to_box(b, "b");
    if (!bl::is_valid(ba) || !bl::is_valid(bb)) {
      throw std::invalid_argument("boxes must be finite with w, h > 0");
    }
    need_out(out) = bl::iou(ba, bb);
  });
}

bl_status bl_enclosing(const bl_box* a, const bl_box* b, double* cw,
                       double* ch) {
  return guarded([&] {
    const auto e = bl::enclosing(to_box(a, "a"), to_box(b, "b"));
    need_out(cw) = e.cw;
    need_out(ch) = e.ch;
  });
}

bl_status bl_siou_loss(const bl_box* pred, const bl_box* gt,
                       const bl_siou_params* params, bl_loss_breakdown* out) {
  return guarded([&] {
    const auto r =
        bl::siou_loss(to_box(pred, "pred"), to_box(gt, "gt"), to_params(params));
    need_out(out) = {r.iou, r.angle_cost, r.distance_cost, r.shape_cost, r.total};
  });
}

bl_status bl_loss(bl_loss_kind kind, const bl_box* pred, const bl_box* gt,
                  const bl_siou_params* params, double* out) {
  return guarded([&] {
    need_out(out) = bl::loss(to_kind(kind), to_box(pred, "pred"),
                             to_box(gt, "gt"), to_params(params));
  });
}

bl_status bl_grad(bl_loss_kind kind, const bl_box* pred, const bl_box* gt,
                  const bl_siou_params* params, bl_grad4* out) {
  return guarded([&] {
    need_out(out) = from_grad(bl::grad(to_kind(kind), to_box(pred, "pred"),
                                       to_box(gt, "gt"), to_params(params)));
  });
}

bl_status bl_grad_fd(bl_loss_kind kind, const bl_box* pred, const bl_box* gt,
                     const bl_siou_params* params, double step,
                     bl_grad4* out) {
  return guarded([&] {
    need_out(out) =
        from_grad(bl::grad_fd(to_kind(kind), to_box(pred, "pred"),
                              to_box(gt, "gt"), to_params(params), step));
  });
}

bl_status bl_gradcheck(bl_loss_kind kind, const bl_siou_params* params,
                       uint64_t samples, uint64_t seed, double step,
                       bl_gradcheck_report* out) {
  return guarded([&] {
    auto& o = need_out(out);
    const auto r =
        bl::gradcheck(to_kind(kind), to_params(params), samples, seed, step);
    o = {r.samples,
         r.kink_skipped,
         r.max_rel_error,
         r.mean_rel_error,
         from_box(r.worst_pred),
         from_box(r.worst_gt),
         from_grad(r.worst_analytic),
         from_grad(r.worst_numeric)};
  });
}

bl_status bl_lr_at(const bl_adam_config* config, int32_t iteration,
                   double* out) {
  return guarded([&] {
    const auto c = to_adam(config);
    bl::validate(c);
    need_out(out) = bl::lr_at(c, iteration);
  });
}

bl_status bl_fit(const bl_box* anchor, const bl_box* target, bl_loss_kind kind,
                 const bl_siou_params* params, const bl_adam_config* config,
                 bl_trajectory** out) {
  return guarded([&] {
    auto& o = need_out(out);
    auto traj = bl::fit(to_box(anchor, "anchor"), to_box(target, "target"),
                        to_kind(kind), to_params(params), to_adam(config));
    o = new bl_trajectory{std::move(traj)};
  });
}

void bl_trajectory_free(bl_trajectory* t) { delete t; }

size_t bl_trajectory_size(const bl_trajectory* t) {
  return t == nullptr ? 0 : t->rep.boxes.size();
}

bl_status bl_trajectory_at(const bl_trajectory* t, size_t index, bl_box* box,
                           double* l1_error) {
  return guarded([&] {
    const auto& tr = need(t, "trajectory").rep;
    if (index >= tr.boxes.size()) throw std::out_of_range("trajectory index out of range");
    if (box != nullptr) *box = from_box(tr.boxes[index]);
    if (l1_error != nullptr) *l1_error = tr.l1_errors[index];
  });
}

int64_t bl_trajectory_converged_at(const bl_trajectory* t) {
  if (t == nullptr || !t->rep.converged_at) return -1;
  return *t->rep.converged_at;
}

bl_status bl_trajectory_flags(const bl_trajectory* t, uint64_t* rejected_steps,
                              uint64_t* clamped_steps) {
  return guarded([&] {
    const auto& tr = need(t, "trajectory").rep;
    if (rejected_steps != nullptr) *rejected_steps = static_cast<uint64_t>(tr.rejected_steps);
    if (clamped_steps != nullptr) *clamped_steps = static_cast<uint64_t>(tr.clamped_steps);
  });
}

bl_status bl_trajectory_write_csv(const bl_trajectory* t, const char* path) {
  return guarded([&] {
    const auto& tr = need(t, "trajectory").rep;
    write_file(path, [&](std::ostream& os) { bl::write_trajectory_csv(os, tr); });
  });
}

bl_status bl_sim_config_create(bl_sim_config** out) {
  return guarded([&] { need_out(out) = new bl_sim_config{}; });
}

bl_status bl_sim_config_clone(const bl_sim_config* config, bl_sim_config** out) {
  return guarded([&] {
    auto& o = need_out(out);
    o = new bl_sim_config{need(config, "config").rep};
  });
}

void bl_sim_config_free(bl_sim_config* config) { delete config; }

bl_status bl_sim_config_set(bl_sim_config* config, const char* key,
                            const char* value) {
  return guarded([&] {
    if (config == nullptr) throw std::invalid_argument("config must not be NULL");
    bl::set_option(config->rep, need_str(key, "key"), need_str(value, "value"));
  });
}

bl_status bl_sim_config_validate(const bl_sim_config* config) {
  return guarded([&] { bl::validate(need(config, "config").rep); });
}

bl_status bl_sim_config_case_count(const bl_sim_config* config, uint64_t* out) {
  return guarded([&] { need_out(out) = bl::case_count(need(config, "config").rep); });
}

bl_status bl_sim_config_to_json(const bl_sim_config* config, char** out) {
  return guarded([&] {
    auto& o = need_out(out);
    o = dup_string(bl::to_json(need(config, "config").rep).dump(2));
  });
}

bl_status bl_sim_run(const bl_sim_config* config, uint32_t threads,
                     bl_error_series** out) {
  return guarded([&] {
    auto& o = need_out(out);
    const auto& c = need(config, "config").rep;
    bl::validate(c);
    auto points = bl::generate_points(c);
    auto series = bl::run(c, points, threads);
    o = new bl_error_series{std::move(series), std::move(points), c};
  });
}

void bl_error_series_free(bl_error_series* s) { delete s; }

size_t bl_error_series_size(const bl_error_series* s) {
  return s == nullptr ? 0 : s->rep.per_iteration_total.size();
}

bl_status bl_error_series_total(const bl_error_series* s, size_t iteration,
                                double* out) {
  return guarded([&] {
    need_out(out) = need(s, "series").rep.per_iteration_total.at(iteration);
  });
}

size_t bl_error_series_point_count(const bl_error_series* s) {
  return s == nullptr ? 0 : s->points.size();
}

bl_status bl_error_series_point(const bl_error_series* s, size_t index,
                                double* x, double* y, double* final_error) {
  return guarded([&] {
    const auto& series = need(s, "series");
    const auto& p = series.points.at(index);
    if (x != nullptr) *x = p.x;
    if (y != nullptr) *y = p.y;
    if (final_error != nullptr) *final_error = series.rep.per_point_final.at(index);
  });
}

bl_status bl_error_series_counts(const bl_error_series* s, uint64_t* case_count,
                                 uint64_t* flagged_cases,
                                 uint64_t* rejected_steps,
                                 uint64_t* clamped_steps) {
  return guarded([&] {
    const auto& r = need(s, "series").rep;
    if (case_count != nullptr) *case_count = r.case_count;
    if (flagged_cases != nullptr) *flagged_cases = r.flagged_cases;
    if (rejected_steps != nullptr) *rejected_steps = r.rejected_steps;
    if (clamped_steps != nullptr) *clamped_steps = r.clamped_steps;
  });
}

bl_status bl_error_series_write_csv(const bl_error_series* s, const char* path) {
  return guarded([&] {
    const auto& r = need(s, "series").rep;
    write_file(path, [&](std::ostream& os) { bl::write_series_csv(os, r); });
  });
}

bl_status bl_error_series_write_points_csv(const bl_error_series* s,
                                           const char* path) {
  return guarded([&] {
    const auto& series = need(s, "series");
    write_file(path, [&](std::ostream& os) {
      bl::write_points_csv(os, series.points, series.rep.per_point_final);
    });
  });
}

bl_status bl_surface_compute(const double* xs, const double* ys,
                             const double* final_errors, size_t n,
                             double center_x, double center_y, double radius,
                             int32_t bins, bl_surface** out) {
  return guarded([&] {
    auto& o = need_out(out);
    if (n > 0 && (xs == nullptr || ys == nullptr || final_errors == nullptr)) {
      throw std::invalid_argument("point arrays must not be NULL");
    }
    std::vector<bl::Point> points(n);
    for (size_t i = 0; i < n; ++i) points[i] = {xs[i], ys[i]};
    auto s = bl::surface(std::span<const double>(final_errors, n), points, bins,
                         {center_x, center_y}, radius);
    o = new bl_surface{std::move(s)};
  });
}

bl_status bl_surface_from_series(const bl_error_series* s,
                                 const bl_sim_config* config, int32_t bins,
                                 bl_surface** out) {
  return guarded([&] {
    auto& o = need_out(out);
    const auto& series = need(s, "series");
    const auto& c = config != nullptr ? config->rep : series.config;
    o = new bl_surface{bl::surface(series.rep, series.points, bins, c)};
  });
}

void bl_surface_free(bl_surface* s) { delete s; }

int32_t bl_surface_bins(const bl_surface* s) {
  return s == nullptr ? 0 : s->rep.resolution;
}

bl_status bl_surface_cell(const bl_surface* s, int32_t ix, int32_t iy,
                          double* x_center, double* y_center, double* mean,
                          uint64_t* count) {
  return guarded([&] {
    const auto& r = need(s, "surface").rep;
    if (ix < 0 || iy < 0 || ix >= r.resolution || iy >= r.resolution) {
      throw std::out_of_range("surface cell out of range");
    }
    if (x_center != nullptr) *x_center = r.x_min + (ix + 0.5) * r.cell_width();
    if (y_center != nullptr) *y_center = r.y_min + (iy + 0.5) * r.cell_height();
    if (mean != nullptr) *mean = r.mean(ix, iy);
    if (count != nullptr) *count = r.count[r.index(ix, iy)];
  });
}

bl_status bl_surface_write_csv(const bl_surface* s, const char* path) {
  return guarded([&] {
    const auto& r = need(s, "surface").rep;
    write_file(path, [&](std::ostream& os) { bl::write_surface_csv(os, r); });
  });
}

bl_status bl_surface_write_json(const bl_surface* s, const char* path,
                                const char* provenance_json) {
  return guarded([&] {
    auto j = bl::to_json(need(s, "surface").rep);
    if (provenance_json != nullptr) {
      const auto prov = nlohmann::json::parse(provenance_json, nullptr, false);
      if (prov.is_discarded()) throw std::invalid_argument("provenance is not valid JSON");
      j["provenance"] = prov;
    }
    write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  });
}

bl_status bl_ga_config_create(bl_ga_config** out) {
  return guarded([&] { need_out(out) = new bl_ga_config{}; });
}

void bl_ga_config_free(bl_ga_config* config) { delete config; }

bl_status bl_ga_config_set(bl_ga_config* config, const char* key,
                           const char* value) {
  return guarded([&] {
    if (config == nullptr) throw std::invalid_argument("config must not be NULL");
    bl::set_option(config->rep, need_str(key, "key"), need_str(value, "value"));
  });
}

bl_status bl_ga_config_to_json(const bl_ga_config* config, char** out) {
  return guarded([&] {
    auto& o = need_out(out);
    o = dup_string(bl::to_json(need(config, "config").rep).dump(2));
  });
}

bl_status bl_fitness(double theta, const bl_sim_config* sim, uint32_t threads,
                     double* out) {
  return guarded([&] {
    auto c = need(sim, "sim").rep;
    c.kind = bl::LossKind::kSIoU;
    c.siou.theta = theta;
    bl::validate(c);
    need_out(out) = bl::fitness(theta, c, threads);
  });
}

bl_status bl_tune_theta(const bl_ga_config* ga, const bl_sim_config* sim,
                        uint32_t threads, bl_ga_result** out) {
  return guarded([&] {
    auto& o = need_out(out);
    const auto& g = need(ga, "ga").rep;
    auto s = need(sim, "sim").rep;
    s.kind = bl::LossKind::kSIoU;
    auto result = bl::tune_theta(g, s, threads);
    o = new bl_ga_result{std::move(result), g, s};
  });
}

void bl_ga_result_free(bl_ga_result* r) { delete r; }

double bl_ga_result_best_theta(const bl_ga_result* r) {
  return r == nullptr ? std::numeric_limits<double>::quiet_NaN()
                      : r->rep.best_theta;
}

double bl_ga_result_best_fitness(const bl_ga_result* r) {
  return r == nullptr ? std::numeric_limits<double>::quiet_NaN()
                      : r->rep.best_fitness;
}

size_t bl_ga_result_history_size(const bl_ga_result* r) {
  return r == nullptr ? 0 : r->rep.history.size();
}

bl_status bl_ga_result_history_at(const bl_ga_result* r, size_t generation,
                                  double* out) {
  return guarded([&] {
    need_out(out) = need(r, "result").rep.history.at(generation);
  });
}

bl_status bl_ga_result_to_json(const bl_ga_result* r, char** out) {
  return guarded([&] {
    auto& o = need_out(out);
    const auto& res = need(r, "result");
    o = dup_string(bl::to_json(res.rep, res.ga, res.sim).dump(2));
  });
}

bl_status bl_ga_result_write_json(const bl_ga_result* r, const char* path) {
  return guarded([&] {
    const auto& res = need(r, "result");
    const auto j = bl::to_json(res.rep, res.ga, res.sim);
    write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  });
}

}  // extern "C"
