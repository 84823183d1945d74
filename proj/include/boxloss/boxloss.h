/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to libboxloss: IoU-family box regression losses with analytic
 * gradients, a single-pair Adam fitter, the simulation benchmark and the
 * genetic-algorithm theta tuner.
 *
 * Conventions:
 *  - Every fallible function returns bl_status. On failure a message for the
 *    calling thread is available from bl_last_error() until the next failing
 *    call on that thread.
 *  - Objects are opaque handles created by bl_*_create / bl_*_run / bl_fit
 *    and released with the matching bl_*_free. Freeing NULL is a no-op.
 *  - Strings returned through char** are heap-allocated; release them with
 *    bl_string_free.
 *  - Handles are not synchronized. Distinct handles may be used from
 *    different threads concurrently; const accessors on one handle may too.
 */
#ifndef BOXLOSS_BOXLOSS_H_
#define BOXLOSS_BOXLOSS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BOXLOSS_BUILDING)
#    define BOXLOSS_API __declspec(dllexport)
#  else
#    define BOXLOSS_API __declspec(dllimport)
#  endif
#else
#  define BOXLOSS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bl_status {
  BL_OK = 0,
  BL_ERR_INVALID_ARGUMENT = 1, /* bad value, unknown key, NULL pointer */
  BL_ERR_OUT_OF_RANGE = 2,     /* index past the end of a sequence */
  BL_ERR_IO = 3,               /* file could not be written */
  BL_ERR_RUNTIME = 4           /* anything else */
} bl_status;

typedef enum bl_loss_kind {
  BL_LOSS_IOU = 0,
  BL_LOSS_GIOU = 1,
  BL_LOSS_DIOU = 2,
  BL_LOSS_CIOU = 3,
  BL_LOSS_SIOU = 4
} bl_loss_kind;

typedef enum bl_ch_interpretation {
  BL_CH_ENCLOSING = 0,
  BL_CH_CENTER_OFFSET = 1
} bl_ch_interpretation;

typedef struct bl_box {
  double cx, cy, w, h;
} bl_box;

typedef struct bl_loss_breakdown {
  double iou;
  double angle_cost;
  double distance_cost;
  double shape_cost;
  double total;
} bl_loss_breakdown;

typedef struct bl_grad4 {
  double d_cx, d_cy, d_w, d_h;
  int at_kink; /* nonzero when a subgradient convention was applied */
} bl_grad4;

typedef struct bl_siou_params {
  double theta; /* shape exponent in [2, 6] */
  bl_ch_interpretation ch;
} bl_siou_params;

typedef struct bl_adam_config {
  double lr0;
  double beta1;
  double beta2;
  double eps;
  int32_t step_size;
  double gamma;
  int32_t iterations;
  double tolerance; /* L1 error below which a fit counts as converged */
} bl_adam_config;

typedef struct bl_gradcheck_report {
  uint64_t samples;
  uint64_t kink_skipped;
  double max_rel_error;
  double mean_rel_error;
  bl_box worst_pred;
  bl_box worst_gt;
  bl_grad4 worst_analytic;
  bl_grad4 worst_numeric;
} bl_gradcheck_report;

typedef struct bl_trajectory bl_trajectory;
typedef struct bl_sim_config bl_sim_config;
typedef struct bl_error_series bl_error_series;
typedef struct bl_surface bl_surface;
typedef struct bl_ga_config bl_ga_config;
typedef struct bl_ga_result bl_ga_result;

/* ---- library ---------------------------------------------------------- */

BOXLOSS_API const char* bl_version(void);
BOXLOSS_API const char* bl_last_error(void);
BOXLOSS_API void bl_string_free(char* s);

BOXLOSS_API bl_status bl_loss_kind_parse(const char* name, bl_loss_kind* out);
/* "iou", "giou", "diou", "ciou", "siou"; NULL for an invalid value. */
BOXLOSS_API const char* bl_loss_kind_name(bl_loss_kind kind);
BOXLOSS_API bl_status bl_ch_interpretation_parse(const char* name,
                                                 bl_ch_interpretation* out);

BOXLOSS_API void bl_siou_params_default(bl_siou_params* out);
BOXLOSS_API void bl_adam_config_default(bl_adam_config* out);

/* ---- geometry ---------------------------------------------------------- */

BOXLOSS_API bl_status bl_intersection_area(const bl_box* a, const bl_box* b,
                                           double* out);
BOXLOSS_API bl_status bl_iou(const bl_box* a, const bl_box* b, double* out);
BOXLOSS_API bl_status bl_enclosing(const bl_box* a, const bl_box* b,
                                   double* cw, double* ch);

/* ---- losses ------------------------------------------------------------ */

/* params may be NULL for defaults (theta 4, enclosing). */
BOXLOSS_API bl_status bl_siou_loss(const bl_box* pred, const bl_box* gt,
                                   const bl_siou_params* params,
                                   bl_loss_breakdown* out);
BOXLOSS_API bl_status bl_loss(bl_loss_kind kind, const bl_box* pred,
                              const bl_box* gt, const bl_siou_params* params,
                              double* out);
BOXLOSS_API bl_status bl_grad(bl_loss_kind kind, const bl_box* pred,
                              const bl_box* gt, const bl_siou_params* params,
                              bl_grad4* out);
BOXLOSS_API bl_status bl_grad_fd(bl_loss_kind kind, const bl_box* pred,
                                 const bl_box* gt,
                                 const bl_siou_params* params, double step,
                                 bl_grad4* out);
BOXLOSS_API bl_status bl_gradcheck(bl_loss_kind kind,
                                   const bl_siou_params* params,
                                   uint64_t samples, uint64_t seed,
                                   double step, bl_gradcheck_report* out);

/* ---- single-pair regression ------------------------------------------- */

BOXLOSS_API bl_status bl_lr_at(const bl_adam_config* config, int32_t iteration,
                               double* out);
/* config may be NULL for defaults. */
BOXLOSS_API bl_status bl_fit(const bl_box* anchor, const bl_box* target,
                             bl_loss_kind kind, const bl_siou_params* params,
                             const bl_adam_config* config, bl_trajectory** out);
BOXLOSS_API void bl_trajectory_free(bl_trajectory* t);
/* Number of recorded states: iterations + 1. */
BOXLOSS_API size_t bl_trajectory_size(const bl_trajectory* t);
BOXLOSS_API bl_status bl_trajectory_at(const bl_trajectory* t, size_t index,
                                       bl_box* box, double* l1_error);
/* -1 when the fit never reached the tolerance. */
BOXLOSS_API int64_t bl_trajectory_converged_at(const bl_trajectory* t);
BOXLOSS_API bl_status bl_trajectory_flags(const bl_trajectory* t,
                                          uint64_t* rejected_steps,
                                          uint64_t* clamped_steps);
/* columns: iteration,cx,cy,w,h,l1_error */
BOXLOSS_API bl_status bl_trajectory_write_csv(const bl_trajectory* t,
                                              const char* path);

/* ---- simulation benchmark ---------------------------------------------- */

/* Starts from the full 5000-point, 7 x 7 x 7 configuration. */
BOXLOSS_API bl_status bl_sim_config_create(bl_sim_config** out);
BOXLOSS_API bl_status bl_sim_config_clone(const bl_sim_config* config,
                                          bl_sim_config** out);
BOXLOSS_API void bl_sim_config_free(bl_sim_config* config);
/* Keys: points, center ("x,y"), radius, scales, aspects, target_aspects
 * (comma lists, "1:4" ratios allowed), seed, loss, theta, ch_interpretation,
 * lr, beta1, beta2, eps, step_size, gamma, iters, tol. */
BOXLOSS_API bl_status bl_sim_config_set(bl_sim_config* config, const char* key,
                                        const char* value);
BOXLOSS_API bl_status bl_sim_config_validate(const bl_sim_config* config);
BOXLOSS_API bl_status bl_sim_config_case_count(const bl_sim_config* config,
                                               uint64_t* out);
BOXLOSS_API bl_status bl_sim_config_to_json(const bl_sim_config* config,
                                            char** out);

/* threads == 0 uses the machine's hardware concurrency. Results do not
 * depend on the thread count. */
BOXLOSS_API bl_status bl_sim_run(const bl_sim_config* config, uint32_t threads,
                                 bl_error_series** out);
BOXLOSS_API void bl_error_series_free(bl_error_series* s);
/* Number of E(i) entries: iterations + 1. */
BOXLOSS_API size_t bl_error_series_size(const bl_error_series* s);
BOXLOSS_API bl_status bl_error_series_total(const bl_error_series* s,
                                            size_t iteration, double* out);
BOXLOSS_API size_t bl_error_series_point_count(const bl_error_series* s);
BOXLOSS_API bl_status bl_error_series_point(const bl_error_series* s,
                                            size_t index, double* x, double* y,
                                            double* final_error);
BOXLOSS_API bl_status bl_error_series_counts(const bl_error_series* s,
                                             uint64_t* case_count,
                                             uint64_t* flagged_cases,
                                             uint64_t* rejected_steps,
                                             uint64_t* clamped_steps);
/* columns: iteration,E */
BOXLOSS_API bl_status bl_error_series_write_csv(const bl_error_series* s,
                                                const char* path);
/* columns: point_index,x,y,final_error */
BOXLOSS_API bl_status bl_error_series_write_points_csv(const bl_error_series* s,
                                                       const char* path);

/* ---- error surface ---------------------------------------------------- */

/* Bins per-point final errors over [c - radius, c + radius]^2. bins >= 2. */
BOXLOSS_API bl_status bl_surface_compute(const double* xs, const double* ys,
                                         const double* final_errors, size_t n,
                                         double center_x, double center_y,
                                         double radius, int32_t bins,
                                         bl_surface** out);
BOXLOSS_API bl_status bl_surface_from_series(const bl_error_series* s,
                                             const bl_sim_config* config,
                                             int32_t bins, bl_surface** out);
BOXLOSS_API void bl_surface_free(bl_surface* s);
BOXLOSS_API int32_t bl_surface_bins(const bl_surface* s);
/* mean is NaN for an empty cell (count 0). */
BOXLOSS_API bl_status bl_surface_cell(const bl_surface* s, int32_t ix,
                                      int32_t iy, double* x_center,
                                      double* y_center, double* mean,
                                      uint64_t* count);
/* columns: cell_x_center,cell_y_center,mean_error,count */
BOXLOSS_API bl_status bl_surface_write_csv(const bl_surface* s,
                                           const char* path);
/* provenance_json (may be NULL) is embedded under "provenance"; it must be
 * valid JSON. */
BOXLOSS_API bl_status bl_surface_write_json(const bl_surface* s,
                                            const char* path,
                                            const char* provenance_json);

/* ---- theta tuner ------------------------------------------------------ */

BOXLOSS_API bl_status bl_ga_config_create(bl_ga_config** out);
BOXLOSS_API void bl_ga_config_free(bl_ga_config* config);
/* Keys: population, generations, theta_min, theta_max, mutation_sigma,
 * crossover_rate, fitness_threshold, seed. */
BOXLOSS_API bl_status bl_ga_config_set(bl_ga_config* config, const char* key,
                                       const char* value);
BOXLOSS_API bl_status bl_ga_config_to_json(const bl_ga_config* config,
                                           char** out);

BOXLOSS_API bl_status bl_fitness(double theta, const bl_sim_config* sim,
                                 uint32_t threads, double* out);
BOXLOSS_API bl_status bl_tune_theta(const bl_ga_config* ga,
                                    const bl_sim_config* sim, uint32_t threads,
                                    bl_ga_result** out);
BOXLOSS_API void bl_ga_result_free(bl_ga_result* r);
BOXLOSS_API double bl_ga_result_best_theta(const bl_ga_result* r);
BOXLOSS_API double bl_ga_result_best_fitness(const bl_ga_result* r);
BOXLOSS_API size_t bl_ga_result_history_size(const bl_ga_result* r);
BOXLOSS_API bl_status bl_ga_result_history_at(const bl_ga_result* r,
                                              size_t generation, double* out);
/* best_theta, best_fitness, history, both seeds and both configs. */
BOXLOSS_API bl_status bl_ga_result_to_json(const bl_ga_result* r, char** out);
BOXLOSS_API bl_status bl_ga_result_write_json(const bl_ga_result* r,
                                              const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BOXLOSS_BOXLOSS_H_ */
