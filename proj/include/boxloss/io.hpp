// SPDX-License-Identifier: Apache-2.0
//
// File formats and key-value configuration.
//
// CSV files have a header row, comma separators, CRLF-free "\n" line ends and
// shortest round-trip number formatting, so re-running with the same inputs
// reproduces them byte for byte. Empty fields mark missing values.
#ifndef BOXLOSS_IO_HPP_
#define BOXLOSS_IO_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "boxloss/regression.hpp"
#include "boxloss/sim_bench.hpp"
#include "boxloss/tuner.hpp"

namespace boxloss {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Parses a decimal number or a ratio "a:b". Throws std::invalid_argument.
double parse_number(std::string_view text);
std::vector<double> parse_number_list(std::string_view text);

/// columns: iteration,E
void write_series_csv(std::ostream& out, const ErrorSeries& series);
/// columns: point_index,x,y,final_error
void write_points_csv(std::ostream& out, std::span<const Point> points,
                      std::span<const double> per_point_final);
/// columns: cell_x_center,cell_y_center,mean_error,count
void write_surface_csv(std::ostream& out, const ErrorSurface& surface);
/// columns: iteration,cx,cy,w,h,l1_error
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

nlohmann::json to_json(const AdamConfig& config);
nlohmann::json to_json(const SiouParams& params);
nlohmann::json to_json(const SimConfig& config);
nlohmann::json to_json(const GaConfig& config);
nlohmann::json to_json(const ErrorSurface& surface);
/// best_theta, best_fitness, history, evaluations, ga_seed, sim_seed,
/// ga_config, sim_config.
nlohmann::json to_json(const GaResult& result, const GaConfig& ga,
                       const SimConfig& sim);

/// Applies one "key = value" setting. Keys: points, center ("x,y"), radius,
/// scales, aspects, target_aspects (comma lists; "1:4" ratios allowed), seed,
/// loss, theta, ch_interpretation, lr, beta1, beta2, eps, step_size, gamma,
/// iters, tol. Throws std::invalid_argument on unknown keys or bad values.
void set_option(SimConfig& config, std::string_view key, std::string_view value);

/// Keys: population, generations, theta_min, theta_max, mutation_sigma,
/// crossover_rate, fitness_threshold, seed.
void set_option(GaConfig& config, std::string_view key, std::string_view value);

struct KeyValue {
  std::string key;
  std::string value;
};

/// Reads "key = value" lines. Blank lines and lines starting with '#' are
/// skipped. Throws std::invalid_argument on a line without '='.
std::vector<KeyValue> parse_key_values(std::istream& in);

}  // namespace boxloss

#endif  // BOXLOSS_IO_HPP_
