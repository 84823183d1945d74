// SPDX-License-Identifier: Apache-2.0
#include "boxloss/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

#include "boxloss/rng.hpp"

namespace boxloss {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_plain(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view text) {
  text = trim(text);
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not an unsigned integer: '" +
                                std::string(text) + "'");
  }
  return value;
}

std::vector<double> as_vector(std::span<const double> v) {
  return {v.begin(), v.end()};
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    const double num = parse_plain(text.substr(0, colon));
    const double den = parse_plain(text.substr(colon + 1));
    if (den == 0.0) throw std::invalid_argument("ratio with zero denominator");
    return num / den;
  }
  return parse_plain(text);
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void write_series_csv(std::ostream& out, const ErrorSeries& series) {
  out << "iteration,E\n";
  for (std::size_t i = 0; i < series.per_iteration_total.size(); ++i) {
    out << i << ',' << format_double(series.per_iteration_total[i]) << '\n';
  }
}

void write_points_csv(std::ostream& out, std::span<const Point> points,
                      std::span<const double> per_point_final) {
  if (points.size() != per_point_final.size()) {
    throw std::invalid_argument("one final error per point is required");
  }
  out << "point_index,x,y,final_error\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << i << ',' << format_double(points[i].x) << ','
        << format_double(points[i].y) << ','
        << format_double(per_point_final[i]) << '\n';
  }
}

void write_surface_csv(std::ostream& out, const ErrorSurface& s) {
  out << "cell_x_center,cell_y_center,mean_error,count\n";
  for (int iy = 0; iy < s.resolution; ++iy) {
    for (int ix = 0; ix < s.resolution; ++ix) {
      out << format_double(s.x_min + (ix + 0.5) * s.cell_width()) << ','
          << format_double(s.y_min + (iy + 0.5) * s.cell_height()) << ',';
      if (!s.empty(ix, iy)) out << format_double(s.mean(ix, iy));
      out << ',' << s.count[s.index(ix, iy)] << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  out << "iteration,cx,cy,w,h,l1_error\n";
  for (std::size_t i = 0; i < t.boxes.size(); ++i) {
    const auto& b = t.boxes[i];
    out << i << ',' << format_double(b.cx) << ',' << format_double(b.cy) << ','
        << format_double(b.w) << ',' << format_double(b.h) << ','
        << format_double(t.l1_errors[i]) << '\n';
  }
}

nlohmann::json to_json(const AdamConfig& c) {
  return {{"lr0", c.lr0},           {"beta1", c.beta1},
          {"beta2", c.beta2},       {"eps", c.eps},
          {"step_size", c.step_size}, {"gamma", c.gamma},
          {"iterations", c.iterations}, {"tolerance", c.tolerance}};
}

nlohmann::json to_json(const SiouParams& p) {
  return {{"theta", p.theta}, {"ch_interpretation", to_string(p.ch)}};
}

nlohmann::json to_json(const SimConfig& c) {
  return {{"num_points", c.num_points},
          {"center", {c.center.x, c.center.y}},
          {"radius", c.radius},
          {"scales", as_vector(c.scales)},
          {"aspects", as_vector(c.aspects)},
          {"target_aspects", as_vector(c.target_aspects)},
          {"seed", c.seed},
          {"rng", Rng::kName},
          {"loss", to_string(c.kind)},
          {"siou", to_json(c.siou)},
          {"adam", to_json(c.adam)},
          {"case_count", case_count(c)}};
}

nlohmann::json to_json(const GaConfig& c) {
  nlohmann::json j = {{"population", c.population},
                      {"generations", c.generations},
                      {"theta_bounds", {c.theta_min, c.theta_max}},
                      {"mutation_sigma", c.mutation_sigma},
                      {"crossover_rate", c.crossover_rate},
                      {"fitness_threshold", nullptr},
                      {"seed", c.seed},
                      {"rng", Rng::kName}};
  if (c.fitness_threshold) j["fitness_threshold"] = *c.fitness_threshold;
  return j;
}

nlohmann::json to_json(const ErrorSurface& s) {
  nlohmann::json cells = nlohmann::json::array();
  for (int iy = 0; iy < s.resolution; ++iy) {
    for (int ix = 0; ix < s.resolution; ++ix) {
      nlohmann::json cell = {
          {"ix", ix},
          {"iy", iy},
          {"cell_x_center", s.x_min + (ix + 0.5) * s.cell_width()},
          {"cell_y_center", s.y_min + (iy + 0.5) * s.cell_height()},
          {"count", s.count[s.index(ix, iy)]},
          {"mean_error", nullptr}};
      if (!s.empty(ix, iy)) cell["mean_error"] = s.mean(ix, iy);
      cells.push_back(std::move(cell));
    }
  }
  return {{"resolution", s.resolution},
          {"bounds", {{"x_min", s.x_min}, {"x_max", s.x_max},
                      {"y_min", s.y_min}, {"y_max", s.y_max}}},
          {"cells", std::move(cells)}};
}

nlohmann::json to_json(const GaResult& r, const GaConfig& ga,
                       const SimConfig& sim) {
  return {{"best_theta", r.best_theta},
          {"best_fitness", r.best_fitness},
          {"history", r.history},
          {"evaluations", r.evaluations},
          {"ga_seed", ga.seed},
          {"sim_seed", sim.seed},
          {"ga_config", to_json(ga)},
          {"sim_config", to_json(sim)}};
}

void set_option(SimConfig& c, std::string_view key, std::string_view value) {
  if (key == "points") {
    c.num_points = parse_int(value);
  } else if (key == "center") {
    const auto xy = parse_number_list(value);
    if (xy.size() != 2) throw std::invalid_argument("center takes x,y");
    c.center = {xy[0], xy[1]};
  } else if (key == "radius") {
    c.radius = parse_number(value);
  } else if (key == "scales") {
    c.scales = parse_number_list(value);
  } else if (key == "aspects") {
    c.aspects = parse_number_list(value);
  } else if (key == "target_aspects") {
    c.target_aspects = parse_number_list(value);
  } else if (key == "seed") {
    c.seed = parse_u64(value);
  } else if (key == "loss") {
    const auto kind = parse_loss_kind(trim(value));
    if (!kind) throw std::invalid_argument("unknown loss '" + std::string(value) + "'");
    c.kind = *kind;
  } else if (key == "theta") {
    c.siou.theta = parse_number(value);
  } else if (key == "ch_interpretation") {
    const auto ch = parse_ch_interpretation(trim(value));
    if (!ch) {
      throw std::invalid_argument("ch_interpretation must be enclosing or center-offset");
    }
    c.siou.ch = *ch;
  } else if (key == "lr") {
    c.adam.lr0 = parse_number(value);
  } else if (key == "beta1") {
    c.adam.beta1 = parse_number(value);
  } else if (key == "beta2") {
    c.adam.beta2 = parse_number(value);
  } else if (key == "eps") {
    c.adam.eps = parse_number(value);
  } else if (key == "step_size") {
    c.adam.step_size = parse_int(value);
  } else if (key == "gamma") {
    c.adam.gamma = parse_number(value);
  } else if (key == "iters") {
    c.adam.iterations = parse_int(value);
  } else if (key == "tol") {
    c.adam.tolerance = parse_number(value);
  } else {
    throw std::invalid_argument("unknown simulation option '" +
                                std::string(key) + "'");
  }
}

void set_option(GaConfig& c, std::string_view key, std::string_view value) {
  if (key == "population") {
    c.population = parse_int(value);
  } else if (key == "generations") {
    c.generations = parse_int(value);
  } else if (key == "theta_min") {
    c.theta_min = parse_number(value);
  } else if (key == "theta_max") {
    c.theta_max = parse_number(value);
  } else if (key == "mutation_sigma") {
    c.mutation_sigma = parse_number(value);
  } else if (key == "crossover_rate") {
    c.crossover_rate = parse_number(value);
  } else if (key == "fitness_threshold") {
    c.fitness_threshold = parse_number(value);
  } else if (key == "seed") {
    c.seed = parse_u64(value);
  } else {
    throw std::invalid_argument("unknown GA option '" + std::string(key) + "'");
  }
}

std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(number) +
                                  ": expected key = value");
    }
    out.push_back({std::string(trim(text.substr(0, eq))),
                   std::string(trim(text.substr(eq + 1)))});
  }
  return out;
}

}  // namespace boxloss
