// SPDX-License-Identifier: Apache-2.0
//
// boxloss command-line tool. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 compute or check failure, 2 usage error.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "boxloss/boxloss.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr double kGradTolerance = 1e-6;

struct ExitError {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& message) {
  throw ExitError{kExitUsage, message};
}

// Configuration problems are usage errors; everything else is a failure.
void check(bl_status status, const std::string& context) {
  if (status == BL_OK) return;
  const int code = status == BL_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
  throw ExitError{code, context + ": " + bl_last_error()};
}

template <typename T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};

using SimConfigPtr =
    std::unique_ptr<bl_sim_config, HandleDeleter<bl_sim_config, bl_sim_config_free>>;
using SeriesPtr = std::unique_ptr<bl_error_series,
                                  HandleDeleter<bl_error_series, bl_error_series_free>>;
using TrajectoryPtr =
    std::unique_ptr<bl_trajectory, HandleDeleter<bl_trajectory, bl_trajectory_free>>;
using SurfacePtr =
    std::unique_ptr<bl_surface, HandleDeleter<bl_surface, bl_surface_free>>;
using GaConfigPtr =
    std::unique_ptr<bl_ga_config, HandleDeleter<bl_ga_config, bl_ga_config_free>>;
using GaResultPtr =
    std::unique_ptr<bl_ga_result, HandleDeleter<bl_ga_result, bl_ga_result_free>>;

std::string take_string(char* s) {
  std::string out(s);
  bl_string_free(s);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bl_box parse_box(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double x = 0.0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), x);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size() || item.empty()) {
      usage_error(what + ": '" + text + "' is not cx,cy,w,h");
    }
    v.push_back(x);
  }
  if (v.size() != 4) usage_error(what + ": expected 4 comma-separated numbers");
  const bl_box b{v[0], v[1], v[2], v[3]};
  for (double x : v) {
    if (!std::isfinite(x)) usage_error(what + ": values must be finite");
  }
  if (!(b.w > 0.0 && b.h > 0.0)) usage_error(what + ": w and h must be positive");
  return b;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ExitError{kExitFailure, "cannot create '" + dir.string() + "': " + ec.message()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw ExitError{kExitFailure, "cannot write '" + path.string() + "'"};
}

// Options shared by every command.
struct Common {
  std::string out;
  std::optional<unsigned> threads;
  std::vector<std::string> argv;
  std::string started;

  unsigned resolved_threads() const {
    if (threads) return *threads;
    if (const char* env = std::getenv("BOXLOSS_THREADS")) {
      unsigned v = 0;
      const std::string s(env);
      const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        usage_error("BOXLOSS_THREADS must be a non-negative integer");
      }
      return v;
    }
    return 0;
  }
};

json manifest_base(const Common& c, const std::string& command) {
  return {{"tool", "boxloss"},
          {"version", bl_version()},
          {"command", command},
          {"argv", c.argv},
          {"threads", c.resolved_threads()},
          {"started_at", c.started}};
}

void finish_manifest(json& m, const fs::path& dir, std::vector<std::string> outputs) {
  m["finished_at"] = utc_now();
  outputs.push_back((dir / "manifest.json").string());
  m["outputs"] = outputs;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

// Simulation options that map one-to-one onto library config keys.
struct SimFlags {
  std::string config_file;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::vector<std::shared_ptr<std::string>> holders;

  void add(CLI::App& app, const std::string& flag, const std::string& key,
           const std::string& help) {
    auto holder = std::make_shared<std::string>();
    auto* opt = app.add_option(flag, *holder, help);
    holders.push_back(holder);
    options.emplace_back(key, opt);
  }

  // defaults < config file < flags
  SimConfigPtr build() const {
    bl_sim_config* raw = nullptr;
    check(bl_sim_config_create(&raw), "sim config");
    SimConfigPtr cfg(raw);
    if (!config_file.empty()) {
      for (const auto& [key, value] : read_config_file(config_file)) {
        if (key.rfind("ga.", 0) == 0) continue;
        check(bl_sim_config_set(cfg.get(), key.c_str(), value.c_str()),
              config_file + ": " + key);
      }
    }
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i].second->count() > 0) {
        check(bl_sim_config_set(cfg.get(), options[i].first.c_str(),
                                holders[i]->c_str()),
              "--" + options[i].second->get_single_name());
      }
    }
    return cfg;
  }

  static std::vector<std::pair<std::string, std::string>> read_config_file(
      const std::string& path) {
    std::ifstream in(path);
    if (!in) usage_error("cannot read config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int number = 0;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
      ++number;
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        usage_error(path + ":" + std::to_string(number) + ": expected key = value");
      }
      out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
  }
};

json config_json(const bl_sim_config* cfg) {
  char* text = nullptr;
  check(bl_sim_config_to_json(cfg, &text), "config json");
  return json::parse(take_string(text));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> losses;
  SimFlags sim;
};

int run_bench(const Common& common, const BenchArgs& args) {
  std::vector<std::string> losses = args.losses;
  if (losses.empty()) losses.push_back("siou");
  for (const auto& l : losses) {
    bl_loss_kind k;
    check(bl_loss_kind_parse(l.c_str(), &k), "--loss");
  }
  auto base = args.sim.build();
  check(bl_sim_config_validate(base.get()), "configuration");
  uint64_t cases = 0;
  check(bl_sim_config_case_count(base.get(), &cases), "case count");

  const fs::path dir = common.out;
  ensure_dir(dir);
  json manifest = manifest_base(common, "bench");
  std::vector<std::string> outputs;
  std::vector<SeriesPtr> all;
  json results = json::object();

  for (const auto& l : losses) {
    bl_sim_config* raw = nullptr;
    check(bl_sim_config_clone(base.get(), &raw), "clone");
    SimConfigPtr cfg(raw);
    check(bl_sim_config_set(cfg.get(), "loss", l.c_str()), "--loss");
    bl_error_series* series_raw = nullptr;
    check(bl_sim_run(cfg.get(), common.resolved_threads(), &series_raw), "bench " + l);
    SeriesPtr series(series_raw);

    const auto series_path = (dir / ("series_" + l + ".csv")).string();
    const auto points_path = (dir / ("points_" + l + ".csv")).string();
    check(bl_error_series_write_csv(series.get(), series_path.c_str()), series_path);
    check(bl_error_series_write_points_csv(series.get(), points_path.c_str()), points_path);
    outputs.push_back(series_path);
    outputs.push_back(points_path);

    uint64_t case_count = 0, flagged = 0, rejected = 0, clamped = 0;
    check(bl_error_series_counts(series.get(), &case_count, &flagged, &rejected, &clamped),
          "counts");
    double first = 0.0, last = 0.0, max_point = 0.0;
    const size_t n = bl_error_series_size(series.get());
    check(bl_error_series_total(series.get(), 0, &first), "E(0)");
    check(bl_error_series_total(series.get(), n - 1, &last), "E(last)");
    for (size_t p = 0; p < bl_error_series_point_count(series.get()); ++p) {
      double e = 0.0;
      check(bl_error_series_point(series.get(), p, nullptr, nullptr, &e), "point");
      max_point = std::max(max_point, e);
    }
    results[l] = {{"initial_E", first},       {"final_E", last},
                  {"max_point_final", max_point}, {"case_count", case_count},
                  {"flagged_cases", flagged}, {"rejected_steps", rejected},
                  {"clamped_steps", clamped}};
    std::cout << l << ": cases=" << case_count << " E(0)=" << format_double(first)
              << " E(final)=" << format_double(last)
              << " max_point_final=" << format_double(max_point)
              << " flagged=" << flagged << "\n";
    all.push_back(std::move(series));
  }

  const auto cmp_path = (dir / "comparison.csv").string();
  std::ostringstream cmp;
  cmp << "iteration";
  for (const auto& l : losses) cmp << ',' << l;
  cmp << '\n';
  const size_t n = bl_error_series_size(all.front().get());
  for (size_t i = 0; i < n; ++i) {
    cmp << i;
    for (const auto& s : all) {
      double e = 0.0;
      check(bl_error_series_total(s.get(), i, &e), "E(i)");
      cmp << ',' << format_double(e);
    }
    cmp << '\n';
  }
  write_text(cmp_path, cmp.str());
  outputs.push_back(cmp_path);

  json cfg = config_json(base.get());
  cfg.erase("loss");
  manifest["config"] = cfg;
  manifest["losses"] = losses;
  manifest["seeds"] = {{"sim", cfg["seed"]}};
  manifest["case_count"] = cases;
  manifest["results"] = results;
  finish_manifest(manifest, dir, outputs);
  return 0;
}

// ---- converge --------------------------------------------------------------

struct ConvergeArgs {
  std::string anchor, target, loss = "siou";
  SimFlags sim;  // theta, ch, Adam settings
};

int run_converge(const Common& common, const ConvergeArgs& args) {
  const bl_box anchor = parse_box(args.anchor, "--anchor");
  const bl_box target = parse_box(args.target, "--target");
  bl_loss_kind kind;
  check(bl_loss_kind_parse(args.loss.c_str(), &kind), "--loss");

  auto cfg = args.sim.build();
  check(bl_sim_config_set(cfg.get(), "loss", args.loss.c_str()), "--loss");
  const json cj = config_json(cfg.get());
  bl_adam_config adam;
  bl_adam_config_default(&adam);
  adam.lr0 = cj["adam"]["lr0"];
  adam.beta1 = cj["adam"]["beta1"];
  adam.beta2 = cj["adam"]["beta2"];
  adam.eps = cj["adam"]["eps"];
  adam.step_size = cj["adam"]["step_size"];
  adam.gamma = cj["adam"]["gamma"];
  adam.iterations = cj["adam"]["iterations"];
  adam.tolerance = cj["adam"]["tolerance"];
  bl_siou_params params;
  bl_siou_params_default(&params);
  params.theta = cj["siou"]["theta"];
  check(bl_ch_interpretation_parse(
            cj["siou"]["ch_interpretation"].get<std::string>().c_str(), &params.ch),
        "ch interpretation");

  bl_trajectory* raw = nullptr;
  check(bl_fit(&anchor, &target, kind, &params, &adam, &raw), "fit");
  TrajectoryPtr traj(raw);

  const fs::path dir = common.out;
  ensure_dir(dir);
  const auto path = (dir / "trajectory.csv").string();
  check(bl_trajectory_write_csv(traj.get(), path.c_str()), path);

  const int64_t conv = bl_trajectory_converged_at(traj.get());
  uint64_t rejected = 0, clamped = 0;
  check(bl_trajectory_flags(traj.get(), &rejected, &clamped), "flags");
  double final_err = 0.0;
  check(bl_trajectory_at(traj.get(), bl_trajectory_size(traj.get()) - 1, nullptr, &final_err),
        "final");

  json manifest = manifest_base(common, "converge");
  manifest["config"] = {{"anchor", {anchor.cx, anchor.cy, anchor.w, anchor.h}},
                        {"target", {target.cx, target.cy, target.w, target.h}},
                        {"loss", args.loss},
                        {"siou", cj["siou"]},
                        {"adam", cj["adam"]}};
  manifest["seeds"] = json::object();
  manifest["converged_at"] = conv >= 0 ? json(conv) : json(nullptr);
  manifest["final_l1_error"] = final_err;
  manifest["rejected_steps"] = rejected;
  manifest["clamped_steps"] = clamped;
  finish_manifest(manifest, dir, {path});

  std::cout << args.loss << ": converged_at="
            << (conv >= 0 ? std::to_string(conv) : std::string("none"))
            << " final_l1=" << format_double(final_err) << "\n";
  return 0;
}

// ---- surface ---------------------------------------------------------------

struct SurfaceArgs {
  std::string in;
  int bins = 20;
};

int run_surface(Common common, const SurfaceArgs& args) {
  if (args.bins < 2) usage_error("--bins must be >= 2");
  const fs::path in = args.in;
  if (!fs::is_directory(in)) usage_error("input directory '" + args.in + "' does not exist");
  std::ifstream mf(in / "manifest.json");
  if (!mf) usage_error("'" + args.in + "' has no manifest.json");
  json bench = json::parse(mf, nullptr, false);
  if (bench.is_discarded() || bench.value("command", "") != "bench") {
    usage_error("'" + args.in + "' is not a bench output directory");
  }
  const double cx = bench["config"]["center"][0];
  const double cy = bench["config"]["center"][1];
  const double radius = bench["config"]["radius"];

  const fs::path dir = common.out.empty() ? in / "surface" : fs::path(common.out);
  ensure_dir(dir);
  std::vector<std::string> outputs;
  for (const auto& loss : bench["losses"]) {
    const std::string l = loss.get<std::string>();
    std::ifstream pf(in / ("points_" + l + ".csv"));
    if (!pf) usage_error("missing points_" + l + ".csv in '" + args.in + "'");
    std::vector<double> xs, ys, es;
    std::string line;
    std::getline(pf, line);  // header
    while (std::getline(pf, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != 4) throw ExitError{kExitFailure, "malformed points row: " + line};
      xs.push_back(std::stod(f[1]));
      ys.push_back(std::stod(f[2]));
      es.push_back(std::stod(f[3]));
    }
    bl_surface* raw = nullptr;
    check(bl_surface_compute(xs.data(), ys.data(), es.data(), xs.size(), cx, cy,
                             radius, args.bins, &raw),
          "surface " + l);
    SurfacePtr surf(raw);
    const auto csv = (dir / ("surface_" + l + ".csv")).string();
    const auto js = (dir / ("surface_" + l + ".json")).string();
    check(bl_surface_write_csv(surf.get(), csv.c_str()), csv);
    json prov = {{"loss", l},
                 {"config", bench["config"]},
                 {"seeds", bench["seeds"]},
                 {"source", (in / ("points_" + l + ".csv")).string()}};
    check(bl_surface_write_json(surf.get(), js.c_str(), prov.dump().c_str()), js);
    outputs.push_back(csv);
    outputs.push_back(js);
    std::cout << l << ": " << args.bins << "x" << args.bins << " surface from "
              << xs.size() << " points\n";
  }
  json manifest = manifest_base(common, "surface");
  manifest["config"] = {{"input", args.in}, {"bins", args.bins}};
  manifest["seeds"] = bench["seeds"];
  finish_manifest(manifest, dir, outputs);
  return 0;
}

// ---- gradcheck -------------------------------------------------------------

struct GradcheckArgs {
  std::vector<std::string> losses;
  uint64_t samples = 1000;
  uint64_t seed = 1;
  double h = 1e-6;
  double theta = 4.0;
};

int run_gradcheck(const Common& common, const GradcheckArgs& args) {
  std::vector<std::string> losses = args.losses;
  if (losses.empty()) losses = {"iou", "giou", "diou", "ciou", "siou"};
  bl_siou_params params;
  bl_siou_params_default(&params);
  params.theta = args.theta;

  json report = json::object();
  bool ok = true;
  for (const auto& l : losses) {
    bl_loss_kind kind;
    check(bl_loss_kind_parse(l.c_str(), &kind), "--loss");
    bl_gradcheck_report r{};
    check(bl_gradcheck(kind, &params, args.samples, args.seed, args.h, &r), "gradcheck " + l);
    const bool pass = r.max_rel_error <= kGradTolerance;
    ok = ok && pass;
    report[l] = {{"samples", r.samples},
                 {"kink_skipped", r.kink_skipped},
                 {"max_rel_error", r.max_rel_error},
                 {"mean_rel_error", r.mean_rel_error},
                 {"passed", pass},
                 {"worst_pred", {r.worst_pred.cx, r.worst_pred.cy, r.worst_pred.w, r.worst_pred.h}},
                 {"worst_gt", {r.worst_gt.cx, r.worst_gt.cy, r.worst_gt.w, r.worst_gt.h}}};
    std::cout << l << ": samples=" << r.samples << " kink_skipped=" << r.kink_skipped
              << " max_rel_error=" << format_double(r.max_rel_error)
              << " mean_rel_error=" << format_double(r.mean_rel_error)
              << (pass ? " PASS" : " FAIL") << "\n";
    if (!pass) {
      const auto& p = r.worst_pred;
      const auto& g = r.worst_gt;
      std::cerr << l << ": worst pair pred=(" << format_double(p.cx) << ','
                << format_double(p.cy) << ',' << format_double(p.w) << ','
                << format_double(p.h) << ") gt=(" << format_double(g.cx) << ','
                << format_double(g.cy) << ',' << format_double(g.w) << ','
                << format_double(g.h) << ")\n";
    }
  }

  const fs::path dir = common.out;
  ensure_dir(dir);
  const auto path = (dir / "gradcheck.json").string();
  write_text(path, json{{"tolerance", kGradTolerance}, {"losses", report}}.dump(2) + "\n");
  json manifest = manifest_base(common, "gradcheck");
  manifest["config"] = {{"losses", losses}, {"samples", args.samples},
                        {"h", args.h}, {"theta", args.theta}};
  manifest["seeds"] = {{"gradcheck", args.seed}};
  manifest["passed"] = ok;
  finish_manifest(manifest, dir, {path});
  return ok ? 0 : kExitFailure;
}

// ---- tune ------------------------------------------------------------------

struct TuneArgs {
  SimFlags sim;
  std::vector<std::pair<std::string, CLI::Option*>> ga_options;
  std::vector<std::shared_ptr<std::string>> ga_holders;

  void add_ga(CLI::App& app, const std::string& flag, const std::string& key,
              const std::string& help) {
    auto holder = std::make_shared<std::string>();
    ga_options.emplace_back(key, app.add_option(flag, *holder, help));
    ga_holders.push_back(holder);
  }
};

int run_tune(const Common& common, const TuneArgs& args) {
  auto sim = args.sim.build();
  // Tuning runs at reduced scale unless the user asked otherwise.
  bool points_given = false;
  for (const auto& [key, opt] : args.sim.options) {
    if (key == "points" && opt->count() > 0) points_given = true;
  }
  if (!args.sim.config_file.empty()) {
    for (const auto& [key, value] : SimFlags::read_config_file(args.sim.config_file)) {
      if (key == "points") points_given = true;
    }
  }
  if (!points_given) check(bl_sim_config_set(sim.get(), "points", "100"), "points");
  check(bl_sim_config_set(sim.get(), "loss", "siou"), "loss");
  check(bl_sim_config_validate(sim.get()), "configuration");

  bl_ga_config* raw = nullptr;
  check(bl_ga_config_create(&raw), "ga config");
  GaConfigPtr ga(raw);
  if (!args.sim.config_file.empty()) {
    for (const auto& [key, value] : SimFlags::read_config_file(args.sim.config_file)) {
      if (key.rfind("ga.", 0) == 0) {
        check(bl_ga_config_set(ga.get(), key.substr(3).c_str(), value.c_str()),
              args.sim.config_file + ": " + key);
      }
    }
  }
  for (std::size_t i = 0; i < args.ga_options.size(); ++i) {
    if (args.ga_options[i].second->count() > 0) {
      check(bl_ga_config_set(ga.get(), args.ga_options[i].first.c_str(),
                             args.ga_holders[i]->c_str()),
            "--" + args.ga_options[i].second->get_single_name());
    }
  }

  bl_ga_result* result_raw = nullptr;
  check(bl_tune_theta(ga.get(), sim.get(), common.resolved_threads(), &result_raw), "tune");
  GaResultPtr result(result_raw);

  const fs::path dir = common.out;
  ensure_dir(dir);
  const auto path = (dir / "ga_result.json").string();
  check(bl_ga_result_write_json(result.get(), path.c_str()), path);

  char* ga_text = nullptr;
  check(bl_ga_config_to_json(ga.get(), &ga_text), "ga json");
  const json ga_json = json::parse(take_string(ga_text));
  const json sim_json = config_json(sim.get());
  json manifest = manifest_base(common, "tune");
  manifest["config"] = {{"ga", ga_json}, {"sim", sim_json}};
  manifest["seeds"] = {{"ga", ga_json["seed"]}, {"sim", sim_json["seed"]}};
  manifest["best_theta"] = bl_ga_result_best_theta(result.get());
  manifest["best_fitness"] = bl_ga_result_best_fitness(result.get());
  finish_manifest(manifest, dir, {path});

  std::cout << "best_theta=" << format_double(bl_ga_result_best_theta(result.get()))
            << " best_fitness=" << format_double(bl_ga_result_best_fitness(result.get()))
            << " generations=" << bl_ga_result_history_size(result.get()) << "\n";
  return 0;
}

void add_common(CLI::App& sub, Common& common, const std::string& default_out) {
  const std::string help =
      "Output directory (default: " + (default_out.empty() ? "<in>/surface" : default_out) + ")";
  sub.add_option("--out", common.out, help);
  sub.callback([&common, default_out] {
    if (common.out.empty()) common.out = default_out;
  });
  sub.add_option("--threads", common.threads,
                 "Worker threads (default: $BOXLOSS_THREADS, else all cores)");
}

void add_adam_flags(CLI::App& sub, SimFlags& sim) {
  sim.add(sub, "--iters", "iters", "Adam iterations per fit");
  sim.add(sub, "--tol", "tol", "Convergence tolerance on the L1 error");
  sim.add(sub, "--lr", "lr", "Initial learning rate");
  sim.add(sub, "--step-size", "step_size", "Iterations between learning-rate decays");
  sim.add(sub, "--gamma", "gamma", "Learning-rate decay factor");
  sim.add(sub, "--theta", "theta", "SIoU shape exponent in [2, 6]");
  sim.add(sub, "--ch-interpretation", "ch_interpretation",
          "Vertical distance normalizer: enclosing | center-offset");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boxloss: IoU-family box regression losses and simulation benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bl_version()));

  Common common;
  common.argv.assign(argv, argv + argc);
  common.started = utc_now();

  auto* bench = app.add_subcommand("bench", "Run the simulation benchmark");
  BenchArgs bench_args;
  add_common(*bench, common, "boxloss_bench");
  bench->add_option("--loss", bench_args.losses, "Loss kind (repeatable): iou giou diou ciou siou");
  bench->add_option("--config", bench_args.sim.config_file, "key = value config file");
  bench_args.sim.add(*bench, "--points", "points", "Anchor points in the disk");
  bench_args.sim.add(*bench, "--seed", "seed", "Point-sampling seed");
  bench_args.sim.add(*bench, "--radius", "radius", "Disk radius");
  add_adam_flags(*bench, bench_args.sim);

  auto* converge = app.add_subcommand("converge", "Fit one anchor to one target");
  ConvergeArgs conv_args;
  add_common(*converge, common, "boxloss_converge");
  converge->add_option("--anchor", conv_args.anchor, "cx,cy,w,h")->required();
  converge->add_option("--target", conv_args.target, "cx,cy,w,h")->required();
  converge->add_option("--loss", conv_args.loss, "Loss kind")->capture_default_str();
  converge->add_option("--config", conv_args.sim.config_file, "key = value config file");
  add_adam_flags(*converge, conv_args.sim);

  auto* surface = app.add_subcommand("surface", "Bin a bench run's per-point errors");
  SurfaceArgs surf_args;
  add_common(*surface, common, "");
  surface->add_option("--in", surf_args.in, "bench output directory")->required();
  surface->add_option("--bins", surf_args.bins, "Cells per axis (>= 2)")->capture_default_str();

  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
  GradcheckArgs gc_args;
  add_common(*gradcheck, common, "boxloss_gradcheck");
  gradcheck->add_option("--loss", gc_args.losses, "Loss kind (repeatable; default all)");
  gradcheck->add_option("--samples", gc_args.samples, "Box pairs")->capture_default_str();
  gradcheck->add_option("--seed", gc_args.seed, "Sampling seed")->capture_default_str();
  gradcheck->add_option("--step", gc_args.h, "Central-difference step")->capture_default_str();
  gradcheck->add_option("--theta", gc_args.theta, "SIoU shape exponent")->capture_default_str();

  auto* tune = app.add_subcommand("tune", "Genetic-algorithm search for theta");
  TuneArgs tune_args;
  add_common(*tune, common, "boxloss_tune");
  tune->add_option("--config", tune_args.sim.config_file,
                   "key = value config file (GA keys prefixed with 'ga.')");
  tune_args.sim.add(*tune, "--points", "points", "Anchor points (default 100)");
  tune_args.sim.add(*tune, "--seed", "seed", "Simulation seed");
  tune_args.sim.add(*tune, "--iters", "iters", "Adam iterations per fit");
  tune_args.add_ga(*tune, "--population", "population", "Population size");
  tune_args.add_ga(*tune, "--generations", "generations", "Generations");
  tune_args.add_ga(*tune, "--sigma", "mutation_sigma", "Gaussian mutation sigma");
  tune_args.add_ga(*tune, "--crossover", "crossover_rate", "Crossover probability");
  tune_args.add_ga(*tune, "--threshold", "fitness_threshold", "Stop once best fitness is below");
  tune_args.add_ga(*tune, "--ga-seed", "seed", "GA seed");
  tune_args.add_ga(*tune, "--theta-min", "theta_min", "Lower theta bound");
  tune_args.add_ga(*tune, "--theta-max", "theta_max", "Upper theta bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*bench) return run_bench(common, bench_args);
    if (*converge) return run_converge(common, conv_args);
    if (*surface) return run_surface(common, surf_args);
    if (*gradcheck) return run_gradcheck(common, gc_args);
    if (*tune) return run_tune(common, tune_args);
  } catch (const ExitError& e) {
    std::cerr << "boxloss: " << e.message << "\n";
    if (e.code == kExitUsage) {
      std::cerr << "run 'boxloss " << app.get_subcommands().front()->get_name()
                << " --help' for usage\n";
    }
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "boxloss: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
