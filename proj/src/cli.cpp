#include "moplan/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "moplan/bench.hpp"
#include "moplan/cluster.hpp"
#include "moplan/errors.hpp"
#include "moplan/keyvalue.hpp"
#include "moplan/mission.hpp"
#include "moplan/render.hpp"
#include "moplan/sweep.hpp"
#include "moplan/synth.hpp"

namespace moplan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct MapArgs {
  std::string dem, rock, science, banned, cost_config;
};

struct CommonArgs {
  MapArgs maps;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* sub, CommonArgs& c) {
  sub->add_option("--map-dem", c.maps.dem, "Elevation grid (ESRI ASCII)");
  sub->add_option("--map-rock", c.maps.rock, "Rock abundance grid");
  sub->add_option("--map-science", c.maps.science, "Scientific interest grid");
  sub->add_option("--map-banned", c.maps.banned, "User banned-area mask (0/1)");
  sub->add_option("--cost-config", c.maps.cost_config, "Robot cost model key=value file");
  c.out_opt = sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--workers", c.workers, "Worker threads (0 = all cores; PLANNER_THREADS overrides)");
}

std::size_t resolve_workers(std::size_t flag) {
  if (const char* env = std::getenv("PLANNER_THREADS"); env != nullptr && *env != '\0') {
    const std::string_view text(env);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
      throw ConfigError(fmt::format("PLANNER_THREADS='{}' is not a positive integer", text));
    }
    return value;
  }
  if (flag == 0) return std::max(1u, std::thread::hardware_concurrency());
  return flag;
}

void require_files(std::initializer_list<std::string_view> paths) {
  for (auto p : paths) {
    if (p.empty()) continue;
    std::error_code ec;
    if (!fs::is_regular_file(fs::path(p), ec)) throw IoError(fmt::format("input file '{}' not found", p));
  }
}

void require_map_files(const MapArgs& m) {
  if (m.dem.empty()) throw ConfigError("--map-dem is required");
  require_files({m.dem, m.rock, m.science, m.banned, m.cost_config});
}

CostConfig load_config(const std::string& path) { return path.empty() ? CostConfig{} : load_cost_config(path); }

MapStack load_stack(const MapArgs& m, const CostConfig& config) {
  std::vector<MapLayer> layers;
  layers.push_back(load_layer(m.dem, LayerKind::elevation));
  if (!m.rock.empty()) layers.push_back(load_layer(m.rock, LayerKind::rock_abundance));
  if (!m.science.empty()) layers.push_back(load_layer(m.science, LayerKind::scientific_interest));
  if (!m.banned.empty()) layers.push_back(load_layer(m.banned, LayerKind::banned));
  return assemble_stack(std::move(layers), config.thresholds());
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
  return fs::path(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot write '{}'", path.string()));
  f << text;
  if (!f) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

Cell parse_cell(const std::string& text, std::string_view flag) {
  const auto v = parse_double_list(text);
  if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
    throw ConfigError(fmt::format("{} '{}' must be 'row,col'", flag, text));
  }
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

CostWeights parse_weights(const std::string& text) {
  const auto v = parse_double_list(text);
  if (v.size() != 3) throw ConfigError(fmt::format("--weights '{}' needs three values", text));
  return CostWeights::checked(v[0], v[1], v[2]);
}

json number_or_label(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

json cell_json(Cell c) { return json::array({c.row, c.col}); }

json weights_json(const CostWeights& w) { return json::array({w.alpha1, w.alpha2, w.alpha3}); }

json metrics_json(const PathMetrics& m) {
  return {{"length_m", m.length_m},
          {"energy_rel", number_or_label(m.energy_rel)},
          {"risk_total", number_or_label(m.risk_total)},
          {"science_total", number_or_label(m.science_total)},
          {"cost_E", m.component_costs.energy},
          {"cost_R", m.component_costs.risk},
          {"cost_I", m.component_costs.science}};
}

json norms_json(const NormalizationConstants& n) {
  return {{"e_star_max", n.e_star_max},       {"e_star_min", n.e_star_min},
          {"r_star_max", n.r_star_max},       {"r_star_min", n.r_star_min},
          {"energy_min_edge", n.energy_min_edge}, {"risk_min_edge", n.risk_min_edge},
          {"h_min_per_meter", n.h_min_per_meter},
          {"domain",
           {{"slope_limit", n.domain.slope_limit},
            {"rock_lo", n.domain.rock_lo},
            {"rock_hi", n.domain.rock_hi},
            {"cell_size", n.domain.cell_size}}}};
}

json path_json(const RawPath& p) {
  json cells = json::array();
  for (const auto& c : p.cells) cells.push_back(cell_json(c));
  json edges = json::array();
  for (const auto& e : p.edges) {
    edges.push_back({{"energy", e.energy},
                     {"risk", e.risk},
                     {"science", e.science},
                     {"weighted_total", e.weighted_total},
                     {"length_m", e.length_m},
                     {"slope_deg", e.slope_deg}});
  }
  return {{"cells", cells},
          {"path_rle", encode_path_rle(p.cells)},
          {"edges", edges},
          {"node_science", p.node_science},
          {"total_cost", p.total_cost}};
}

// File names only, so outputs do not depend on where the inputs live; map_id pins the content.
json map_args_json(const MapArgs& m) {
  const auto name = [](const std::string& p) { return fs::path(p).filename().string(); };
  return {{"dem", name(m.dem)}, {"rock", name(m.rock)}, {"science", name(m.science)}, {"banned", name(m.banned)},
          {"cost_config", name(m.cost_config)}};
}

json config_json(const CostConfig& c) {
  return {{"energy_coeffs", c.energy.p}, {"crash_coeffs", c.crash.p}, {"d_sim", c.d_sim},
          {"velocity", c.velocity},       {"max_slope", c.max_slope_deg}, {"max_rock", c.max_rock}};
}

std::string render_plan_table(const CostWeights& w, const PathMetrics& m, double total) {
  std::string out;
  const auto row = [&](std::string_view name, const std::string& value) {
    out += fmt::format("{:<22}{}\n", name, value);
  };
  row("Weights (a1,a2,a3)", fmt::format("{}, {}, {}", w.alpha1, w.alpha2, w.alpha3));
  row("Energy cost", fmt::format("{}", m.component_costs.energy));
  row("Risk cost", fmt::format("{}", m.component_costs.risk));
  row("Scientific cost", fmt::format("{}", m.component_costs.science));
  row("Total", fmt::format("{}", total));
  row("Path length [m]", fmt::format("{:.1f}", m.length_m));
  row("Energy [rel]", fmt::format("{:.6g}", m.energy_rel));
  row("Risk [%]", fmt::format("{:.4f}", m.risk_total * 100.0));
  row("Science [%]", fmt::format("{:.4f}", m.science_total * 100.0));
  return out;
}

// ---- plan ----

struct PlanArgs {
  CommonArgs common;
  std::string start, goal;
  std::string weights = "1,0,0";
  std::string heuristic = "admissible";
  std::string time_model = "velocity";
};

int cmd_plan(const PlanArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  require_map_files(a.common.maps);
  const Cell start = parse_cell(a.start, "--start");
  const Cell goal = parse_cell(a.goal, "--goal");
  const CostWeights weights = parse_weights(a.weights);
  const HeuristicMode mode = parse_heuristic_mode(a.heuristic);
  const TraversalTime time_model = parse_time_model(a.time_model);

  const CostConfig config = load_config(a.common.maps.cost_config);
  const MapStack stack = load_stack(a.common.maps, config);
  const auto t_init = Clock::now();
  const NormalizationConstants norms = compute_norms(stack, config, weights);
  const double norm_seconds = seconds_since(t_init);
  const auto t_search = Clock::now();
  const PlanResult result = plan_with_stats(stack, {start, goal, weights, mode}, norms);
  const double search_seconds = seconds_since(t_search);
  const PathMetrics metrics = evaluate(result.path, norms, stack.geometry(), time_model);

  const json doc = {{"map_id", map_id(stack, config)},
                    {"start", cell_json(start)},
                    {"goal", cell_json(goal)},
                    {"weights", weights_json(weights)},
                    {"heuristic", std::string(to_string(mode))},
                    {"time_model", std::string(to_string(time_model))},
                    {"maps", map_args_json(a.common.maps)},
                    {"cost_config", config_json(config)},
                    {"normalization", norms_json(norms)},
                    {"path", path_json(result.path)},
                    {"metrics", metrics_json(metrics)},
                    {"search", {{"expanded", result.stats.expanded}, {"pushed", result.stats.pushed}}}};
  const fs::path dir = prepare_out(a.common.out);
  write_json(dir / "path.json", doc);
  write_json(dir / "path.timing.json", {{"command", "plan"},
                                         {"norm_seconds", norm_seconds},
                                         {"search_seconds", search_seconds},
                                         {"wall_seconds", seconds_since(t0)}});
  out << render_plan_table(weights, metrics, result.path.total_cost);
  return kExitOk;
}

// ---- sweep ----

struct SweepArgs {
  CommonArgs common;
  std::string start, goal;
  std::size_t steps = 10;
  double epsilon = 1e-2;
  bool dedupe = false;
  bool no_corners = false;
  std::string heuristic = "admissible";
  std::string time_model = "velocity";
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  require_map_files(a.common.maps);
  const Cell start = parse_cell(a.start, "--start");
  const Cell goal = parse_cell(a.goal, "--goal");
  SweepOptions options;
  options.workers = resolve_workers(a.common.workers);
  options.heuristic_mode = parse_heuristic_mode(a.heuristic);
  options.time_model = parse_time_model(a.time_model);

  const CostConfig config = load_config(a.common.maps.cost_config);
  const MapStack stack = load_stack(a.common.maps, config);
  const WeightGrid grid = build_weight_grid(a.steps, a.epsilon, !a.no_corners, a.dedupe);
  SweepTiming timing;
  const PathDatabase db = run_sweep(stack, config, start, goal, grid, options, &timing);

  const fs::path dir = prepare_out(a.common.out);
  save_database(dir / "database", db);
  write_json(dir / "database.timing.json", {{"command", "sweep"},
                                             {"workers", timing.workers},
                                             {"norm_seconds", timing.norm_seconds},
                                             {"plan_seconds", timing.plan_seconds},
                                             {"wall_seconds", timing.wall_seconds}});
  out << fmt::format("{} weight triples ({} cube + {} corners), {} paths found, {} without a path\n",
                     db.records.size(), db.records.size() - grid.corner_count, grid.corner_count,
                     db.success_count(), db.records.size() - db.success_count());
  out << fmt::format("map_id {}\n", db.map_id);
  return kExitOk;
}

// ---- cluster ----

struct ClusterArgs {
  CommonArgs common;
  std::string db;
  std::size_t k = 4;
  std::size_t candidates = 0;
  std::size_t profile_max_k = 8;
};

int cmd_cluster(const ClusterArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  if (a.db.empty()) throw ConfigError("--db is required");
  require_files({a.db});
  const PathDatabase db = load_database(a.db);
  const CostSpace space = normalize_cost_space(db);
  KMeansOptions options;
  options.k = a.k;
  options.seed = a.common.seed;
  options.candidates = a.candidates;
  options.workers = resolve_workers(a.common.workers);
  const ClusterReport report = kmeans_pp(space.points, options);
  const auto rows = cluster_summary(report, db, space);

  json doc = cluster_report_json(report, db, space);
  std::string profile_table;
  if (a.profile_max_k >= 2) {
    json profile = json::array();
    profile_table = fmt::format("\n{:>4} {:>14} {:>14}\n", "k", "mean variance", "max variance");
    for (const auto& r : variance_profile(space.points, 2, a.profile_max_k, options)) {
      profile.push_back({{"k", r.k}, {"mean_variance", r.mean_variance}, {"max_variance", r.max_variance}});
      profile_table += fmt::format("{:>4} {:>14.6f} {:>14.6f}\n", r.k, r.mean_variance, r.max_variance);
    }
    doc["variance_profile"] = profile;
  }
  const fs::path dir = prepare_out(a.common.out);
  write_json(dir / "clusters.json", doc);
  write_json(dir / "clusters.timing.json",
             {{"command", "cluster"}, {"workers", options.workers}, {"wall_seconds", seconds_since(t0)}});
  out << render_cluster_table(rows) << profile_table;
  return kExitOk;
}

// ---- mission ----

struct MissionArgs {
  CommonArgs common;
  std::string spec;
  std::string time_model = "velocity";
};

json mission_json(const MissionPlan& m) {
  json segments = json::array();
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    segments.push_back({{"from", cell_json(m.waypoints[i])},
                        {"to", cell_json(m.waypoints[i + 1])},
                        {"weights", weights_json(m.segment_weights[i])},
                        {"total_cost", m.segments[i].total_cost},
                        {"path_rle", encode_path_rle(m.segments[i].cells)},
                        {"metrics", metrics_json(m.segment_metrics[i])}});
  }
  json waypoints = json::array();
  for (const auto& c : m.waypoints) waypoints.push_back(cell_json(c));
  return {{"waypoints", waypoints},
          {"segments", segments},
          {"path_rle", encode_path_rle(m.concatenated.cells)},
          {"aggregate", metrics_json(m.aggregate)}};
}

int cmd_mission(const MissionArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  if (a.spec.empty()) throw ConfigError("--spec is required");
  require_files({a.spec});
  const KeyValueFile kv = KeyValueFile::load(a.spec);
  const MissionSpec spec = parse_mission_spec(kv);

  // spec file supplies defaults, command-line flags win
  MapArgs maps = a.common.maps;
  const auto pick = [](std::string& flag, const std::optional<fs::path>& from_spec) {
    if (flag.empty() && from_spec) flag = from_spec->string();
  };
  pick(maps.dem, spec.dem);
  pick(maps.rock, spec.rock);
  pick(maps.science, spec.science);
  pick(maps.banned, spec.banned);
  pick(maps.cost_config, spec.cost_config);
  std::string out_dir = a.common.out;
  if (a.common.out_opt->count() == 0 && spec.out) out_dir = spec.out->string();
  require_map_files(maps);
  const TraversalTime time_model = parse_time_model(a.time_model);
  const std::size_t workers = resolve_workers(a.common.workers);

  const CostConfig config = load_config(maps.cost_config);
  const MapStack stack = load_stack(maps, config);
  const std::vector<Cell> waypoints = resolve_waypoints(spec, stack.geometry());
  const std::size_t n_segments = waypoints.size() - 1;

  std::optional<MissionPlan> baseline;
  if (spec.baseline_weights) {
    const CostWeights w = *spec.baseline_weights;
    baseline = plan_mission(stack, config, waypoints, std::span(&w, 1), time_model);
  }

  json doc = {{"map_id", map_id(stack, config)},
              {"maps", map_args_json(maps)},
              {"cost_config", config_json(config)},
              {"time_model", std::string(to_string(time_model))}};
  std::vector<PathDatabase> dbs;
  MissionPlan plan;
  if (spec.constrained) {
    const WeightGrid grid = build_weight_grid(spec.steps, spec.epsilon);
    SweepOptions options;
    options.workers = workers;
    options.time_model = time_model;
    for (std::size_t s = 0; s < n_segments; ++s) {
      dbs.push_back(run_sweep(stack, config, waypoints[s], waypoints[s + 1], grid, options));
    }
    SelectionConstraints constraints;
    if (spec.energy_bound_from_baseline) {
      for (const auto& m : baseline->segment_metrics) constraints.max_energy_rel.push_back(m.energy_rel);
    } else {
      constraints.max_energy_rel = spec.max_energy_rel;
    }
    const auto chosen = select_constrained(dbs, constraints);
    std::vector<CostWeights> weights;
    for (std::size_t s = 0; s < n_segments; ++s) {
      const auto it = std::find_if(dbs[s].records.begin(), dbs[s].records.end(),
                                   [&](const PathRecord& r) { return r.idx == chosen[s]; });
      weights.push_back(it->weights);
    }
    plan = plan_mission(stack, config, waypoints, weights, time_model);
    json bounds = json::array();
    for (double b : constraints.max_energy_rel) bounds.push_back(number_or_label(b));
    doc["mode"] = "constrained";
    doc["steps"] = spec.steps;
    doc["epsilon"] = spec.epsilon;
    doc["max_energy_rel"] = bounds;
    doc["energy_bound_from_baseline"] = spec.energy_bound_from_baseline;
    doc["selected_idx"] = chosen;
  } else {
    plan = plan_mission(stack, config, waypoints, spec.segment_weights, time_model);
    doc["mode"] = "explicit";
  }
  doc["mission"] = mission_json(plan);

  std::string table;
  if (baseline) {
    const auto rows = compare_missions(*baseline, plan);
    json cmp = json::array();
    for (const auto& r : rows) {
      cmp.push_back({{"name", r.name}, {"unit", r.unit}, {"baseline", r.a}, {"selected", r.b},
                     {"delta_pct", number_or_label(r.delta_pct)}, {"delta", format_delta(r.delta_pct)}});
    }
    doc["baseline"] = mission_json(*baseline);
    doc["baseline_weights"] = weights_json(*spec.baseline_weights);
    doc["comparison"] = cmp;
    table = render_comparison(rows, "Baseline", "Selected");
  } else {
    table = fmt::format("{:<8} {:<5} | {:>12}\n", "", "", "Mission");
    table += fmt::format("{:<8} {:<5} | {:>12.4g}\n", "Length", "[km]", plan.aggregate.length_m / 1000.0);
    table += fmt::format("{:<8} {:<5} | {:>12.4g}\n", "Energy", "[rel]", plan.aggregate.energy_rel);
    table += fmt::format("{:<8} {:<5} | {:>12.4g}\n", "Risk", "[%]", plan.aggregate.risk_total * 100.0);
    table += fmt::format("{:<8} {:<5} | {:>12.4g}\n", "Science", "[%]", plan.aggregate.science_total * 100.0);
  }

  const fs::path dir = prepare_out(out_dir);
  for (std::size_t s = 0; s < dbs.size(); ++s) save_database(dir / fmt::format("segment_{}", s), dbs[s]);
  write_json(dir / "mission.json", doc);
  write_json(dir / "mission.timing.json",
             {{"command", "mission"}, {"workers", workers}, {"wall_seconds", seconds_since(t0)}});
  out << table;
  return kExitOk;
}

// ---- bench ----

struct BenchArgs {
  CommonArgs common;
  std::string sizes = "64,128,256,512";
  std::size_t trials = 5;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  require_files({a.common.maps.cost_config});
  BenchOptions options;
  options.sizes.clear();
  for (double v : parse_double_list(a.sizes)) {
    if (v < 2 || v != std::floor(v)) throw ConfigError(fmt::format("--sizes entry {} is not an integer >= 2", v));
    options.sizes.push_back(static_cast<int>(v));
  }
  options.endpoint_pairs = a.trials;
  options.weight_triples = a.trials;
  options.seed = a.common.seed;
  const CostConfig config = load_config(a.common.maps.cost_config);
  const BenchReport report = run_bench(options, config);

  const fs::path dir = prepare_out(a.common.out);
  write_json(dir / "bench.json", bench_json(report));
  out << fmt::format("{:>6} {:>9} {:>11} {:>13} {:>12} {:>10}\n", "size", "n_pixel", "init [ms]", "search [ms]",
                     "total [ms]", "expanded");
  for (const auto& s : report.sizes) {
    out << fmt::format("{:>6} {:>9} {:>11.2f} {:>13.2f} {:>12.2f} {:>10.0f}\n", s.size, s.n_pixel,
                       s.init_seconds * 1e3, s.mean_search_seconds * 1e3, s.mean_total_seconds * 1e3,
                       s.mean_expanded);
  }
  out << fmt::format("fit: t = {:.6g} ms * n_pixel + {:.4g} ms, R^2 = {:.4f} -> {}\n", report.fit.slope * 1e3,
                     report.fit.intercept * 1e3, report.fit.r_squared, report.pass ? "PASS" : "FAIL");
  return kExitOk;
}

// ---- render ----

struct RenderArgs {
  CommonArgs common;
  std::string path;
  std::string db;
  std::string clusters;
  int scale = 4;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path, e.what()));
  }
}

int cmd_render(const RenderArgs& a, std::ostream& out) {
  require_map_files(a.common.maps);
  require_files({a.path, a.db, a.clusters});
  if (!a.clusters.empty() && a.db.empty()) throw ConfigError("--clusters needs --db");
  const CostConfig config = load_config(a.common.maps.cost_config);
  const MapStack stack = load_stack(a.common.maps, config);

  std::vector<RenderPath> paths;
  if (!a.path.empty()) {
    const json doc = load_json(a.path);
    RenderPath rp;
    try {
      for (const auto& c : doc.at("path").at("cells")) rp.cells.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("{}: not a plan output ({})", a.path, e.what()));
    }
    paths.push_back(std::move(rp));
  }
  std::size_t groups = 0;
  if (!a.db.empty()) {
    const PathDatabase db = load_database(a.db);
    std::map<std::size_t, std::size_t> group_of;
    std::set<std::size_t> reps;
    if (!a.clusters.empty()) {
      const json doc = load_json(a.clusters);
      try {
        for (const auto& pair : doc.at("assignments")) group_of[pair.at(0).get<std::size_t>()] = pair.at(1).get<std::size_t>();
        for (const auto& r : doc.at("representatives")) {
          if (!r.is_null()) reps.insert(r.get<std::size_t>());
        }
        groups = doc.at("k").get<std::size_t>();
      } catch (const json::exception& e) {
        throw ParseError(fmt::format("{}: not a cluster report ({})", a.clusters, e.what()));
      }
    }
    for (const auto& rec : db.records) {
      if (rec.status != RecordStatus::ok) continue;
      const auto it = group_of.find(rec.idx);
      paths.push_back({rec.cells, it == group_of.end() ? 0 : it->second, reps.contains(rec.idx)});
    }
  }
  RenderOptions options;
  options.scale = a.scale;
  const Image img = render_image(stack, paths, options);
  const std::string svg = render_svg(stack, paths, options);

  const fs::path dir = prepare_out(a.common.out);
  std::ostringstream ppm;
  img.write_ppm(ppm);
  write_text(dir / "render.ppm", ppm.str());
  write_text(dir / "render.svg", svg);
  out << fmt::format("rendered {} paths ({} groups) at {}x{} px\n", paths.size(), groups, img.width(), img.height());
  return kExitOk;
}

// ---- synth ----

struct SynthArgs {
  CommonArgs common;
  SynthParams params;
  int size = 64;
};

int cmd_synth(SynthArgs a, std::ostream& out) {
  a.params.rows = a.params.cols = a.size;
  a.params.seed = a.common.seed;
  const SynthMaps maps = synthesize(a.params);
  const fs::path dir = prepare_out(a.common.out);
  write_synth(dir, maps);
  const MapStack stack = assemble_synth(maps);
  std::size_t banned = 0;
  for (auto b : stack.banned_mask()) banned += b;
  out << fmt::format("wrote {}x{} maps to {} ({} of {} cells banned at default thresholds)\n", a.params.rows,
                     a.params.cols, dir.string(), banned, stack.geometry().cell_count());
  return kExitOk;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConstraintInfeasibleError*>(&e)) return kExitConstraint;
  if (dynamic_cast<const InfeasibleError*>(&e)) return kExitInfeasible;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ParseError*>(&e)) return kExitIo;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const RangeError*>(&e) ||
      dynamic_cast<const GeometryError*>(&e)) {
    return kExitConfig;
  }
  return kExitInternal;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-objective rover path planning on raster maps", "moplan"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Layered key=value config file; command-line flags override it");

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Plan one path and print its cost table");
  add_common(plan, plan_args.common);
  plan->add_option("--start", plan_args.start, "Start cell R,C")->required();
  plan->add_option("--goal", plan_args.goal, "Goal cell R,C")->required();
  plan->add_option("--weights", plan_args.weights, "Cost weights a1,a2,a3 (energy, risk, science)");
  plan->add_option("--heuristic", plan_args.heuristic, "admissible or zero");
  plan->add_option("--time-model", plan_args.time_model, "velocity or fixed_sim_grid");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Plan over a grid of weight triples and write the path database");
  add_common(sweep, sweep_args.common);
  sweep->add_option("--start", sweep_args.start, "Start cell R,C")->required();
  sweep->add_option("--goal", sweep_args.goal, "Goal cell R,C")->required();
  sweep->add_option("--steps", sweep_args.steps, "Samples per weight axis");
  sweep->add_option("--epsilon", sweep_args.epsilon, "Smallest raw weight on each axis");
  sweep->add_flag("--dedupe", sweep_args.dedupe, "Drop triples equal to an earlier one");
  sweep->add_flag("--no-corners", sweep_args.no_corners, "Do not append the exact corner triples");
  sweep->add_option("--heuristic", sweep_args.heuristic, "admissible or zero");
  sweep->add_option("--time-model", sweep_args.time_model, "velocity or fixed_sim_grid");

  ClusterArgs cluster_args;
  auto* cluster = app.add_subcommand("cluster", "Cluster a path database in cost space");
  add_common(cluster, cluster_args.common);
  cluster->add_option("--db", cluster_args.db, "Path database CSV")->required();
  cluster->add_option("--k", cluster_args.k, "Number of clusters");
  cluster->add_option("--candidates", cluster_args.candidates, "Seeding candidates per center (0 = auto)");
  cluster->add_option("--profile", cluster_args.profile_max_k, "Report variance for k = 2..N (0 disables)");

  MissionArgs mission_args;
  auto* mission = app.add_subcommand("mission", "Plan a multi-waypoint mission from a spec file");
  add_common(mission, mission_args.common);
  mission->add_option("--spec", mission_args.spec, "Mission spec key=value file")->required();
  mission->add_option("--time-model", mission_args.time_model, "velocity or fixed_sim_grid");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Time the planner on synthetic maps of growing size");
  add_common(bench, bench_args.common);
  bench->add_option("--sizes", bench_args.sizes, "Comma-separated square map sizes");
  bench->add_option("--trials", bench_args.trials, "Endpoint pairs and weight triples per size");

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "Draw paths over the map as PPM and SVG");
  add_common(render, render_args.common);
  render->add_option("--path", render_args.path, "path.json from the plan command");
  render->add_option("--db", render_args.db, "Path database CSV");
  render->add_option("--clusters", render_args.clusters, "clusters.json from the cluster command");
  render->add_option("--scale", render_args.scale, "Pixels per cell")->check(CLI::PositiveNumber);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate synthetic map layers");
  add_common(synth, synth_args.common);
  synth->add_option("--size", synth_args.size, "Rows and columns");
  synth->add_option("--cell-size", synth_args.params.cell_size, "Meters per cell");
  synth->add_option("--roughness", synth_args.params.roughness, "Relief scale (0 = flat)");
  synth->add_option("--rock-density", synth_args.params.rock_density, "Rock patches per 256 cells");
  synth->add_option("--hotspots", synth_args.params.hotspots, "Scientific interest blobs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (plan->parsed()) return cmd_plan(plan_args, out);
    if (sweep->parsed()) return cmd_sweep(sweep_args, out);
    if (cluster->parsed()) return cmd_cluster(cluster_args, out);
    if (mission->parsed()) return cmd_mission(mission_args, out);
    if (bench->parsed()) return cmd_bench(bench_args, out);
    if (render->parsed()) return cmd_render(render_args, out);
    if (synth->parsed()) return cmd_synth(synth_args, out);
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    err << "error: " << e.what() << '\n';
    return code;
  }
  return kExitInternal;
}

}  // namespace moplan
