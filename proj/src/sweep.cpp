#include "moplan/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "moplan/errors.hpp"
#include "moplan/keyvalue.hpp"

namespace moplan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t hash = 14695981039346656037ull) {
  for (unsigned char ch : data) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view token, std::string_view source, std::size_t line) {
  if (token == "nan") return std::nan("");
  try {
    const auto v = parse_double_list(token);
    if (v.size() == 1) return v.front();
  } catch (const ConfigError&) {
  }
  throw ParseError(fmt::format("{}:{}: bad number '{}'", source, line, token));
}

nlohmann::json config_json(const CostConfig& c) {
  return {{"energy_coeffs", c.energy.p}, {"crash_coeffs", c.crash.p},       {"d_sim", c.d_sim},
          {"velocity", c.velocity},      {"max_slope", c.max_slope_deg}, {"max_rock", c.max_rock}};
}

CostConfig config_from_json(const nlohmann::json& j) {
  CostConfig c;
  c.energy.p = j.at("energy_coeffs").get<std::array<double, 6>>();
  c.crash.p = j.at("crash_coeffs").get<std::array<double, 6>>();
  c.d_sim = j.at("d_sim").get<double>();
  c.velocity = j.at("velocity").get<double>();
  c.max_slope_deg = j.at("max_slope").get<double>();
  c.max_rock = j.at("max_rock").get<double>();
  return c;
}

}  // namespace

std::string_view to_string(RecordStatus status) { return status == RecordStatus::ok ? "ok" : "no_path"; }

std::size_t PathDatabase::success_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.status == RecordStatus::ok;
  return n;
}

WeightGrid build_weight_grid(std::size_t step_count, double epsilon, bool append_corners, bool dedupe) {
  if (step_count < 2) throw ConfigError(fmt::format("step count must be at least 2, got {}", step_count));
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError(fmt::format("epsilon must be in (0, 1), got {}", epsilon));

  WeightGrid grid;
  grid.step_count = step_count;
  grid.epsilon = epsilon;
  grid.dedupe = dedupe;

  std::vector<double> axis(step_count);
  const double log_lo = std::log10(epsilon);
  for (std::size_t i = 0; i < step_count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(step_count - 1);
    axis[i] = std::pow(10.0, log_lo * (1.0 - t));
  }
  axis.back() = 1.0;

  const auto push = [&](CostWeights w) {
    if (dedupe) {
      for (const auto& existing : grid.triples) {
        if (std::abs(existing.alpha1 - w.alpha1) <= 1e-12 && std::abs(existing.alpha2 - w.alpha2) <= 1e-12 &&
            std::abs(existing.alpha3 - w.alpha3) <= 1e-12) {
          return;
        }
      }
    }
    grid.triples.push_back(w);
  };

  grid.triples.reserve(step_count * step_count * step_count + 3);
  for (double a : axis) {
    for (double b : axis) {
      for (double c : axis) {
        const double sum = a + b + c;
        push({a / sum, b / sum, c / sum});
      }
    }
  }
  if (append_corners) {
    const std::size_t before = grid.triples.size();
    push({1.0, 0.0, 0.0});
    push({0.0, 1.0, 0.0});
    push({0.0, 0.0, 1.0});
    grid.corner_count = grid.triples.size() - before;
  }
  return grid;
}

std::string map_id(const MapStack& stack, const CostConfig& config) {
  const auto h = fnv1a(echo_cost_config(config), fnv1a(serialize(stack)));
  return fmt::format("{:016x}", h);
}

PathDatabase run_sweep(const MapStack& stack, const CostConfig& config, Cell start, Cell goal, const WeightGrid& grid,
                       const SweepOptions& options, SweepTiming* timing) {
  const auto t0 = Clock::now();
  for (const auto& [cell, what] : {std::pair{start, "start"}, std::pair{goal, "goal"}}) {
    if (!stack.geometry().contains(cell)) {
      throw RangeError(fmt::format("{} ({}, {}) is outside the grid", what, cell.row, cell.col));
    }
    if (stack.banned(cell)) throw BannedEndpointError(fmt::format("{} ({}, {}) is banned", what, cell.row, cell.col));
  }

  PathDatabase db;
  db.map_id = map_id(stack, config);
  db.start = start;
  db.goal = goal;
  db.step_count = grid.step_count;
  db.epsilon = grid.epsilon;
  db.dedupe = grid.dedupe;
  db.heuristic_mode = options.heuristic_mode;
  db.time_model = options.time_model;
  db.config = config;
  db.records.resize(grid.triples.size());

  const auto t_norm = Clock::now();
  const CostDomain domain = feasible_domain(stack);
  const double norm_seconds = seconds_since(t_norm);

  std::atomic<std::size_t> next{0};
  std::atomic<long long> plan_nanos{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.triples.size()) return;
      const auto tp = Clock::now();
      try {
        PathRecord& rec = db.records[i];
        rec.idx = i;
        rec.weights = grid.triples[i];
        const auto norms = compute_norms(domain, config, rec.weights);
        try {
          const auto path = plan(stack, {start, goal, rec.weights, options.heuristic_mode}, norms);
          rec.status = RecordStatus::ok;
          rec.cost_total = path.total_cost;
          rec.metrics = evaluate(path, norms, stack.geometry(), options.time_model);
          rec.cells = path.cells;
        } catch (const BannedEndpointError&) {
          throw;
        } catch (const InfeasibleError&) {
          const double nan = std::nan("");
          rec.status = RecordStatus::no_path;
          rec.cost_total = nan;
          rec.metrics = PathMetrics{nan, nan, nan, nan, {nan, nan, nan}};
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = grid.triples.size();
        return;
      }
      plan_nanos += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - tp).count();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, grid.triples.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  if (timing) {
    timing->wall_seconds = seconds_since(t0);
    timing->norm_seconds = norm_seconds;
    timing->plan_seconds = static_cast<double>(plan_nanos.load()) * 1e-9;
    timing->workers = workers;
  }
  if (!db.records.empty() && db.success_count() == 0) {
    throw InfeasibleError(fmt::format("goal ({}, {}) unreachable from ({}, {}) for every weight triple", goal.row,
                                      goal.col, start.row, start.col));
  }
  return db;
}

std::string encode_path_rle(std::span<const Cell> cells) {
  if (cells.empty()) return {};
  std::string out = fmt::format("{}_{}:", cells.front().row, cells.front().col);
  std::size_t i = 1;
  while (i < cells.size()) {
    const auto dir = direction_index(cells[i - 1], cells[i]);
    if (!dir) throw RangeError("path contains non-adjacent consecutive cells");
    std::size_t run = 1;
    while (i + run < cells.size() && direction_index(cells[i + run - 1], cells[i + run]) == dir) ++run;
    out += fmt::format("{}{}", run, kDirections[*dir].name);
    i += run;
  }
  return out;
}

std::vector<Cell> decode_path_rle(std::string_view text) {
  std::vector<Cell> cells;
  if (text.empty()) return cells;
  const auto colon = text.find(':');
  const auto under = text.find('_');
  if (colon == std::string_view::npos || under == std::string_view::npos || under > colon) {
    throw ParseError(fmt::format("bad path encoding '{}'", text));
  }
  const auto parse_int = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError(fmt::format("bad path encoding '{}'", text));
    }
    return v;
  };
  Cell c{parse_int(text.substr(0, under)), parse_int(text.substr(under + 1, colon - under - 1))};
  cells.push_back(c);
  std::size_t i = colon + 1;
  while (i < text.size()) {
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    std::size_t k = j;
    while (k < text.size() && std::isalpha(static_cast<unsigned char>(text[k]))) ++k;
    const int run = parse_int(text.substr(i, j - i));
    const auto name = text.substr(j, k - j);
    const auto it = std::find_if(kDirections.begin(), kDirections.end(), [&](const Direction& d) { return d.name == name; });
    if (it == kDirections.end() || run <= 0) throw ParseError(fmt::format("bad path encoding '{}'", text));
    for (int r = 0; r < run; ++r) {
      c = {c.row + it->d_row, c.col + it->d_col};
      cells.push_back(c);
    }
    i = k;
  }
  return cells;
}

void write_database_csv(std::ostream& out, const PathDatabase& db) {
  out << kDatabaseCsvHeader << '\n';
  for (const auto& r : db.records) {
    const auto& m = r.metrics;
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.idx, r.weights.alpha1, r.weights.alpha2,
                       r.weights.alpha3, m.component_costs.energy, m.component_costs.risk, m.component_costs.science,
                       r.cost_total, m.length_m, m.energy_rel, m.risk_total, m.science_total, to_string(r.status),
                       encode_path_rle(r.cells));
  }
}

std::vector<PathRecord> read_database_csv(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line) || line != kDatabaseCsvHeader) {
    throw ParseError(fmt::format("{}: missing or unexpected CSV header", source));
  }
  std::vector<PathRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 14) throw ParseError(fmt::format("{}:{}: expected 14 fields, got {}", source, line_no, f.size()));
    PathRecord r;
    const double idx = to_double(f[0], source, line_no);
    if (!(idx >= 0.0) || idx != std::floor(idx)) throw ParseError(fmt::format("{}:{}: bad idx", source, line_no));
    r.idx = static_cast<std::size_t>(idx);
    r.weights = {to_double(f[1], source, line_no), to_double(f[2], source, line_no), to_double(f[3], source, line_no)};
    r.metrics.component_costs = {to_double(f[4], source, line_no), to_double(f[5], source, line_no),
                                 to_double(f[6], source, line_no)};
    r.cost_total = to_double(f[7], source, line_no);
    r.metrics.length_m = to_double(f[8], source, line_no);
    r.metrics.energy_rel = to_double(f[9], source, line_no);
    r.metrics.risk_total = to_double(f[10], source, line_no);
    r.metrics.science_total = to_double(f[11], source, line_no);
    if (f[12] == "ok") {
      r.status = RecordStatus::ok;
    } else if (f[12] == "no_path") {
      r.status = RecordStatus::no_path;
    } else {
      throw ParseError(fmt::format("{}:{}: bad status '{}'", source, line_no, f[12]));
    }
    r.cells = decode_path_rle(f[13]);
    records.push_back(std::move(r));
  }
  return records;
}

nlohmann::json database_metadata(const PathDatabase& db) {
  std::size_t failures = db.records.size() - db.success_count();
  return {
      {"map_id", db.map_id},
      {"start", {db.start.row, db.start.col}},
      {"goal", {db.goal.row, db.goal.col}},
      {"step_count", db.step_count},
      {"epsilon", db.epsilon},
      {"dedupe", db.dedupe},
      {"heuristic", std::string(to_string(db.heuristic_mode))},
      {"time_model", std::string(to_string(db.time_model))},
      {"record_count", db.records.size()},
      {"failure_count", failures},
      {"cost_config", config_json(db.config)},
  };
}

void save_database(const std::filesystem::path& stem, const PathDatabase& db) {
  auto csv_path = stem;
  csv_path += ".csv";
  auto json_path = stem;
  json_path += ".json";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError(fmt::format("cannot write '{}'", csv_path.string()));
  write_database_csv(csv, db);
  std::ofstream js(json_path);
  if (!js) throw IoError(fmt::format("cannot write '{}'", json_path.string()));
  js << database_metadata(db).dump(2) << '\n';
  if (!csv || !js) throw IoError(fmt::format("failed writing database '{}'", stem.string()));
}

PathDatabase load_database(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError(fmt::format("cannot open database '{}'", csv_path.string()));
  PathDatabase db;
  db.records = read_database_csv(in, csv_path.string());
  auto json_path = csv_path;
  json_path.replace_extension(".json");
  if (std::ifstream js(json_path); js) {
    try {
      const auto j = nlohmann::json::parse(js);
      db.map_id = j.at("map_id").get<std::string>();
      const auto s = j.at("start").get<std::array<int, 2>>();
      const auto g = j.at("goal").get<std::array<int, 2>>();
      db.start = {s[0], s[1]};
      db.goal = {g[0], g[1]};
      db.step_count = j.at("step_count").get<std::size_t>();
      db.epsilon = j.at("epsilon").get<double>();
      db.dedupe = j.at("dedupe").get<bool>();
      db.heuristic_mode = parse_heuristic_mode(j.at("heuristic").get<std::string>());
      db.time_model = parse_time_model(j.at("time_model").get<std::string>());
      db.config = config_from_json(j.at("cost_config"));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fmt::format("{}: {}", json_path.string(), e.what()));
    }
  }
  return db;
}

}  // namespace moplan
