#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "moplan/cli.hpp"
#include "moplan/cluster.hpp"
#include "moplan/errors.hpp"
#include "moplan/mission.hpp"
#include "moplan/planner.hpp"
#include "moplan/sweep.hpp"
#include "moplan/synth.hpp"

namespace py = pybind11;
using namespace moplan;

namespace {

using CellPair = std::pair<int, int>;

Cell to_cell(const CellPair& p) { return {p.first, p.second}; }

CostWeights to_weights(const std::tuple<double, double, double>& w) {
  return CostWeights::checked(std::get<0>(w), std::get<1>(w), std::get<2>(w));
}

// A map stack together with the cost config it was banned against.
struct Scenario {
  MapStack stack;
  CostConfig config;
};

Scenario load_scenario(const std::filesystem::path& dem, const std::optional<std::filesystem::path>& rock,
                       const std::optional<std::filesystem::path>& science,
                       const std::optional<std::filesystem::path>& banned,
                       const std::optional<std::filesystem::path>& cost_config) {
  const CostConfig config = cost_config ? load_cost_config(*cost_config) : CostConfig{};
  std::vector<MapLayer> layers{load_layer(dem, LayerKind::elevation)};
  if (rock) layers.push_back(load_layer(*rock, LayerKind::rock_abundance));
  if (science) layers.push_back(load_layer(*science, LayerKind::scientific_interest));
  if (banned) layers.push_back(load_layer(*banned, LayerKind::banned));
  return {assemble_stack(std::move(layers), config.thresholds()), config};
}

Scenario synthetic_scenario(int size, std::uint64_t seed, double cell_size, double roughness, double rock_density,
                            int hotspots) {
  SynthParams p;
  p.rows = p.cols = size;
  p.seed = seed;
  p.cell_size = cell_size;
  p.roughness = roughness;
  p.rock_density = rock_density;
  p.hotspots = hotspots;
  return {assemble_synth(synthesize(p)), CostConfig{}};
}

py::array_t<double> layer_array(const Scenario& s, LayerKind kind) {
  const auto& g = s.stack.geometry();
  py::array_t<double> out({g.n_rows, g.n_cols});
  auto view = out.mutable_unchecked<2>();
  const auto& layer = s.stack.layer(kind);
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) view(r, c) = layer.at({r, c});
  }
  return out;
}

py::array_t<bool> banned_array(const Scenario& s) {
  const auto& g = s.stack.geometry();
  py::array_t<bool> out({g.n_rows, g.n_cols});
  auto view = out.mutable_unchecked<2>();
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) view(r, c) = s.stack.banned({r, c});
  }
  return out;
}

py::dict metrics_dict(const PathMetrics& m) {
  py::dict d;
  d["length_m"] = m.length_m;
  d["energy_rel"] = m.energy_rel;
  d["risk_total"] = m.risk_total;
  d["science_total"] = m.science_total;
  d["cost_E"] = m.component_costs.energy;
  d["cost_R"] = m.component_costs.risk;
  d["cost_I"] = m.component_costs.science;
  return d;
}

std::vector<CellPair> cell_list(const std::vector<Cell>& cells) {
  std::vector<CellPair> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.emplace_back(c.row, c.col);
  return out;
}

py::dict plan_path(const Scenario& s, const CellPair& start, const CellPair& goal,
                   const std::tuple<double, double, double>& weights, const std::string& heuristic_mode,
                   const std::string& time_model) {
  const CostWeights w = to_weights(weights);
  const auto norms = compute_norms(s.stack, s.config, w);
  PlanResult r;
  {
    py::gil_scoped_release release;
    r = plan_with_stats(s.stack, {to_cell(start), to_cell(goal), w, parse_heuristic_mode(heuristic_mode)}, norms);
  }
  py::dict d;
  d["cells"] = cell_list(r.path.cells);
  d["cost_total"] = r.path.total_cost;
  d["expanded"] = r.stats.expanded;
  d["metrics"] = metrics_dict(evaluate(r.path, norms, s.stack.geometry(), parse_time_model(time_model)));
  return d;
}

py::list sweep_records(const Scenario& s, const CellPair& start, const CellPair& goal, std::size_t steps,
                       double epsilon, std::size_t workers) {
  PathDatabase db;
  {
    py::gil_scoped_release release;
    SweepOptions opts;
    opts.workers = workers;
    db = run_sweep(s.stack, s.config, to_cell(start), to_cell(goal), build_weight_grid(steps, epsilon), opts);
  }
  py::list out;
  for (const auto& r : db.records) {
    py::dict d;
    d["idx"] = r.idx;
    d["weights"] = std::make_tuple(r.weights.alpha1, r.weights.alpha2, r.weights.alpha3);
    d["ok"] = r.status == RecordStatus::ok;
    d["cost_total"] = r.cost_total;
    d["metrics"] = metrics_dict(r.metrics);
    d["path_rle"] = r.status == RecordStatus::ok ? encode_path_rle(r.cells) : std::string{};
    out.append(d);
  }
  return out;
}

py::dict cluster_points(const std::vector<CostPoint>& points, std::size_t k, std::uint64_t seed,
                        std::size_t candidates, std::size_t workers) {
  KMeansOptions o;
  o.k = k;
  o.seed = seed;
  o.candidates = candidates;
  o.workers = workers;
  const ClusterReport r = kmeans_pp(points, o);
  py::dict d;
  d["assignments"] = r.assignments;
  d["centroids"] = r.centroids;
  d["variances"] = r.variances;
  d["representatives"] = r.representatives;
  d["sse_history"] = r.sse_history;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  return d;
}

py::dict plan_mission_py(const Scenario& s, const std::vector<CellPair>& waypoints,
                         const std::vector<std::tuple<double, double, double>>& weights) {
  std::vector<Cell> wp;
  for (const auto& p : waypoints) wp.push_back(to_cell(p));
  std::vector<CostWeights> w;
  for (const auto& t : weights) w.push_back(to_weights(t));
  const MissionPlan m = plan_mission(s.stack, s.config, wp, w);
  py::dict d;
  d["cells"] = cell_list(m.concatenated.cells);
  d["aggregate"] = metrics_dict(m.aggregate);
  py::list segs;
  for (const auto& sm : m.segment_metrics) segs.append(metrics_dict(sm));
  d["segments"] = segs;
  d["map_id"] = m.map_id;
  return d;
}

std::tuple<int, std::string, std::string> run_cli_py(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = run_cli(args, out, err);
  }
  return {code, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-objective rover path planning on raster maps";

  auto base = py::register_exception<Error>(m, "MoplanError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  auto infeasible = py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<BannedEndpointError>(m, "BannedEndpointError", infeasible.ptr());
  py::register_exception<ConstraintInfeasibleError>(m, "ConstraintInfeasibleError", base.ptr());
  py::register_exception<InternalError>(m, "InternalError", base.ptr());

  py::class_<Scenario>(m, "Scenario")
      .def_static("load", &load_scenario, py::arg("dem"), py::arg("rock") = py::none(),
                  py::arg("science") = py::none(), py::arg("banned") = py::none(),
                  py::arg("cost_config") = py::none(), "Load ESRI ASCII layers and an optional cost config")
      .def_static("synthetic", &synthetic_scenario, py::arg("size") = 64, py::arg("seed") = 0,
                  py::arg("cell_size") = 5.0, py::arg("roughness") = 1.0, py::arg("rock_density") = 1.0,
                  py::arg("hotspots") = 3)
      .def_property_readonly("shape",
                             [](const Scenario& s) {
                               return std::make_pair(s.stack.geometry().n_rows, s.stack.geometry().n_cols);
                             })
      .def_property_readonly("cell_size", [](const Scenario& s) { return s.stack.geometry().cell_size; })
      .def_property_readonly("map_id", [](const Scenario& s) { return map_id(s.stack, s.config); })
      .def_property_readonly("elevation", [](const Scenario& s) { return layer_array(s, LayerKind::elevation); })
      .def_property_readonly("rock", [](const Scenario& s) { return layer_array(s, LayerKind::rock_abundance); })
      .def_property_readonly("interest",
                             [](const Scenario& s) { return layer_array(s, LayerKind::scientific_interest); })
      .def_property_readonly("banned", &banned_array);

  m.def("plan", &plan_path, py::arg("scenario"), py::arg("start"), py::arg("goal"),
        py::arg("weights") = std::make_tuple(1.0, 0.0, 0.0), py::arg("heuristic") = "admissible",
        py::arg("time_model") = "velocity", "Plan one path; returns cells, cost_total, expanded and metrics");
  m.def("sweep", &sweep_records, py::arg("scenario"), py::arg("start"), py::arg("goal"), py::arg("steps") = 10,
        py::arg("epsilon") = 1e-2, py::arg("workers") = 1, "Plan every triple of the weight grid");
  m.def(
      "weight_grid",
      [](std::size_t steps, double epsilon, bool corners) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& w : build_weight_grid(steps, epsilon, corners).triples) {
          out.emplace_back(w.alpha1, w.alpha2, w.alpha3);
        }
        return out;
      },
      py::arg("steps") = 10, py::arg("epsilon") = 1e-2, py::arg("corners") = true);
  m.def("kmeans", &cluster_points, py::arg("points"), py::arg("k") = 4, py::arg("seed") = 0,
        py::arg("candidates") = 0, py::arg("workers") = 1, "Greedy k-means++ with Lloyd refinement");
  m.def("mission", &plan_mission_py, py::arg("scenario"), py::arg("waypoints"),
        py::arg("weights") = std::vector<std::tuple<double, double, double>>{{1.0, 0.0, 0.0}});
  m.def("encode_path", [](const std::vector<CellPair>& cells) {
    std::vector<Cell> c;
    for (const auto& p : cells) c.push_back(to_cell(p));
    return encode_path_rle(c);
  });
  m.def("decode_path", [](const std::string& text) { return cell_list(decode_path_rle(text)); });
  m.def("run_cli", &run_cli_py, py::arg("args"), "Run a CLI command in-process; returns (exit_code, stdout, stderr)");
}
