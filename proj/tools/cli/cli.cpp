#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "infodesign/equilibrium.hpp"
#include "infodesign/error.hpp"
#include "infodesign/network.hpp"
#include "infodesign/parallel.hpp"
#include "infodesign/serialize.hpp"
#include "infodesign/twolink.hpp"

namespace infodesign::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

const std::vector<std::pair<Command, std::string>>& command_names() {
  static const std::vector<std::pair<Command, std::string>> names = {
      {Command::SolveSysopt, "solve-sysopt"}, {Command::SolveUe, "solve-ue"},
      {Command::SolveBue, "solve-bue"},       {Command::Design, "design"},
      {Command::Poa, "poa"},                  {Command::CheckTheorems, "check-theorems"},
      {Command::Sweep, "sweep"}};
  return names;
}

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ConfigParse, what); }

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) parse_error(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read_if(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

Range range_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) parse_error(where + " must be an object with min, max, step");
  reject_unknown_keys(j, {"min", "max", "step"}, where);
  Range r{j.at("min").get<double>(), j.at("max").get<double>(), j.at("step").get<double>()};
  if (!(r.step > 0.0) || !std::isfinite(r.step) || !std::isfinite(r.min) || !std::isfinite(r.max)) {
    parse_error(where + ": step must be positive and bounds finite");
  }
  return r;
}

json range_to_json(const Range& r) { return {{"min", r.min}, {"max", r.max}, {"step", r.step}}; }

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Problem {
  ScenarioSet set;
  Graph graph;
  PathSet paths;
};

Problem load_problem(const RunConfig& config) {
  auto set = scenario_set_from_json(config.scenarios, config.seed);
  auto graph = config.graph.is_null() ? parallel_links(set.num_links()) : graph_from_json(config.graph);
  if (graph.edges().size() != set.num_links()) {
    throw Error(ErrorCode::DimensionMismatch,
                "graph has " + std::to_string(graph.edges().size()) + " links but scenarios have " +
                    std::to_string(set.num_links()));
  }
  auto paths = enumerate_paths(graph);
  return {std::move(set), std::move(graph), std::move(paths)};
}

bool is_two_parallel_links(const Graph& graph, const PathSet& paths) {
  return graph.edges().size() == 2 && paths.paths.size() == 2 && paths.paths[0].size() == 1 &&
         paths.paths[1].size() == 1;
}

Policy policy_from_config(const RunConfig& config, const Problem& p) {
  Policy policy;
  if (config.policy.is_null()) {
    const auto np = p.paths.paths.size();
    policy = Policy::constant(p.set.size(), Eigen::VectorXd::Constant(static_cast<Eigen::Index>(np),
                                                                      1.0 / static_cast<double>(np)));
  } else {
    policy.pi = matrix_from_json(config.policy);
  }
  policy.validate(p.set, p.paths);
  return policy;
}

std::vector<std::string> indexed(const std::string& stem, std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back(stem + std::to_string(i));
  return names;
}

PlotTable scenario_table(const ScenarioSet& set, const std::string& stem, const Eigen::MatrixXd& values,
                         const std::optional<Eigen::MatrixXd>& link_flows) {
  PlotTable t;
  t.header = {"scenario", "weight"};
  for (auto& h : indexed(stem, static_cast<std::size_t>(values.cols()))) t.header.push_back(h);
  if (link_flows) t.header.push_back("cost");
  for (std::size_t k = 0; k < set.size(); ++k) {
    std::vector<Cell> row{static_cast<long long>(k), set[k].weight};
    for (Eigen::Index c = 0; c < values.cols(); ++c) row.emplace_back(values(static_cast<Eigen::Index>(k), c));
    if (link_flows) {
      row.emplace_back(scenario_cost(set[k], link_flows->row(static_cast<Eigen::Index>(k)).transpose()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

json assignment_json(const Assignment& a, const ScenarioSet& set, const PathSet& paths) {
  return {{"expected_cost", expected_cost(a.flow, set)},
          {"max_residual", a.max_residual},
          {"iterations", a.iterations},
          {"paths", to_json(paths)},
          {"link_flows", to_json(a.flow.flows)},
          {"path_flows", to_json(a.path_flows)}};
}

RunOutput run_assignment(const RunConfig& config, bool system) {
  const auto p = load_problem(config);
  const auto a = system ? system_optimum(p.set, p.paths, config.design.solver)
                        : full_info_ue(p.set, p.paths, config.design.solver);
  return {assignment_json(a, p.set, p.paths), scenario_table(p.set, "f", a.flow.flows, a.flow.flows)};
}

RunOutput run_bue(const RunConfig& config) {
  const auto p = load_problem(config);
  const auto policy = policy_from_config(config, p);
  const auto eq = bayesian_ue(policy, p.set, p.paths, BayesianOptions{config.design.solver, {}});
  const double cost = expected_cost(eq.flow, p.set);
  const double so = expected_cost(system_optimum(p.set, p.paths, config.design.solver).flow, p.set);
  json r{{"paths", to_json(p.paths)},
         {"policy", to_json(policy.pi)},
         {"response", to_json(eq.response.y)},
         {"link_flows", to_json(eq.flow.flows)},
         {"expected_cost", cost},
         {"system_optimum_cost", so},
         {"poa", cost_ratio(cost, so)},
         {"potential", eq.potential},
         {"stationarity", eq.stationarity},
         {"equilibrium_residual", eq.equilibrium_residual},
         {"iterations", eq.iterations}};
  return {r, scenario_table(p.set, "f", eq.flow.flows, eq.flow.flows)};
}

DesignResult design_for(const RunConfig& config, const Problem& p, std::string& method) {
  if (is_two_parallel_links(p.graph, p.paths)) {
    method = "two-link";
    return design_two_link(p.set, config.design);
  }
  method = "general";
  return design_general(p.set, p.paths, config.design);
}

RunOutput run_design(const RunConfig& config) {
  const auto p = load_problem(config);
  std::string method;
  const auto d = design_for(config, p, method);
  auto r = to_json(d);
  r["program"] = method;
  r["paths"] = to_json(p.paths);
  const auto flows = induced_flow(d.policy, ResponseMatrix::identity(p.paths.paths.size()), p.paths);
  return {r, scenario_table(p.set, "pi", d.policy.pi, flows.flows)};
}

RunOutput run_poa(const RunConfig& config) {
  const auto p = load_problem(config);
  const double so = expected_cost(system_optimum(p.set, p.paths, config.design.solver).flow, p.set);
  const double fi = expected_cost(full_info_ue(p.set, p.paths, config.design.solver).flow, p.set);
  json r{{"system_optimum_cost", so},
         {"full_information_cost", fi},
         {"full_information_poa", cost_ratio(fi, so)}};
  if (config.policy.is_null()) {
    std::string method;
    const auto d = design_for(config, p, method);
    r["policy_source"] = "design";
    r["program"] = method;
    r["policy_cost"] = d.expected_cost;
    r["poa"] = d.poa;
    r["optimal"] = d.optimal;
  } else {
    const auto policy = policy_from_config(config, p);
    const auto eq = bayesian_ue(policy, p.set, p.paths, BayesianOptions{config.design.solver, {}});
    const double cost = expected_cost(eq.flow, p.set);
    r["policy_source"] = "config";
    r["policy_cost"] = cost;
    r["poa"] = cost_ratio(cost, so);
  }
  return {r, std::nullopt};
}

std::optional<Eigen::Vector2d> deterministic_slopes(const ScenarioSet& set) {
  std::optional<Eigen::Vector2d> a;
  for (const auto& s : set.scenarios()) {
    if (s.weight <= 0.0) continue;
    if (!a) {
      a = Eigen::Vector2d(s.a(0), s.a(1));
    } else if ((*a)(0) != s.a(0) || (*a)(1) != s.a(1)) {
      return std::nullopt;
    }
  }
  return a;
}

RunOutput run_check_theorems(const RunConfig& config) {
  const auto p = load_problem(config);
  if (!is_two_parallel_links(p.graph, p.paths)) {
    throw Error(ErrorCode::InvalidArgument, "check-theorems requires two parallel links");
  }
  json r{{"thm1", to_json(thm1_check(p.set))}};
  if (const auto a = deterministic_slopes(p.set)) {
    r["thm2"] = to_json(thm2_check((*a)(0), (*a)(1), p.set));
    const auto polys = thm3_polynomials((*a)(0), (*a)(1));
    r["uniform_prior"] = {{"g_poly", polys.g_poly},
                          {"h_poly", polys.h_poly},
                          {"obedience", to_json(uniform_obedience_exact((*a)(0), (*a)(1)))}};
  }
  PlotTable t;
  t.header = {"scenario", "weight", "a1", "a2", "x", "pi1"};
  for (const auto& s : p.set.scenarios()) {
    const TwoLinkInstance inst{s.a(0), s.a(1), s.x()};
    Cell pi = std::string();
    if (inst.a1 + inst.a2 > 0.0) pi = sys_opt_closed_form(inst);
    t.rows.push_back({static_cast<long long>(s.index), s.weight, inst.a1, inst.a2, inst.x, pi});
  }
  return {r, t};
}

struct SweepPoint {
  double a1 = 0.0;
  double a2 = 0.0;
  ConstraintPolynomials polys;
  UniformObedience lhs;
  std::optional<double> poa;
};

json max_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

RunOutput run_sweep(const RunConfig& config) {
  const auto& spec = *config.sweep;
  std::vector<SweepPoint> points;
  for (double a1 : spec.a1.values()) {
    for (double a2 : spec.a2.values()) {
      if (spec.ordered && a1 > a2) continue;
      points.push_back({a1, a2, {}, {}, std::nullopt});
    }
  }
  auto per_point = config.design;
  per_point.threads = 1;
  parallel_for(points.size(), resolve_thread_count(config.design.threads), [&](std::size_t k) {
    auto& pt = points[k];
    pt.polys = thm3_polynomials(pt.a1, pt.a2);
    pt.lhs = uniform_obedience_exact(pt.a1, pt.a2);
    if (spec.per_point == Command::Design) {
      pt.poa = design_two_link(uniform_b_grid(Eigen::Vector2d(pt.a1, pt.a2), config.grid_n), per_point).poa;
    }
  });

  constexpr double lowest = -std::numeric_limits<double>::infinity();
  double g = lowest, h = lowest, l1 = lowest, l2 = lowest, poa = lowest;
  PlotTable t;
  t.header = {"a1", "a2", "g_poly", "h_poly", "lhs1", "lhs2", "poa"};
  for (const auto& pt : points) {
    g = std::max(g, pt.polys.g_poly);
    h = std::max(h, pt.polys.h_poly);
    l1 = std::max(l1, pt.lhs.lhs1);
    l2 = std::max(l2, pt.lhs.lhs2);
    Cell poa_cell = std::string();
    if (pt.poa) {
      poa = std::max(poa, *pt.poa);
      poa_cell = *pt.poa;
    }
    t.rows.push_back({pt.a1, pt.a2, pt.polys.g_poly, pt.polys.h_poly, pt.lhs.lhs1, pt.lhs.lhs2, poa_cell});
  }
  json r{{"points", points.size()},
         {"per_point", to_string(spec.per_point)},
         {"max_g_poly", max_or_null(g)},
         {"max_h_poly", max_or_null(h)},
         {"max_lhs1", max_or_null(l1)},
         {"max_lhs2", max_or_null(l2)},
         {"polynomials_nonpositive", !(g > 0.0) && !(h > 0.0)},
         {"obedience_nonpositive", !(l1 > 1e-12) && !(l2 > 1e-12)}};
  if (spec.per_point == Command::Design) r["max_poa"] = max_or_null(poa);
  return {r, t};
}

void write_cell(std::ostream& os, const Cell& cell) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          os << std::setprecision(12) << v;
        } else {
          os << v;
        }
      },
      cell);
}

}  // namespace

std::string to_string(Command command) {
  for (const auto& [c, name] : command_names()) {
    if (c == command) return name;
  }
  return "unknown";
}

Command command_from_name(const std::string& name) {
  for (const auto& [c, n] : command_names()) {
    if (n == name) return c;
  }
  parse_error("unknown command '" + name + "'");
}

std::vector<double> Range::values() const {
  std::vector<double> out;
  if (min > max) return out;
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step * (1.0 + 1e-9) + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(min + static_cast<double>(k) * step);
  return out;
}

json RunConfig::to_json() const {
  const auto& s = design.solver;
  json j{{"command", cli::to_string(command)},
         {"graph", graph},
         {"scenarios", scenarios},
         {"policy", policy},
         {"seed", seed},
         {"grid_n", grid_n},
         {"solver",
          {{"tolerance", s.tolerance},
           {"max_iterations", s.max_iterations},
           {"obedience_tolerance", design.obedience_tolerance},
           {"kkt_tolerance", design.kkt_tolerance},
           {"max_outer", design.max_outer},
           {"initial_penalty", design.initial_penalty},
           {"penalty_growth", design.penalty_growth},
           {"restarts", design.restarts},
           {"threads", design.threads}}},
         {"output", {{"plot", plot}}}};
  if (sweep) {
    j["sweep"] = {{"a1", range_to_json(sweep->a1)},
                  {"a2", range_to_json(sweep->a2)},
                  {"command", cli::to_string(sweep->per_point)},
                  {"a1_le_a2", sweep->ordered}};
  }
  return j;
}

RunConfig config_from_json(const json& j, Command command, const Overrides& o) {
  RunConfig c;
  c.command = command;
  try {
    if (!j.is_object()) parse_error("config must be a JSON object");
    reject_unknown_keys(j, {"command", "graph", "scenarios", "policy", "seed", "grid_n", "solver", "sweep", "output"},
                        "config");
    // the command line wins over the file's "command"; only its spelling is checked
    if (j.contains("command")) command_from_name(j.at("command").get<std::string>());
    read_if(j, "graph", c.graph);
    read_if(j, "scenarios", c.scenarios);
    read_if(j, "policy", c.policy);
    read_if(j, "grid_n", c.grid_n);

    std::optional<std::uint64_t> seed;
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    if (!seed && c.scenarios.is_object() && c.scenarios.contains("seed")) {
      seed = c.scenarios.at("seed").get<std::uint64_t>();
    }
    c.seed = o.seed.value_or(seed.value_or(0));

    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      reject_unknown_keys(s, {"tolerance", "max_iterations", "obedience_tolerance", "kkt_tolerance", "max_outer",
                              "initial_penalty", "penalty_growth", "restarts", "threads"},
                          "solver");
      read_if(s, "tolerance", c.design.solver.tolerance);
      read_if(s, "max_iterations", c.design.solver.max_iterations);
      read_if(s, "obedience_tolerance", c.design.obedience_tolerance);
      read_if(s, "kkt_tolerance", c.design.kkt_tolerance);
      read_if(s, "max_outer", c.design.max_outer);
      read_if(s, "initial_penalty", c.design.initial_penalty);
      read_if(s, "penalty_growth", c.design.penalty_growth);
      read_if(s, "restarts", c.design.restarts);
      read_if(s, "threads", c.design.threads);
    }
    if (j.contains("output")) {
      const auto& out = j.at("output");
      reject_unknown_keys(out, {"dir", "plot"}, "output");
      if (out.contains("dir")) c.out_dir = out.at("dir").get<std::string>();
      read_if(out, "plot", c.plot);
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      reject_unknown_keys(s, {"a1", "a2", "command", "a1_le_a2"}, "sweep");
      SweepSpec spec;
      spec.a1 = range_from_json(s.at("a1"), "sweep.a1");
      spec.a2 = range_from_json(s.at("a2"), "sweep.a2");
      if (s.contains("command")) spec.per_point = command_from_name(s.at("command").get<std::string>());
      if (spec.per_point != Command::CheckTheorems && spec.per_point != Command::Design) {
        parse_error("sweep.command must be check-theorems or design");
      }
      read_if(s, "a1_le_a2", spec.ordered);
      c.sweep = spec;
    }
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("config: ") + e.what());
  }

  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.grid_n) c.grid_n = *o.grid_n;
  if (o.restarts) c.design.restarts = *o.restarts;
  if (o.tolerance) c.design.solver.tolerance = *o.tolerance;

  if (!(c.design.solver.tolerance > 0.0)) parse_error("solver.tolerance must be positive");
  if (c.design.solver.max_iterations <= 0) parse_error("solver.max_iterations must be positive");
  if (command == Command::Sweep) {
    if (!c.sweep) parse_error("sweep requires a 'sweep' section");
  } else if (c.scenarios.is_null()) {
    parse_error(cli::to_string(command) + " requires a 'scenarios' section");
  }
  if (c.scenarios.is_object() && c.scenarios.value("kind", "") == "monte-carlo") c.scenarios["seed"] = c.seed;
  c.design.seed = c.seed;
  return c;
}

RunConfig load_config(const std::filesystem::path& file, Command command, const Overrides& overrides) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::FileIO, "cannot read config file '" + file.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error("config '" + file.string() + "': " + e.what());
  }
  return config_from_json(j, command, overrides);
}

RunOutput execute(const RunConfig& config) {
  RunOutput out;
  switch (config.command) {
    case Command::SolveSysopt: out = run_assignment(config, true); break;
    case Command::SolveUe: out = run_assignment(config, false); break;
    case Command::SolveBue: out = run_bue(config); break;
    case Command::Design: out = run_design(config); break;
    case Command::Poa: out = run_poa(config); break;
    case Command::CheckTheorems: out = run_check_theorems(config); break;
    case Command::Sweep: out = run_sweep(config); break;
  }
  out.result = json{{"command", to_string(config.command)},
                    {"config", config.to_json()},
                    {"seed", config.seed},
                    {"result", std::move(out.result)}};
  return out;
}

void write_csv(const PlotTable& table, std::ostream& os) {
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      write_cell(os, row[i]);
    }
    os << '\n';
  }
}

void emit_plot_data(const PlotTable& table, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::FileIO, "cannot write '" + path.string() + "'");
  write_csv(table, os);
  if (!os) throw Error(ErrorCode::FileIO, "write failed for '" + path.string() + "'");
}

std::vector<std::filesystem::path> run(const RunConfig& config) {
  auto out = execute(config);
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw Error(ErrorCode::FileIO, "cannot create '" + config.out_dir.string() + "': " + ec.message());

  out.result["metadata"] = {{"timestamp", timestamp_utc()},
                            {"version", kVersion},
                            {"output_dir", config.out_dir.string()},
                            {"threads", resolve_thread_count(config.design.threads)}};
  std::vector<std::filesystem::path> written;
  const auto result_path = config.out_dir / "result.json";
  {
    std::ofstream os(result_path);
    if (!os) throw Error(ErrorCode::FileIO, "cannot write '" + result_path.string() + "'");
    os << out.result.dump(2) << '\n';
    if (!os) throw Error(ErrorCode::FileIO, "write failed for '" + result_path.string() + "'");
  }
  written.push_back(result_path);
  if (config.plot && out.plot) {
    const auto plot_path = config.out_dir / "plot.csv";
    emit_plot_data(*out.plot, plot_path);
    written.push_back(plot_path);
  }
  return written;
}

int exit_code_for(ErrorCode code) {
  if (code == ErrorCode::FileIO) return 3;
  if (is_solver_error(code)) return 1;
  return 2;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto report = [&](std::string_view code, const std::string& message, int exit_code) {
    err << json{{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}}.dump() << '\n';
    return exit_code;
  };

  CLI::App app{"Information design for Bayesian routing games", "infodesign"};
  std::string command_name;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> grid_n;
  std::optional<std::size_t> restarts;
  std::optional<double> tol;
  std::vector<std::string> names;
  for (const auto& [c, n] : command_names()) names.push_back(n);
  app.add_option("command", command_name, "Command to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--seed", seed, "Seed for sampling and multistart");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--grid-n", grid_n, "Uniform grid resolution")->check(CLI::PositiveNumber);
  app.add_option("--restarts", restarts, "Multistart count for general networks");
  app.add_option("--tol", tol, "Solver tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return report("ConfigParse", e.what(), 2);
  }

  try {
    Overrides o{seed, std::nullopt, grid_n, restarts, tol};
    if (out_dir) o.out_dir = *out_dir;
    const auto config = load_config(config_path, command_from_name(command_name), o);
    for (const auto& path : run(config)) out << path.string() << '\n';
    return 0;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    return report(to_string(e.code()), e.what(), code);
  } catch (const std::exception& e) {
    return report("Internal", e.what(), 1);
  }
}

}  // namespace infodesign::cli
