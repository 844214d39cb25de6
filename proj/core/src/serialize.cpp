#include "infodesign/serialize.hpp"

#include <cmath>
#include <string>

#include "infodesign/error.hpp"

namespace infodesign {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ConfigParse, what); }

const json& require(const json& j, const char* key, const std::string& context) {
  if (!j.is_object() || !j.contains(key)) parse_error(context + ": missing '" + key + "'");
  return j.at(key);
}

std::string label(const json& j, const std::string& context) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  parse_error(context + ": labels must be strings or integers");
}

double number(const json& j, const std::string& context) {
  if (!j.is_number()) parse_error(context + ": expected a number");
  return j.get<double>();
}

Eigen::VectorXd vector(const json& j, const std::string& context) {
  if (!j.is_array()) parse_error(context + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], context);
  return v;
}

std::size_t count(const json& j, const std::string& context) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    parse_error(context + ": expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

// JSON has no NaN/inf; encode non-finite doubles as null
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Distribution law_from_json(const json& j, const std::string& context) {
  const auto name = require(j, "dist", context).get<std::string>();
  switch (Distribution::kind_from_name(name)) {
    case Distribution::Kind::Constant:
      return Distribution::constant(number(require(j, "value", context), context));
    case Distribution::Kind::Uniform:
      return Distribution::uniform(number(require(j, "low", context), context),
                                   number(require(j, "high", context), context));
    case Distribution::Kind::Exponential:
      return Distribution::exponential(number(require(j, "rate", context), context));
    case Distribution::Kind::Discrete: {
      const auto values = vector(require(j, "values", context), context);
      const auto probs = vector(require(j, "probs", context), context);
      return Distribution::discrete({values.data(), values.data() + values.size()},
                                    {probs.data(), probs.data() + probs.size()});
    }
  }
  parse_error(context + ": unreachable distribution kind");
}

}  // namespace

Graph graph_from_json(const json& j) {
  const std::string ctx = "graph";
  const auto& edges_json = require(j, "edges", ctx);
  if (!edges_json.is_array()) parse_error("graph: 'edges' must be an array");
  std::vector<EdgeSpec> edges;
  for (std::size_t e = 0; e < edges_json.size(); ++e) {
    const auto& ej = edges_json[e];
    const std::string ectx = "graph.edges[" + std::to_string(e) + "]";
    const std::string id = ej.contains("id") ? label(ej.at("id"), ectx) : std::to_string(e + 1);
    edges.push_back({id, label(require(ej, "tail", ectx), ectx), label(require(ej, "head", ectx), ectx)});
  }
  std::vector<std::string> nodes;
  if (j.contains("nodes")) {
    if (!j.at("nodes").is_array()) parse_error("graph: 'nodes' must be an array");
    for (const auto& n : j.at("nodes")) nodes.push_back(label(n, "graph.nodes"));
  }
  return build_graph(edges, label(require(j, "origin", ctx), ctx),
                     label(require(j, "destination", ctx), ctx), nodes);
}

json to_json(const Graph& graph) {
  json edges = json::array();
  for (const auto& e : graph.edges()) edges.push_back({{"id", e.id}, {"tail", e.tail}, {"head", e.head}});
  return {{"nodes", graph.nodes()},
          {"edges", edges},
          {"origin", graph.nodes()[graph.origin()]},
          {"destination", graph.nodes()[graph.destination()]}};
}

SamplerSpec sampler_from_json(const json& j) {
  const std::string ctx = "scenarios.sampler";
  const auto type = require(j, "type", ctx).get<std::string>();
  if (type == "uniform-box") {
    return SamplerSpec::uniform_box(vector(require(j, "a_low", ctx), ctx),
                                    vector(require(j, "a_high", ctx), ctx),
                                    vector(require(j, "b_low", ctx), ctx),
                                    vector(require(j, "b_high", ctx), ctx));
  }
  if (type == "independent-product") {
    SamplerSpec spec;
    for (const auto& law : require(j, "a", ctx)) spec.a.push_back(law_from_json(law, ctx + ".a"));
    for (const auto& law : require(j, "b", ctx)) spec.b.push_back(law_from_json(law, ctx + ".b"));
    return spec;
  }
  throw Error(ErrorCode::UnsupportedDistribution, "unsupported sampler type '" + type + "'");
}

ScenarioSet scenario_set_from_json(const json& j, const std::optional<std::uint64_t>& seed_override) {
  const std::string ctx = "scenarios";
  const auto kind = require(j, "kind", ctx).get<std::string>();
  if (kind == "discrete") {
    std::vector<DiscreteEntry> entries;
    const auto& list = require(j, "scenarios", ctx);
    if (!list.is_array()) parse_error("scenarios.scenarios must be an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string sctx = "scenarios.scenarios[" + std::to_string(k) + "]";
      const double w = list[k].contains("weight") ? number(list[k].at("weight"), sctx) : 1.0;
      entries.push_back({w, vector(require(list[k], "a", sctx), sctx),
                         vector(require(list[k], "b", sctx), sctx)});
    }
    return from_discrete_spec(entries);
  }
  if (kind == "uniform-grid") {
    const auto a = vector(require(j, "a", ctx), ctx);
    if (a.size() != 2) parse_error("scenarios.a must hold two slopes");
    return uniform_b_grid(Eigen::Vector2d(a(0), a(1)), count(require(j, "n", ctx), ctx));
  }
  if (kind == "monte-carlo") {
    const auto n = count(require(j, "n", ctx), ctx);
    std::uint64_t seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
    if (seed_override) seed = *seed_override;
    return monte_carlo(sampler_from_json(require(j, "sampler", ctx)), n, seed);
  }
  parse_error("scenarios: unknown kind '" + kind + "'");
}

json to_json(const Provenance& p) {
  json j{{"kind", to_string(p.kind)}, {"n", p.n}};
  if (p.kind == ProvenanceKind::MonteCarlo) {
    j["seed"] = p.seed;
    j["rng"] = p.rng;
  }
  return j;
}

json to_json(const PathSet& paths) {
  json j = json::array();
  for (const auto& p : paths.paths) j.push_back(p);
  return j;
}

json to_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(finite_or_null(v(i)));
  return j;
}

json to_json(const Eigen::MatrixXd& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  return j;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) parse_error("expected a nonempty array of rows");
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) parse_error("matrix rows must have equal length");
    m.row(static_cast<Eigen::Index>(r)) = vector(j[r], "matrix").transpose();
  }
  return m;
}

json to_json(const ObedienceReport& report) {
  return {{"residuals", to_json(report.residuals)},
          {"max_violation", report.max_violation},
          {"marginals", to_json(report.marginals)}};
}

json to_json(const DesignResult& r) {
  const auto& d = r.diagnostics;
  return {{"policy", to_json(r.policy.pi)},
          {"expected_cost", r.expected_cost},
          {"algebraic_objective", finite_or_null(r.algebraic_objective)},
          {"system_optimum_cost", r.system_optimum_cost},
          {"full_information_cost", r.full_information_cost},
          {"poa", r.poa},
          {"optimal", r.optimal},
          {"obedience", to_json(r.obedience)},
          {"diagnostics",
           {{"method", d.method},
            {"selected", d.selected},
            {"outer_iterations", d.outer_iterations},
            {"inner_iterations", d.inner_iterations},
            {"kkt_residual", d.kkt_residual},
            {"max_violation", d.max_violation},
            {"multipliers", to_json(d.multipliers)},
            {"restarts", d.restarts},
            {"feasible_restarts", d.feasible_restarts},
            {"best_restart", d.best_restart},
            {"kkt_certified", d.kkt_certified},
            {"fallback_used", d.fallback_used}}}};
}

json to_json(const TheoremVerdict& v) {
  return {{"support_ok", v.support_ok},
          {"moment1", v.moment1},
          {"moment2", v.moment2},
          {"variance_slack1", v.variance_slack1},
          {"variance_slack2", v.variance_slack2},
          {"forms_agree", v.forms_agree},
          {"conclusion", to_string(v.conclusion)}};
}

json to_json(const UniformObedience& u) {
  return {{"lhs1", u.lhs1}, {"lhs2", u.lhs2}, {"case", u.region_case}, {"swapped", u.swapped}};
}

}  // namespace infodesign
