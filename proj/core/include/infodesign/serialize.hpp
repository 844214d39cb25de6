#pragma once

#include <cstdint>
#include <optional>

#include <nlohmann/json.hpp>

#include "infodesign/design.hpp"
#include "infodesign/equilibrium.hpp"
#include "infodesign/network.hpp"
#include "infodesign/scenarios.hpp"
#include "infodesign/twolink.hpp"

namespace infodesign {

/// {"nodes": [...], "edges": [{"id", "tail", "head"}], "origin", "destination"}.
/// Labels may be strings or integers. Malformed input throws ConfigParse.
Graph graph_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Graph& graph);

/// {"kind": "discrete", "scenarios": [{"weight", "a", "b"}]}
/// {"kind": "uniform-grid", "a": [a1, a2], "n": N}
/// {"kind": "monte-carlo", "n": N, "seed": S, "sampler": {...}}
/// where the sampler is {"type": "uniform-box", "a_low", "a_high", "b_low",
/// "b_high"} or {"type": "independent-product", "a": [law...], "b": [law...]}
/// and a law is {"dist": "constant"|"uniform"|"exponential"|"discrete", ...}.
/// `seed_override` replaces the file's seed for monte-carlo sets.
ScenarioSet scenario_set_from_json(const nlohmann::json& j,
                                   const std::optional<std::uint64_t>& seed_override = {});
SamplerSpec sampler_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Provenance& provenance);
nlohmann::json to_json(const PathSet& paths);
nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const ObedienceReport& report);
/// Policy table (scenario -> path distribution), costs, PoA, residual matrix
/// and solver diagnostics.
nlohmann::json to_json(const DesignResult& result);
nlohmann::json to_json(const TheoremVerdict& verdict);
nlohmann::json to_json(const UniformObedience& integrals);

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

}  // namespace infodesign
