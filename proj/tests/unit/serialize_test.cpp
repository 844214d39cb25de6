#include <gtest/gtest.h>

#include "infodesign/error.hpp"
#include "infodesign/serialize.hpp"

using namespace infodesign;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Serialize, GraphWithIntegerLabels) {
  const auto j = json::parse(R"({"nodes": [1, 2, 3], "origin": 1, "destination": 3,
      "edges": [{"id": 10, "tail": 1, "head": 2}, {"id": 11, "tail": 2, "head": 3}, {"id": 12, "tail": 1, "head": 3}]})");
  const auto g = graph_from_json(j);
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_EQ(g.edges()[0].id, "10");
  EXPECT_EQ(enumerate_paths(g).num_paths(), 2u);
  EXPECT_EQ(graph_from_json(to_json(g)).node_link_incidence(), g.node_link_incidence());
}

TEST(Serialize, GraphErrors) {
  EXPECT_EQ(code_of([] { graph_from_json(json::parse(R"({"origin": "o", "destination": "d"})")); }),
            ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] {
              graph_from_json(json::parse(R"({"origin": "o", "destination": "d", "edges": [{"tail": "o", "head": 1.5}]})"));
            }),
            ErrorCode::ConfigParse);
}

TEST(Serialize, ScenarioKinds) {
  const auto d = scenario_set_from_json(json::parse(
      R"({"kind": "discrete", "scenarios": [{"weight": 1, "a": [1, 0], "b": [0, 1]}, {"weight": 3, "a": [1, 1], "b": [0, 0]}]})"));
  EXPECT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[1].weight, 0.75);

  const auto g = scenario_set_from_json(json::parse(R"({"kind": "uniform-grid", "a": [0.5, 0.25], "n": 3})"));
  EXPECT_EQ(g.size(), 9u);
  EXPECT_EQ(g.provenance().kind, ProvenanceKind::UniformGrid);

  const auto mc_json = json::parse(R"({"kind": "monte-carlo", "n": 5, "seed": 4,
      "sampler": {"type": "uniform-box", "a_low": [0, 0], "a_high": [1, 1], "b_low": [0, 0], "b_high": [1, 1]}})");
  const auto mc = scenario_set_from_json(mc_json);
  EXPECT_EQ(mc.provenance().seed, 4u);
  EXPECT_EQ(scenario_set_from_json(mc_json, 9).provenance().seed, 9u);
  EXPECT_EQ(scenario_set_from_json(mc_json)[2].b, mc[2].b);

  const auto product = scenario_set_from_json(json::parse(R"({"kind": "monte-carlo", "n": 3,
      "sampler": {"type": "independent-product",
                  "a": [{"dist": "constant", "value": 1}, {"dist": "exponential", "rate": 2}],
                  "b": [{"dist": "discrete", "values": [0, 1], "probs": [0.5, 0.5]}, {"dist": "uniform", "low": 0, "high": 2}]}})"));
  EXPECT_EQ(product[0].a(0), 1.0);
}

TEST(Serialize, ScenarioErrors) {
  EXPECT_EQ(code_of([] { scenario_set_from_json(json::parse(R"({"kind": "histogram"})")); }), ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { scenario_set_from_json(json::parse(R"({"kind": "uniform-grid", "a": [1, 1], "n": -2})")); }),
            ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] {
              scenario_set_from_json(json::parse(R"({"kind": "monte-carlo", "n": 2,
                  "sampler": {"type": "independent-product", "a": [{"dist": "cauchy"}], "b": [{"dist": "cauchy"}]}})"));
            }),
            ErrorCode::UnsupportedDistribution);
  EXPECT_EQ(code_of([] { scenario_set_from_json(json::parse(R"({"kind": "discrete", "scenarios": []})")); }),
            ErrorCode::EmptySpec);
}

TEST(Serialize, NonFiniteBecomesNull) {
  Eigen::VectorXd v(2);
  v << 1.0, std::numeric_limits<double>::infinity();
  const auto j = to_json(v);
  EXPECT_TRUE(j[1].is_null());
  EXPECT_EQ(matrix_from_json(json::parse("[[1, 2], [3, 4]]"))(1, 0), 3.0);
}
