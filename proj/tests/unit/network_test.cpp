#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "infodesign/error.hpp"
#include "infodesign/network.hpp"
#include "oracles.hpp"

using namespace infodesign;

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

TEST(Network, ParallelLinksIncidence) {
  const auto g = parallel_links(2);
  Eigen::MatrixXi b(2, 2);
  b << 1, 1, -1, -1;
  EXPECT_EQ(g.node_link_incidence(), b);
  EXPECT_EQ(g.demand(), Eigen::Vector2i(1, -1));
}

TEST(Network, SingleLink) {
  const auto g = build_graph({{"e", "o", "d"}}, "o", "d");
  Eigen::MatrixXi b(2, 1);
  b << 1, -1;
  EXPECT_EQ(g.node_link_incidence(), b);
  const auto paths = enumerate_paths(g);
  ASSERT_EQ(paths.num_paths(), 1u);
  EXPECT_EQ(paths.incidence(0, 0), 1.0);
}

TEST(Network, IncidenceColumnsHaveOnePlusAndOneMinus) {
  const auto g = fixtures::wheatstone();
  const auto& b = g.node_link_incidence();
  for (Eigen::Index e = 0; e < b.cols(); ++e) {
    EXPECT_EQ((b.col(e).array() == 1).count(), 1);
    EXPECT_EQ((b.col(e).array() == -1).count(), 1);
    EXPECT_EQ((b.col(e).array() == 0).count(), b.rows() - 2);
  }
}

TEST(Network, TwoParallelLinksGiveIdentity) {
  const auto paths = enumerate_paths(parallel_links(2));
  EXPECT_EQ(paths.incidence, Eigen::MatrixXd::Identity(2, 2));
}

TEST(Network, WheatstoneMatchesBruteForceEnumeration) {
  const auto g = fixtures::wheatstone();
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : g.edges()) edges.emplace_back(e.tail, e.head);
  const auto expected = oracle::simple_paths(edges, "o", "d");
  const auto paths = enumerate_paths(g);
  ASSERT_EQ(paths.num_paths(), 3u);
  EXPECT_EQ(paths.paths, expected);
  for (std::size_t i = 0; i < paths.num_paths(); ++i) {
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const bool on = std::find(expected[i].begin(), expected[i].end(), e) != expected[i].end();
      EXPECT_EQ(paths.incidence(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(i)), on ? 1.0 : 0.0);
    }
  }
}

TEST(Network, EnumerationOnRandomDagsMatchesOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 4;
    std::vector<EdgeSpec> edges;
    std::vector<std::pair<std::string, std::string>> plain;
    std::bernoulli_distribution keep(0.6);
    // chain guarantees reachability; extra edges in both directions create cycles
    for (int v = 0; v + 1 < n; ++v) {
      edges.push_back({std::to_string(edges.size()), std::to_string(v), std::to_string(v + 1)});
    }
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        if (u != v && keep(rng)) edges.push_back({std::to_string(edges.size()), std::to_string(u), std::to_string(v)});
      }
    }
    for (const auto& e : edges) plain.emplace_back(e.tail, e.head);
    const auto g = build_graph(edges, "0", std::to_string(n - 1));
    const auto expected = oracle::simple_paths(plain, "0", std::to_string(n - 1));
    const auto first = enumerate_paths(g);
    EXPECT_EQ(first.paths, expected);
    EXPECT_EQ(enumerate_paths(g).paths, first.paths);  // deterministic
  }
}

TEST(Network, PathsAreSimple) {
  const auto g = fixtures::wheatstone();
  for (const auto& p : enumerate_paths(g).paths) {
    std::vector<std::size_t> seen{g.origin()};
    for (std::size_t e : p) {
      EXPECT_EQ(g.tail(e), seen.back());
      EXPECT_EQ(std::count(seen.begin(), seen.end(), g.head(e)), 0);
      seen.push_back(g.head(e));
    }
    EXPECT_EQ(seen.back(), g.destination());
  }
}

TEST(Network, FlowFromPathFlow) {
  const auto two = enumerate_paths(parallel_links(2));
  EXPECT_TRUE(flow_from_path_flow(two, fixtures::vec({0.5, 0.5})).isApprox(fixtures::vec({0.5, 0.5})));
  EXPECT_EQ(flow_from_path_flow(two, fixtures::vec({1.0, 0.0})), two.incidence.col(0));

  const auto g = fixtures::wheatstone();
  const auto paths = enumerate_paths(g);
  const auto f = flow_from_path_flow(paths, Eigen::VectorXd::Constant(3, 1.0 / 3.0));
  EXPECT_NEAR(f(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(f(4), 2.0 / 3.0, 1e-15);
  EXPECT_LE(conservation_residual(g, f), 1e-12);

  EXPECT_EQ(code_of([&] { flow_from_path_flow(paths, fixtures::vec({1.0, 0.0})); }), ErrorCode::DimensionMismatch);
}

TEST(Network, ConservationHoldsForRandomPathFlows) {
  std::mt19937_64 rng(5);
  const auto g = fixtures::wheatstone();
  const auto paths = enumerate_paths(g);
  for (int t = 0; t < 200; ++t) {
    const auto z = oracle::dirichlet(rng, paths.num_paths());
    const auto f = flow_from_path_flow(paths, Eigen::Map<const Eigen::VectorXd>(z.data(), 3));
    EXPECT_LE(conservation_residual(g, f), 1e-12);
    EXPECT_GE(f.minCoeff(), 0.0);
  }
}

TEST(Network, Errors) {
  EXPECT_EQ(code_of([] { build_graph({{"1", "o", "u"}, {"2", "v", "d"}}, "o", "d"); }),
            ErrorCode::UnreachableDestination);
  EXPECT_EQ(code_of([] { build_graph({{"1", "o", "d"}, {"1", "o", "d"}}, "o", "d"); }), ErrorCode::DuplicateEdgeId);
  EXPECT_EQ(code_of([] { build_graph({{"1", "o", "d"}}, "o", "x"); }), ErrorCode::UnknownNode);
  EXPECT_EQ(code_of([] { build_graph({}, "o", "d"); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { build_graph({{"1", "o", "d"}}, "o", "o"); }), ErrorCode::InvalidArgument);
}

TEST(Network, PathCap) {
  // k stages of two parallel links give 2^k paths
  std::vector<EdgeSpec> edges;
  const int stages = 12;
  for (int s = 0; s < stages; ++s) {
    for (int c = 0; c < 2; ++c) {
      edges.push_back({std::to_string(2 * s + c), "n" + std::to_string(s), "n" + std::to_string(s + 1)});
    }
  }
  const auto g = build_graph(edges, "n0", "n" + std::to_string(stages));
  EXPECT_EQ(enumerate_paths(g).num_paths(), 4096u);
  EXPECT_EQ(code_of([&] { enumerate_paths(g, 4095); }), ErrorCode::PathExplosion);
}
