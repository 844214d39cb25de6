#include "infodesign/network.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "infodesign/error.hpp"

namespace infodesign {

std::size_t Graph::node_index(const std::string& label) const {
  auto it = std::find(nodes_.begin(), nodes_.end(), label);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::UnknownNode, "unknown node '" + label + "'");
  }
  return static_cast<std::size_t>(it - nodes_.begin());
}

Graph build_graph(const std::vector<EdgeSpec>& edges, const std::string& origin,
                  const std::string& destination, const std::vector<std::string>& nodes) {
  if (edges.empty()) {
    throw Error(ErrorCode::InvalidArgument, "graph needs at least one edge");
  }
  if (origin == destination) {
    throw Error(ErrorCode::InvalidArgument, "origin and destination must differ");
  }

  Graph g;
  g.edges_ = edges;
  std::unordered_map<std::string, std::size_t> index;
  auto add_node = [&](const std::string& label) {
    if (index.emplace(label, g.nodes_.size()).second) g.nodes_.push_back(label);
  };
  if (nodes.empty()) {
    for (const auto& e : edges) {
      add_node(e.tail);
      add_node(e.head);
    }
  } else {
    for (const auto& n : nodes) {
      if (index.count(n)) throw Error(ErrorCode::InvalidArgument, "duplicate node '" + n + "'");
      add_node(n);
    }
  }
  auto lookup = [&](const std::string& label) {
    auto it = index.find(label);
    if (it == index.end()) throw Error(ErrorCode::UnknownNode, "unknown node '" + label + "'");
    return it->second;
  };

  std::unordered_set<std::string> ids;
  for (const auto& e : edges) {
    if (!ids.insert(e.id).second) {
      throw Error(ErrorCode::DuplicateEdgeId, "duplicate edge id '" + e.id + "'");
    }
    if (e.tail == e.head) {
      throw Error(ErrorCode::InvalidArgument, "self-loop on edge '" + e.id + "'");
    }
    g.tails_.push_back(lookup(e.tail));
    g.heads_.push_back(lookup(e.head));
  }
  g.origin_ = lookup(origin);
  g.destination_ = lookup(destination);

  const auto n = static_cast<Eigen::Index>(g.nodes_.size());
  const auto m = static_cast<Eigen::Index>(edges.size());
  g.incidence_ = Eigen::MatrixXi::Zero(n, m);
  for (Eigen::Index e = 0; e < m; ++e) {
    g.incidence_(static_cast<Eigen::Index>(g.tails_[e]), e) = 1;
    g.incidence_(static_cast<Eigen::Index>(g.heads_[e]), e) = -1;
  }
  g.demand_ = Eigen::VectorXi::Zero(n);
  g.demand_(static_cast<Eigen::Index>(g.origin_)) = 1;
  g.demand_(static_cast<Eigen::Index>(g.destination_)) = -1;

  // breadth-first reachability
  std::vector<bool> seen(g.nodes_.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(g.origin_);
  seen[g.origin_] = true;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (std::size_t e = 0; e < g.edges_.size(); ++e) {
      if (g.tails_[e] == u && !seen[g.heads_[e]]) {
        seen[g.heads_[e]] = true;
        frontier.push(g.heads_[e]);
      }
    }
  }
  if (!seen[g.destination_]) {
    throw Error(ErrorCode::UnreachableDestination,
                "destination '" + destination + "' is not reachable from '" + origin + "'");
  }
  return g;
}

Graph parallel_links(std::size_t count) {
  std::vector<EdgeSpec> edges;
  for (std::size_t e = 0; e < count; ++e) edges.push_back({std::to_string(e + 1), "o", "d"});
  return build_graph(edges, "o", "d", {"o", "d"});
}

namespace {

struct PathSearch {
  const Graph& graph;
  std::size_t cap;
  std::vector<std::vector<std::size_t>> out_edges;
  std::vector<bool> on_path;
  std::vector<std::size_t> current;
  std::vector<std::vector<std::size_t>> found;

  void visit(std::size_t node) {
    if (node == graph.destination()) {
      if (found.size() >= cap) {
        throw Error(ErrorCode::PathExplosion,
                    "more than " + std::to_string(cap) + " simple o-d paths");
      }
      found.push_back(current);
      return;
    }
    on_path[node] = true;
    for (auto e : out_edges[node]) {
      const auto next = graph.head(e);
      if (on_path[next]) continue;
      current.push_back(e);
      visit(next);
      current.pop_back();
    }
    on_path[node] = false;
  }
};

}  // namespace

PathSet enumerate_paths(const Graph& graph, std::size_t cap) {
  PathSearch search{graph, cap, {}, {}, {}, {}};
  search.out_edges.resize(graph.num_nodes());
  for (std::size_t e = 0; e < graph.num_edges(); ++e) search.out_edges[graph.tail(e)].push_back(e);
  search.on_path.assign(graph.num_nodes(), false);
  search.visit(graph.origin());

  PathSet ps;
  ps.paths = std::move(search.found);
  ps.incidence = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(graph.num_edges()),
                                       static_cast<Eigen::Index>(ps.paths.size()));
  for (std::size_t i = 0; i < ps.paths.size(); ++i) {
    for (auto e : ps.paths[i]) {
      ps.incidence(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(i)) = 1.0;
    }
  }
  return ps;
}

Eigen::VectorXd flow_from_path_flow(const PathSet& paths, const Eigen::VectorXd& path_flow) {
  if (static_cast<std::size_t>(path_flow.size()) != paths.num_paths()) {
    throw Error(ErrorCode::DimensionMismatch, "path flow has " + std::to_string(path_flow.size()) +
                                                  " entries, expected " +
                                                  std::to_string(paths.num_paths()));
  }
  return paths.incidence * path_flow;
}

double conservation_residual(const Graph& graph, const Eigen::VectorXd& link_flow) {
  if (static_cast<std::size_t>(link_flow.size()) != graph.num_edges()) {
    throw Error(ErrorCode::DimensionMismatch, "link flow dimension mismatch");
  }
  const Eigen::VectorXd r =
      graph.node_link_incidence().cast<double>() * link_flow - graph.demand().cast<double>();
  return r.cwiseAbs().maxCoeff();
}

}  // namespace infodesign
