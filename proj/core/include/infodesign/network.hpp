#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace infodesign {

struct EdgeSpec {
  std::string id;
  std::string tail;
  std::string head;
};

/// Directed multigraph with a single origin-destination pair.
///
/// Node and edge order follow the construction input; edge index e is the
/// position in the edge list. Immutable once built.
class Graph {
 public:
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t origin() const { return origin_; }
  std::size_t destination() const { return destination_; }
  std::size_t tail(std::size_t e) const { return tails_[e]; }
  std::size_t head(std::size_t e) const { return heads_[e]; }

  /// Node-link incidence: +1 at the tail, -1 at the head of every edge.
  const Eigen::MatrixXi& node_link_incidence() const { return incidence_; }
  /// delta(o) - delta(d).
  const Eigen::VectorXi& demand() const { return demand_; }

  std::size_t node_index(const std::string& label) const;

 private:
  friend Graph build_graph(const std::vector<EdgeSpec>&, const std::string&, const std::string&,
                           const std::vector<std::string>&);

  std::vector<std::string> nodes_;
  std::vector<EdgeSpec> edges_;
  std::vector<std::size_t> tails_;
  std::vector<std::size_t> heads_;
  std::size_t origin_ = 0;
  std::size_t destination_ = 0;
  Eigen::MatrixXi incidence_;
  Eigen::VectorXi demand_;
};

/// Builds the graph, its incidence matrix and demand vector.
///
/// `nodes` may be empty, in which case nodes are collected in order of first
/// appearance along the edge list. Throws UnknownNode, DuplicateEdgeId,
/// UnreachableDestination or InvalidArgument.
Graph build_graph(const std::vector<EdgeSpec>& edges, const std::string& origin,
                  const std::string& destination, const std::vector<std::string>& nodes = {});

/// Two nodes "o", "d" and `count` parallel links o -> d with ids "1".."count".
Graph parallel_links(std::size_t count);

inline constexpr std::size_t kDefaultPathCap = 10000;

/// Simple o-d paths with their link-path incidence matrix.
struct PathSet {
  /// Edge-index sequence of every path, in lexicographic order.
  std::vector<std::vector<std::size_t>> paths;
  /// links x paths, A(e, i) = 1 iff link e lies on path i.
  Eigen::MatrixXd incidence;

  std::size_t num_paths() const { return paths.size(); }
  std::size_t num_links() const { return static_cast<std::size_t>(incidence.rows()); }
};

/// Depth-first enumeration of all simple o-d paths, out-edges visited by
/// increasing edge index. Throws PathExplosion once more than `cap` paths exist.
PathSet enumerate_paths(const Graph& graph, std::size_t cap = kDefaultPathCap);

/// Link flow f = A z induced by the path flow z.
Eigen::VectorXd flow_from_path_flow(const PathSet& paths, const Eigen::VectorXd& path_flow);

/// max |B f - nu|.
double conservation_residual(const Graph& graph, const Eigen::VectorXd& link_flow);

}  // namespace infodesign
