#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fluct/graph.hpp"

namespace fluct {

struct Community {
  std::size_t snapshot_index = 0;
  std::size_t community_id = 0;
  std::vector<std::string> members;  // ascending

  bool contains(std::string_view user) const;
  bool operator==(const Community&) const = default;
};

struct PropinquityConfig {
  int alpha = 1;  // cut edges at or below
  int beta = 3;   // insert non-edges at or above
  int max_iterations = 20;
  std::size_t min_community_size = 3;

  /// Throws std::invalid_argument when the thresholds or limits are unusable.
  void validate() const;
};

/// Mutable undirected topology over a fixed node set, with sorted adjacency.
class Topology {
 public:
  explicit Topology(std::size_t node_count = 0) : adjacency_(node_count) {}
  static Topology from_graph(const InteractionGraph& graph);

  std::size_t node_count() const { return adjacency_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t u) const { return adjacency_[u]; }
  bool adjacent(std::size_t u, std::size_t v) const;
  std::size_t edge_count() const;

  /// Canonical (u < v) edge list, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edge_list() const;

  void add_edge(std::size_t u, std::size_t v);

  bool operator==(const Topology&) const = default;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Adjacency (0/1) plus the number of common neighbors.
int propinquity(const Topology& topology, std::size_t u, std::size_t v);
int propinquity(const InteractionGraph& graph, std::string_view u, std::string_view v);

/// One synchronous cut/insert step: edges with propinquity <= alpha are
/// removed and non-edges with propinquity >= beta are added, with every
/// score evaluated on the input topology.
Topology propinquity_step(const Topology& topology, int alpha, int beta);

struct PropinquityTrace {
  Topology final_topology;
  int iterations = 0;
  bool converged = false;
  bool cycled = false;
};

PropinquityTrace run_propinquity_dynamics(const InteractionGraph& graph,
                                          const PropinquityConfig& config);

/// Connected components of the converged topology with at least
/// min_community_size members, numbered by ascending smallest member.
std::vector<Community> detect_communities(const InteractionGraph& graph,
                                          const PropinquityConfig& config);

/// Newman-Girvan modularity over unweighted edges. Nodes outside every
/// community count as singletons. Overlapping communities or members not in
/// the graph throw std::invalid_argument.
double modularity(const InteractionGraph& graph, const std::vector<Community>& communities);

/// CSV snapshot_index,community_id,user_id sorted by all three columns.
void write_communities(std::ostream& out, const std::vector<Community>& communities,
                       bool header = true);

}  // namespace fluct
