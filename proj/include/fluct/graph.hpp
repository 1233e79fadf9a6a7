#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluct/ingest.hpp"
#include "fluct/timestamp.hpp"

namespace fluct {

struct SnapshotWindow {
  std::size_t index = 0;
  Timestamp start;  // inclusive
  Timestamp end;    // exclusive

  bool contains(Timestamp t) const { return start <= t && t < end; }
  bool operator==(const SnapshotWindow&) const = default;
};

/// Fixed-width windows anchored at first_post. Window i covers
/// [first + i*days, first + (i+1)*days). Throws std::invalid_argument for
/// window_days <= 0 or last < first.
std::vector<SnapshotWindow> build_windows(Timestamp first_post, Timestamp last_post,
                                          int window_days);

/// floor(days since first / window_days); t must not precede first.
std::size_t window_index_of(Timestamp first_post, Timestamp t, int window_days);

struct WeightedEdge {
  std::size_t a = 0;  // node index, a < b
  std::size_t b = 0;
  int weight = 0;     // distinct shared threads

  bool operator==(const WeightedEdge&) const = default;
};

/// Undirected co-participation graph of one snapshot. Nodes are kept in
/// ascending user_id order so node indices are stable across runs.
class InteractionGraph {
 public:
  InteractionGraph() = default;

  /// Builds from explicit parts. Edges are given by user id; duplicates,
  /// self-loops, unknown endpoints and non-positive weights are rejected.
  struct NamedEdge {
    std::string a;
    std::string b;
    int weight = 1;
  };
  static InteractionGraph from_parts(std::size_t snapshot_index,
                                     std::vector<std::string> nodes,
                                     const std::vector<NamedEdge>& edges);

  std::size_t snapshot_index() const { return snapshot_index_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& node(std::size_t i) const { return nodes_[i]; }
  std::optional<std::size_t> index_of(std::string_view user) const;
  bool has_node(std::string_view user) const { return index_of(user).has_value(); }

  /// Sorted neighbor indices.
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_[i]; }
  const std::vector<std::vector<std::size_t>>& adjacency() const { return adjacency_; }

  /// Sorted by (a, b).
  const std::vector<WeightedEdge>& edges() const { return edges_; }
  bool adjacent(std::size_t a, std::size_t b) const;

  /// 0 when the pair is not connected.
  int weight(std::string_view a, std::string_view b) const;

 private:
  std::size_t snapshot_index_ = 0;
  std::vector<std::string> nodes_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<WeightedEdge> edges_;
};

InteractionGraph build_graph(const std::vector<PostRecord>& posts, const SnapshotWindow& window);

/// One graph per window, bucketing posts once.
std::vector<InteractionGraph> build_all_graphs(const std::vector<PostRecord>& posts,
                                               const std::vector<SnapshotWindow>& windows);

using UserScores = std::map<std::string, double, std::less<>>;

/// Closeness with component-size correction: (r/(n-1)) * (r / sum of
/// distances) over the r nodes reachable from u; 0 for isolated nodes.
UserScores closeness_all(const InteractionGraph& graph);

/// Unnormalized shortest-path betweenness on the unweighted graph, halved
/// for undirectedness.
UserScores betweenness_all(const InteractionGraph& graph);

/// Index-aligned variants of the above.
std::vector<double> closeness_by_index(const InteractionGraph& graph);
std::vector<double> betweenness_by_index(const InteractionGraph& graph);

struct CentralityScores {
  std::size_t snapshot_index = 0;
  UserScores closeness;
  UserScores betweenness;
};

CentralityScores centrality_scores(const InteractionGraph& graph);

/// CSV edge list: snapshot_index,user_a,user_b,weight with user_a < user_b.
void write_edge_list(std::ostream& out, const InteractionGraph& graph, bool header = true);

}  // namespace fluct
