#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fluct/graph.hpp"
#include "fluct/ingest.hpp"

namespace fluct::testing {

inline Timestamp at(const char* iso) { return *parse_timestamp(iso); }

inline PostRecord post(std::string id, std::string thread, std::string user, const char* iso,
                       std::string body = "") {
  return {std::move(id), std::move(thread), std::move(user), at(iso), std::move(body)};
}

inline std::string node_name(std::size_t i) {
  std::string s = std::to_string(i);
  return "n" + std::string(3 - s.size(), '0') + s;
}

/// Graph from an index edge list over nodes n000..n{n-1}.
inline InteractionGraph graph_of(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                 std::size_t snapshot = 0) {
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(node_name(i));
  std::vector<InteractionGraph::NamedEdge> named;
  for (auto [a, b] : edges) named.push_back({node_name(a), node_name(b), 1});
  return InteractionGraph::from_parts(snapshot, nodes, named);
}

inline InteractionGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (coin(rng) < p) edges.emplace_back(a, b);
    }
  }
  return graph_of(n, edges);
}

/// Two triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline InteractionGraph two_triangles_with_bridge() {
  return graph_of(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}});
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fluct_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fluct::testing
