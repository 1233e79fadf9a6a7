#include "fluct/graph.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <stdexcept>

#include "fluct/csv.hpp"

namespace fluct {

std::vector<SnapshotWindow> build_windows(Timestamp first_post, Timestamp last_post,
                                          int window_days) {
  if (window_days <= 0) throw std::invalid_argument("window_days must be positive");
  if (last_post < first_post) throw std::invalid_argument("last_post precedes first_post");
  const std::size_t count = window_index_of(first_post, last_post, window_days) + 1;
  const std::chrono::days width{window_days};
  std::vector<SnapshotWindow> windows;
  windows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Timestamp start = first_post + width * static_cast<long>(i);
    windows.push_back({i, start, start + width});
  }
  return windows;
}

std::size_t window_index_of(Timestamp first_post, Timestamp t, int window_days) {
  if (window_days <= 0) throw std::invalid_argument("window_days must be positive");
  if (t < first_post) throw std::invalid_argument("timestamp precedes corpus start");
  const auto elapsed = (t - first_post).count();
  return static_cast<std::size_t>(elapsed / (86400L * window_days));
}

InteractionGraph InteractionGraph::from_parts(std::size_t snapshot_index,
                                              std::vector<std::string> nodes,
                                              const std::vector<NamedEdge>& edges) {
  InteractionGraph g;
  g.snapshot_index_ = snapshot_index;
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    throw std::invalid_argument("duplicate node");
  }
  g.nodes_ = std::move(nodes);
  g.adjacency_.assign(g.nodes_.size(), {});

  for (const auto& e : edges) {
    auto a = g.index_of(e.a), b = g.index_of(e.b);
    if (!a || !b) throw std::invalid_argument("edge endpoint is not a node: " + e.a + "-" + e.b);
    if (*a == *b) throw std::invalid_argument("self-loop on " + e.a);
    if (e.weight < 1) throw std::invalid_argument("edge weight must be >= 1");
    auto [lo, hi] = std::minmax(*a, *b);
    g.edges_.push_back({lo, hi, e.weight});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const WeightedEdge& x, const WeightedEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  for (std::size_t i = 1; i < g.edges_.size(); ++i) {
    if (g.edges_[i].a == g.edges_[i - 1].a && g.edges_[i].b == g.edges_[i - 1].b) {
      throw std::invalid_argument("duplicate edge " + g.nodes_[g.edges_[i].a] + "-" +
                                  g.nodes_[g.edges_[i].b]);
    }
  }
  for (const auto& e : g.edges_) {
    g.adjacency_[e.a].push_back(e.b);
    g.adjacency_[e.b].push_back(e.a);
  }
  for (auto& list : g.adjacency_) std::sort(list.begin(), list.end());
  return g;
}

std::optional<std::size_t> InteractionGraph::index_of(std::string_view user) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), user);
  if (it == nodes_.end() || *it != user) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

bool InteractionGraph::adjacent(std::size_t a, std::size_t b) const {
  const auto& list = adjacency_[a];
  return std::binary_search(list.begin(), list.end(), b);
}

int InteractionGraph::weight(std::string_view a, std::string_view b) const {
  auto ia = index_of(a), ib = index_of(b);
  if (!ia || !ib || *ia == *ib) return 0;
  auto [lo, hi] = std::minmax(*ia, *ib);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(lo, hi),
                             [](const WeightedEdge& e, const std::pair<std::size_t, std::size_t>& k) {
                               return std::tie(e.a, e.b) < std::tie(k.first, k.second);
                             });
  if (it == edges_.end() || it->a != lo || it->b != hi) return 0;
  return it->weight;
}

namespace {

InteractionGraph graph_from_window_posts(std::size_t snapshot_index,
                                         const std::vector<const PostRecord*>& posts) {
  std::set<std::string> users;
  std::map<std::string_view, std::set<std::string_view>> thread_users;
  for (const PostRecord* p : posts) {
    users.insert(p->user_id);
    thread_users[p->thread_id].insert(p->user_id);
  }
  std::map<std::pair<std::string_view, std::string_view>, int> shared;
  for (const auto& [thread, members] : thread_users) {
    for (auto i = members.begin(); i != members.end(); ++i) {
      for (auto j = std::next(i); j != members.end(); ++j) ++shared[{*i, *j}];
    }
  }
  std::vector<InteractionGraph::NamedEdge> edges;
  edges.reserve(shared.size());
  for (const auto& [pair, count] : shared) {
    edges.push_back({std::string(pair.first), std::string(pair.second), count});
  }
  return InteractionGraph::from_parts(snapshot_index, {users.begin(), users.end()}, edges);
}

}  // namespace

InteractionGraph build_graph(const std::vector<PostRecord>& posts, const SnapshotWindow& window) {
  std::vector<const PostRecord*> inside;
  for (const auto& p : posts) {
    if (window.contains(p.created_at)) inside.push_back(&p);
  }
  return graph_from_window_posts(window.index, inside);
}

std::vector<InteractionGraph> build_all_graphs(const std::vector<PostRecord>& posts,
                                               const std::vector<SnapshotWindow>& windows) {
  std::vector<std::vector<const PostRecord*>> buckets(windows.size());
  for (const auto& p : posts) {
    // Windows are contiguous, so a binary search on start finds the bucket.
    auto it = std::upper_bound(windows.begin(), windows.end(), p.created_at,
                               [](Timestamp t, const SnapshotWindow& w) { return t < w.start; });
    if (it == windows.begin()) continue;
    --it;
    if (it->contains(p.created_at)) buckets[static_cast<std::size_t>(it - windows.begin())].push_back(&p);
  }
  std::vector<InteractionGraph> graphs;
  graphs.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    graphs.push_back(graph_from_window_posts(windows[i].index, buckets[i]));
  }
  return graphs;
}

std::vector<double> closeness_by_index(const InteractionGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<double> scores(n, 0.0);
  if (n <= 1) return scores;
  std::vector<long> dist(n);
  std::queue<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    queue.push(s);
    long reachable = 0, total = 0;
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop();
      for (std::size_t v : graph.neighbors(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          ++reachable;
          total += dist[v];
          queue.push(v);
        }
      }
    }
    if (reachable > 0) {
      const double r = static_cast<double>(reachable);
      scores[s] = (r / static_cast<double>(n - 1)) * (r / static_cast<double>(total));
    }
  }
  return scores;
}

std::vector<double> betweenness_by_index(const InteractionGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<double> scores(n, 0.0);
  std::vector<std::size_t> order;
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::queue<std::size_t> queue;

  // Sources in ascending node order; each source's dependencies are added in
  // one pass so the accumulation order is fixed.
  for (std::size_t s = 0; s < n; ++s) {
    order.clear();
    for (auto& p : preds) p.clear();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push(s);
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop();
      order.push_back(u);
      for (std::size_t v : graph.neighbors(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push(v);
        }
        if (dist[v] == dist[u] + 1) {
          sigma[v] += sigma[u];
          preds[v].push_back(u);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      std::size_t w = *it;
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) scores[w] += delta[w];
    }
  }
  for (double& score : scores) score /= 2.0;
  return scores;
}

namespace {
UserScores by_user(const InteractionGraph& graph, const std::vector<double>& values) {
  UserScores out;
  for (std::size_t i = 0; i < values.size(); ++i) out.emplace(graph.node(i), values[i]);
  return out;
}
}  // namespace

UserScores closeness_all(const InteractionGraph& graph) {
  return by_user(graph, closeness_by_index(graph));
}

UserScores betweenness_all(const InteractionGraph& graph) {
  return by_user(graph, betweenness_by_index(graph));
}

CentralityScores centrality_scores(const InteractionGraph& graph) {
  return {graph.snapshot_index(), closeness_all(graph), betweenness_all(graph)};
}

void write_edge_list(std::ostream& out, const InteractionGraph& graph, bool header) {
  if (header) out << "snapshot_index,user_a,user_b,weight\n";
  const std::string snapshot = std::to_string(graph.snapshot_index());
  for (const auto& e : graph.edges()) {
    csv::write_row(out, {snapshot, graph.node(e.a), graph.node(e.b), std::to_string(e.weight)});
  }
}

}  // namespace fluct
