#include "fluct/community.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "fluct/csv.hpp"

namespace fluct {

bool Community::contains(std::string_view user) const {
  return std::binary_search(members.begin(), members.end(), user);
}

void PropinquityConfig::validate() const {
  if (alpha < 0) throw std::invalid_argument("propinquity alpha must be non-negative");
  if (beta <= alpha) throw std::invalid_argument("propinquity beta must exceed alpha");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (min_community_size < 1) throw std::invalid_argument("min_community_size must be positive");
}

Topology Topology::from_graph(const InteractionGraph& graph) {
  Topology t(graph.node_count());
  t.adjacency_ = graph.adjacency();
  return t;
}

bool Topology::adjacent(std::size_t u, std::size_t v) const {
  const auto& list = adjacency_[u];
  return std::binary_search(list.begin(), list.end(), v);
}

std::size_t Topology::edge_count() const {
  std::size_t degree_sum = 0;
  for (const auto& list : adjacency_) degree_sum += list.size();
  return degree_sum / 2;
}

std::vector<std::pair<std::size_t, std::size_t>> Topology::edge_list() const {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < adjacency_.size(); ++u) {
    for (std::size_t v : adjacency_[u]) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return edges;
}

void Topology::add_edge(std::size_t u, std::size_t v) {
  if (u == v) throw std::invalid_argument("self-loop");
  if (adjacent(u, v)) return;
  auto insert = [](std::vector<std::size_t>& list, std::size_t x) {
    list.insert(std::lower_bound(list.begin(), list.end(), x), x);
  };
  insert(adjacency_[u], v);
  insert(adjacency_[v], u);
}

namespace {

std::size_t common_neighbors(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t count = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace

int propinquity(const Topology& topology, std::size_t u, std::size_t v) {
  if (u == v) throw std::invalid_argument("propinquity of a node with itself");
  if (u >= topology.node_count() || v >= topology.node_count()) {
    throw std::out_of_range("propinquity node index out of range");
  }
  return (topology.adjacent(u, v) ? 1 : 0) +
         static_cast<int>(common_neighbors(topology.neighbors(u), topology.neighbors(v)));
}

int propinquity(const InteractionGraph& graph, std::string_view u, std::string_view v) {
  if (u == v) throw std::invalid_argument("propinquity of a node with itself");
  auto iu = graph.index_of(u), iv = graph.index_of(v);
  if (!iu || !iv) throw std::invalid_argument("propinquity endpoint is not a node");
  return propinquity(Topology::from_graph(graph), *iu, *iv);
}

Topology propinquity_step(const Topology& topology, int alpha, int beta) {
  const std::size_t n = topology.node_count();
  Topology next(n);
  std::vector<int> shared(n, 0);
  std::vector<std::size_t> touched;
  for (std::size_t u = 0; u < n; ++u) {
    // Common-neighbor counts to every v > u reachable in two hops.
    touched.clear();
    for (std::size_t w : topology.neighbors(u)) {
      for (std::size_t v : topology.neighbors(w)) {
        if (v <= u) continue;
        if (shared[v]++ == 0) touched.push_back(v);
      }
    }
    for (std::size_t v : topology.neighbors(u)) {
      if (v > u && 1 + shared[v] > alpha) next.add_edge(u, v);
    }
    for (std::size_t v : touched) {
      if (!topology.adjacent(u, v) && shared[v] >= beta) next.add_edge(u, v);
      shared[v] = 0;
    }
  }
  return next;
}

PropinquityTrace run_propinquity_dynamics(const InteractionGraph& graph,
                                          const PropinquityConfig& config) {
  config.validate();
  PropinquityTrace trace{Topology::from_graph(graph)};
  std::set<std::vector<std::pair<std::size_t, std::size_t>>> seen;
  seen.insert(trace.final_topology.edge_list());
  for (int k = 0; k < config.max_iterations; ++k) {
    Topology next = propinquity_step(trace.final_topology, config.alpha, config.beta);
    ++trace.iterations;
    if (next == trace.final_topology) {
      trace.converged = true;
      break;
    }
    trace.final_topology = std::move(next);
    if (!seen.insert(trace.final_topology.edge_list()).second) {
      trace.cycled = true;
      break;
    }
  }
  return trace;
}

std::vector<Community> detect_communities(const InteractionGraph& graph,
                                          const PropinquityConfig& config) {
  const PropinquityTrace trace = run_propinquity_dynamics(graph, config);
  const Topology& topology = trace.final_topology;
  const std::size_t n = topology.node_count();

  std::vector<Community> communities;
  std::vector<bool> visited(n, false);
  std::vector<std::size_t> stack;
  // Nodes are sorted by user_id, so scanning in index order discovers
  // components in ascending order of their smallest member.
  for (std::size_t root = 0; root < n; ++root) {
    if (visited[root]) continue;
    std::vector<std::size_t> component;
    visited[root] = true;
    stack.push_back(root);
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      component.push_back(u);
      for (std::size_t v : topology.neighbors(u)) {
        if (!visited[v]) {
          visited[v] = true;
          stack.push_back(v);
        }
      }
    }
    if (component.size() < config.min_community_size) continue;
    std::sort(component.begin(), component.end());
    Community c;
    c.snapshot_index = graph.snapshot_index();
    c.community_id = communities.size();
    for (std::size_t i : component) c.members.push_back(graph.node(i));
    communities.push_back(std::move(c));
  }
  return communities;
}

double modularity(const InteractionGraph& graph, const std::vector<Community>& communities) {
  const std::size_t n = graph.node_count();
  // Community slot per node; unassigned nodes get their own singleton slot.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> slot(n, kNone);
  for (std::size_t c = 0; c < communities.size(); ++c) {
    for (const auto& user : communities[c].members) {
      auto idx = graph.index_of(user);
      if (!idx) throw std::invalid_argument("community member '" + user + "' is not a node");
      if (slot[*idx] != kNone) throw std::invalid_argument("overlapping communities at '" + user + "'");
      slot[*idx] = c;
    }
  }
  const std::size_t m = graph.edge_count();
  if (m == 0) return 0.0;
  std::size_t next = communities.size();
  for (auto& s : slot) {
    if (s == kNone) s = next++;
  }
  std::vector<double> inside(next, 0.0), endpoints(next, 0.0);
  for (const auto& e : graph.edges()) {
    if (slot[e.a] == slot[e.b]) inside[slot[e.a]] += 1.0;
    endpoints[slot[e.a]] += 1.0;
    endpoints[slot[e.b]] += 1.0;
  }
  const double edges = static_cast<double>(m);
  double q = 0.0;
  for (std::size_t c = 0; c < next; ++c) {
    const double a = endpoints[c] / (2.0 * edges);
    q += inside[c] / edges - a * a;
  }
  return q;
}

void write_communities(std::ostream& out, const std::vector<Community>& communities, bool header) {
  if (header) out << "snapshot_index,community_id,user_id\n";
  std::vector<const Community*> sorted;
  for (const auto& c : communities) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(), [](const Community* a, const Community* b) {
    return std::tie(a->snapshot_index, a->community_id) < std::tie(b->snapshot_index, b->community_id);
  });
  for (const Community* c : sorted) {
    for (const auto& user : c->members) {
      csv::write_row(out, {std::to_string(c->snapshot_index), std::to_string(c->community_id), user});
    }
  }
}

}  // namespace fluct
