#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "fluct/community.hpp"
#include "support.hpp"

using namespace fluct;
using fluct::testing::graph_of;
using fluct::testing::node_name;
using fluct::testing::random_graph;
using fluct::testing::two_triangles_with_bridge;

namespace {

Community community_of(std::vector<std::size_t> members, std::size_t id = 0) {
  Community c;
  c.community_id = id;
  for (auto m : members) c.members.push_back(node_name(m));
  return c;
}

// Independent modularity: sum over node pairs of (A_ij - k_i k_j / 2m) when
// i and j share a label, over 2m.
double modularity_oracle(const InteractionGraph& g, const std::vector<int>& label) {
  const auto n = g.node_count();
  const double m = static_cast<double>(g.edge_count());
  if (m == 0) return 0.0;
  double q = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (label[i] != label[j]) continue;
      const double a = g.adjacent(i, j) ? 1.0 : 0.0;
      const double ki = static_cast<double>(g.neighbors(i).size());
      const double kj = static_cast<double>(g.neighbors(j).size());
      q += a - ki * kj / (2 * m);
    }
  }
  return q / (2 * m);
}

}  // namespace

TEST_CASE("propinquity examples") {
  const auto isolated = graph_of(2, {});
  CHECK(propinquity(isolated, node_name(0), node_name(1)) == 0);
  const auto bridge = two_triangles_with_bridge();
  CHECK(propinquity(bridge, node_name(0), node_name(1)) == 2);
  CHECK(propinquity(bridge, node_name(2), node_name(3)) == 1);
  CHECK(propinquity(bridge, node_name(0), node_name(3)) == 1);
  CHECK_THROWS_AS(propinquity(bridge, node_name(0), node_name(0)), std::invalid_argument);
  CHECK_THROWS(propinquity(bridge, node_name(0), "missing"));
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(PropinquityConfig{}.validate());
  CHECK_THROWS_AS((PropinquityConfig{3, 3, 20, 3}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PropinquityConfig{-1, 3, 20, 3}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PropinquityConfig{1, 3, 0, 3}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PropinquityConfig{1, 3, 20, 0}.validate()), std::invalid_argument);
}

TEST_CASE("detect_communities examples") {
  CHECK(detect_communities(InteractionGraph{}, {}).empty());

  const auto two = detect_communities(two_triangles_with_bridge(), {});
  REQUIRE(two.size() == 2);
  CHECK(two[0].community_id == 0);
  CHECK(two[0].members == community_of({0, 1, 2}).members);
  CHECK(two[1].community_id == 1);
  CHECK(two[1].members == community_of({3, 4, 5}).members);

  const auto k4 = detect_communities(graph_of(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}), {});
  REQUIRE(k4.size() == 1);
  CHECK(k4[0].members.size() == 4);

  // A lone edge and a path dissolve under cutting.
  CHECK(detect_communities(graph_of(5, {{0, 1}, {2, 3}, {3, 4}}), {}).empty());
}

TEST_CASE("modularity examples") {
  const auto g = two_triangles_with_bridge();
  CHECK(modularity(g, {community_of({0, 1, 2, 3, 4, 5})}) == doctest::Approx(0.0));
  CHECK(modularity(g, {community_of({0, 1, 2}, 0), community_of({3, 4, 5}, 1)}) == doctest::Approx(5.0 / 14.0));
  CHECK(modularity(graph_of(4, {}), {community_of({0, 1})}) == 0.0);
  CHECK(modularity(graph_of(4, {}), {}) == 0.0);

  CHECK_THROWS_AS(modularity(g, {community_of({0, 1, 2}, 0), community_of({2, 3, 4}, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(modularity(g, {community_of({0, 9})}), std::invalid_argument);
}

TEST_CASE("modularity matches the pairwise formula and stays in range") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const auto g = random_graph(rng, n, static_cast<double>(rng() % 100) / 100.0);
    // Random partition; label -1-i keeps a node as its own singleton.
    const int groups = static_cast<int>(1 + rng() % 4);
    std::vector<int> label(n);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(groups));
    for (std::size_t i = 0; i < n; ++i) {
      const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(groups + 1));
      if (k == groups) {
        label[i] = -1 - static_cast<int>(i);
      } else {
        label[i] = k;
        members[static_cast<std::size_t>(k)].push_back(i);
      }
    }
    std::vector<Community> communities;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (!members[k].empty()) communities.push_back(community_of(members[k], k));
    }
    const double q = modularity(g, communities);
    CHECK(q == doctest::Approx(modularity_oracle(g, label)));
    CHECK(q >= -0.5 - 1e-12);
    CHECK(q <= 1.0 + 1e-12);
  }
}

TEST_CASE("detected communities are disjoint, large enough and deterministic") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 25;
    const auto g = random_graph(rng, n, static_cast<double>(rng() % 60) / 100.0);
    const PropinquityConfig config;
    const auto a = detect_communities(g, config);
    CHECK(a == detect_communities(g, config));
    std::set<std::string> seen;
    std::string previous_smallest;
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].community_id == k);
      CHECK(a[k].members.size() >= config.min_community_size);
      CHECK(std::is_sorted(a[k].members.begin(), a[k].members.end()));
      if (k > 0) CHECK(previous_smallest < a[k].members.front());
      previous_smallest = a[k].members.front();
      for (const auto& m : a[k].members) {
        CHECK(g.has_node(m));
        CHECK(seen.insert(m).second);
      }
    }
    CHECK_NOTHROW(modularity(g, a));
  }
}

TEST_CASE("raising alpha never keeps more edges after the first step") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 15;
    const auto topo = Topology::from_graph(random_graph(rng, n, static_cast<double>(rng() % 70) / 100.0));
    const auto original = topo.edge_list();
    std::size_t previous = original.size() + 1;
    for (int alpha = 0; alpha <= 6; ++alpha) {
      const auto next = propinquity_step(topo, alpha, 100);
      std::size_t surviving = 0;
      for (auto [u, v] : original) surviving += next.adjacent(u, v) ? 1 : 0;
      CHECK(surviving <= previous);
      previous = surviving;
    }
  }
}

TEST_CASE("propinquity step evaluates all pairs on the input topology") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    const auto topo = Topology::from_graph(random_graph(rng, n, 0.4));
    const auto next = propinquity_step(topo, 1, 3);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        const int p = propinquity(topo, u, v);
        if (topo.adjacent(u, v)) {
          CHECK(next.adjacent(u, v) == (p > 1));
        } else {
          CHECK(next.adjacent(u, v) == (p >= 3));
        }
      }
    }
  }
}

TEST_CASE("dynamics terminate within the iteration budget") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const auto g = random_graph(rng, n, static_cast<double>(rng() % 100) / 100.0);
    for (int budget : {1, 2, 5, 20}) {
      PropinquityConfig config;
      config.max_iterations = budget;
      const auto trace = run_propinquity_dynamics(g, config);
      CHECK(trace.iterations <= budget);
      CHECK(trace.iterations >= 1);
      if (trace.converged) CHECK(propinquity_step(trace.final_topology, 1, 3) == trace.final_topology);
    }
  }
}

TEST_CASE("community export is sorted") {
  std::vector<Community> cs = {community_of({4, 3, 5}, 1), community_of({0, 2, 1}, 0)};
  for (auto& c : cs) std::sort(c.members.begin(), c.members.end());
  cs[0].snapshot_index = cs[1].snapshot_index = 2;
  std::ostringstream out;
  write_communities(out, cs);
  CHECK(out.str() ==
        "snapshot_index,community_id,user_id\n2,0,n000\n2,0,n001\n2,0,n002\n2,1,n003\n2,1,n004\n2,1,n005\n");
}
