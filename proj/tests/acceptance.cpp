// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fluct/community.hpp"
#include "fluct/evolution.hpp"
#include "fluct/graph.hpp"
#include "fluct/model.hpp"
#include "fluct/pipeline.hpp"
#include "fluct/timestamp.hpp"

using namespace fluct;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kCentralityTol = 1e-9;
constexpr double kModularityTol = 1e-12;
constexpr double kGradientRelTol = 1e-6;
constexpr double kFiniteDiffStep = 1e-5;
constexpr double kSeparableMinF = 0.95;
constexpr double kPlantedMinF = 0.8;
constexpr double kNullMinF = 0.35;
constexpr double kNullMaxF = 0.65;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

std::string node(std::size_t i) { return "v" + std::to_string(100 + i); }

InteractionGraph graph_of(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(node(i));
  std::vector<InteractionGraph::NamedEdge> named;
  for (auto [a, b] : edges) named.push_back({node(a), node(b), 1});
  return InteractionGraph::from_parts(0, nodes, named);
}

InteractionGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (coin(rng) < p) edges.emplace_back(a, b);
  return graph_of(n, edges);
}

InteractionGraph two_triangles_with_bridge() {
  return graph_of(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}});
}

Community community(std::size_t snapshot, std::size_t id, std::vector<std::string> members) {
  std::sort(members.begin(), members.end());
  return {snapshot, id, std::move(members)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).string()] = slurp(entry.path());
  return files;
}

Outcome window_count() {
  const auto windows =
      build_windows(*parse_timestamp("2000-04-21T00:00:00Z"), *parse_timestamp("2013-04-25T00:00:00Z"), 24);
  return {windows.size() == 199, "windows=" + std::to_string(windows.size()) + " expected=199"};
}

Outcome centrality_oracle() {
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    const auto g = random_graph(rng, n, std::uniform_real_distribution<double>(0.1, 0.9)(rng));
    std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (const auto& e : g.edges()) d[e.a][e.b] = d[e.b][e.a] = 1;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);

    std::vector<double> close(n, 0.0), between(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      double r = 0, sum = 0;
      for (std::size_t t = 0; t < n; ++t)
        if (t != s && d[s][t] < kInf) r += 1, sum += d[s][t];
      if (r > 0) close[s] = (r / static_cast<double>(n - 1)) * (r / sum);
      for (std::size_t t = 0; t < n; ++t) {
        if (t == s || d[s][t] >= kInf) continue;
        std::vector<std::vector<std::size_t>> paths;
        std::vector<std::size_t> path{s};
        std::function<void(std::size_t)> walk = [&](std::size_t u) {
          if (u == t) {
            paths.push_back(path);
            return;
          }
          for (std::size_t v = 0; v < n; ++v) {
            // Only step along shortest-path layers.
            if (g.adjacent(u, v) && d[s][v] == d[s][u] + 1 && d[v][t] == d[u][t] - 1) {
              path.push_back(v);
              walk(v);
              path.pop_back();
            }
          }
        };
        walk(s);
        for (const auto& p : paths)
          for (std::size_t i = 1; i + 1 < p.size(); ++i) between[p[i]] += 0.5 / static_cast<double>(paths.size());
      }
    }
    const auto c = closeness_by_index(g);
    const auto b = betweenness_by_index(g);
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max({worst, std::fabs(c[i] - close[i]), std::fabs(b[i] - between[i])});
    }
  }
  return {worst <= kCentralityTol, fmt("graphs=100 max_abs_err=%.3g tol=%.0e", worst, kCentralityTol)};
}

Outcome modularity_fixtures() {
  const auto g = two_triangles_with_bridge();
  const double split = modularity(g, {community(0, 0, {node(0), node(1), node(2)}), community(0, 1, {node(3), node(4), node(5)})});
  std::vector<std::string> everyone;
  for (std::size_t i = 0; i < 6; ++i) everyone.push_back(node(i));
  const double whole = modularity(g, {community(0, 0, everyone)});

  std::mt19937_64 rng(77);
  double lo = 1, hi = -1;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 15;
    const auto r = random_graph(rng, n, std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const std::size_t k = 1 + rng() % 5;
    std::vector<std::vector<std::string>> groups(k + 1);
    for (std::size_t i = 0; i < n; ++i) groups[rng() % (k + 1)].push_back(node(i));
    std::vector<Community> cs;
    for (std::size_t j = 0; j < k; ++j)
      if (!groups[j].empty()) cs.push_back(community(0, j, groups[j]));
    const double q = modularity(r, cs);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  const bool pass = std::fabs(split - 5.0 / 14.0) <= kModularityTol && whole == 0.0 && lo >= -0.5 && hi <= 1.0;
  return {pass, fmt("split_Q=%.15f whole_Q=%g", split, whole) + fmt(" random_range=[%.4f, %.4f]", lo, hi)};
}

Outcome propinquity_detection() {
  const auto g = two_triangles_with_bridge();
  PropinquityConfig config;
  config.alpha = 1;
  config.beta = 3;
  config.min_community_size = 3;
  const auto first = detect_communities(g, config);
  bool identical = true;
  for (int i = 0; i < 9; ++i) identical = identical && detect_communities(g, config) == first;
  const bool shape = first.size() == 2 && first[0].members == std::vector<std::string>{node(0), node(1), node(2)} &&
                     first[1].members == std::vector<std::string>{node(3), node(4), node(5)};
  return {shape && identical,
          "communities=" + std::to_string(first.size()) + " triangles=" + (shape ? "yes" : "no") +
              " repeat_identical=" + (identical ? "yes" : "no")};
}

Outcome role_rules() {
  const auto labels = label_roles(match_communities({community(1, 0, {"a", "b", "c", "e"})},
                                                    {community(0, 0, {"a", "b", "c", "d"})}));
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& l : labels) got.insert({l.user_id, std::string(to_string(l.role))});
  const std::set<std::pair<std::string, std::string>> want = {
      {"e", "Joining"}, {"a", "Previous"}, {"b", "Previous"}, {"c", "Previous"},
      {"d", "Leaving"}, {"a", "Staying"},  {"b", "Staying"},  {"c", "Staying"}};

  const auto boundary = label_roles(match_communities({community(1, 0, {"a", "b", "x", "y"})},
                                                      {community(0, 0, {"a", "b", "c", "d"})}));
  std::size_t join_side = 0, leave_side = 0;
  for (const auto& l : boundary) (task_of(l.role) == Task::JoinVsPrevious ? join_side : leave_side)++;
  const bool pass = got == want && labels.size() == want.size() && join_side == 0 && leave_side == 4;
  return {pass, "scenario_labels=" + std::to_string(labels.size()) + (got == want ? " (exact)" : " (mismatch)") +
                    " boundary_join_labels=" + std::to_string(join_side) +
                    " boundary_leave_labels=" + std::to_string(leave_side)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    logistic::Matrix x(n, std::vector<double>(kFeatureCount));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : x[i]) v = gauss(rng);
      y[i] = static_cast<int>(rng() % 2);
    }
    logistic::Parameters p{std::vector<double>(kFeatureCount), 0.5 * gauss(rng)};
    for (auto& w : p.weights) w = 0.5 * gauss(rng);
    const double lambda = 0.01 + static_cast<double>(rng() % 100) / 100.0;
    const auto g = logistic::gradient(x, y, p, lambda);
    double diff = 0, na = 0, nn = 0;
    for (std::size_t j = 0; j <= kFeatureCount; ++j) {
      auto plus = p, minus = p;
      (j < kFeatureCount ? plus.weights[j] : plus.bias) += kFiniteDiffStep;
      (j < kFeatureCount ? minus.weights[j] : minus.bias) -= kFiniteDiffStep;
      const double numeric =
          (logistic::loss(x, y, plus, lambda) - logistic::loss(x, y, minus, lambda)) / (2 * kFiniteDiffStep);
      const double analytic = j < kFeatureCount ? g.weights[j] : g.bias;
      diff += (analytic - numeric) * (analytic - numeric);
      na += analytic * analytic;
      nn += numeric * numeric;
    }
    worst = std::max(worst, std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-12}));
  }
  return {worst <= kGradientRelTol, fmt("instances=50 max_rel_err=%.3g tol=%.0e", worst, kGradientRelTol)};
}

Outcome separable_sanity() {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FeatureArray direction{};
  for (double& d : direction) d = gauss(rng);
  std::vector<FeatureArray> rows;
  std::vector<int> labels;
  while (rows.size() < 200) {
    FeatureArray r{};
    double z = 0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      r[j] = gauss(rng);
      z += direction[j] * r[j];
    }
    if (std::fabs(z) < 0.5) continue;  // keep a margin
    rows.push_back(r);
    labels.push_back(z > 0 ? 1 : 0);
  }
  const auto report = monte_carlo_cv(rows, labels, find_preset("M1"), CvConfig{}, Hyperparameters{});
  return {report.f_measure.mean >= kSeparableMinF,
          fmt("rows=200 repeats=20 F=%.4f min=%.2f", report.f_measure.mean, kSeparableMinF)};
}

PipelineConfig full_config(const fs::path& out, double strength) {
  PipelineConfig c;
  c.out = out;
  c.cv.seed = 7;
  c.synth.churn_signal_strength = strength;
  return c;
}

double leave_f(const fs::path& out) {
  return parse_report_json(slurp(out / "reports" / "LeaveVsStay" / "M1.json")).f_measure.mean;
}

void full_run(const PipelineConfig& config) {
  fs::remove_all(config.out);
  Pipeline pipeline(config);
  pipeline.synth();
  pipeline.run();
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "fluct_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  int failures = 0;
  auto report = [&](int id, const char* name, double budget_s, const std::function<Outcome()>& check) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(start);
    const bool in_time = elapsed <= budget_s;
    const bool pass = outcome.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %2d %-28s %s time=%.2fs budget=%.0fs%s\n", pass ? "PASS" : "FAIL", id, name,
                outcome.detail.c_str(), elapsed, budget_s, in_time ? "" : " (over budget)");
    std::fflush(stdout);
    return elapsed;
  };

  report(1, "window-count", 1, window_count);
  report(2, "centrality-oracle", 10, centrality_oracle);
  report(3, "modularity-fixtures", 10, modularity_fixtures);
  report(4, "propinquity-detection", 1, propinquity_detection);
  report(5, "role-rules", 1, role_rules);
  report(6, "gradient-check", 5, gradient_check);
  report(7, "separable-sanity", 5, separable_sanity);

  const auto planted = full_config(root / "planted", 1.0);
  const double planted_time = report(8, "planted-signal-recovery", 60, [&] {
    full_run(planted);
    const double f1 = leave_f(planted.out);
    const auto null_config = full_config(root / "null", 0.0);
    full_run(null_config);
    const double f0 = leave_f(null_config.out);
    const bool pass = f1 >= kPlantedMinF && f0 >= kNullMinF && f0 <= kNullMaxF;
    return Outcome{pass, fmt("F(strength=1)=%.4f min=%.2f", f1, kPlantedMinF) +
                             fmt(" F(strength=0)=%.4f range=[%.2f, %.2f]", f0, kNullMinF, kNullMaxF)};
  });

  report(9, "ablation-harness", 1, [&] {
    const auto presets = ablation_presets();
    Pipeline pipeline(planted);
    const std::string table = pipeline.report();
    std::istringstream lines(table);
    std::string line;
    std::vector<std::string> rows;
    bool header_ok = true;
    std::size_t headers = 0;
    while (std::getline(lines, line)) {
      std::istringstream words(line);
      std::vector<std::string> w;
      for (std::string t; words >> t;) w.push_back(t);
      if (w.empty() || w[0] == "Task:") continue;
      if (w[0] == "Model") {
        ++headers;
        header_ok = header_ok && w == std::vector<std::string>{"Model", "Precision", "Recall", "F-measure"};
        continue;
      }
      header_ok = header_ok && w.size() == 4;
      rows.push_back(w[0]);
    }
    std::vector<std::string> expected;
    for (std::size_t t = 0; t < headers; ++t)
      for (const auto& p : presets) expected.push_back(p.name);
    const bool pass = presets.size() == 5 && headers == planted.tasks.size() && rows == expected && header_ok &&
                      find_preset("M2").mask.count() == 15 && find_preset("M3").mask.count() == 9;
    return Outcome{pass, "presets=" + std::to_string(presets.size()) + " tables=" + std::to_string(headers) +
                             " rows=" + std::to_string(rows.size()) +
                             " M2_active=" + std::to_string(find_preset("M2").mask.count()) +
                             " M3_active=" + std::to_string(find_preset("M3").mask.count())};
  });

  report(10, "determinism", std::max(2.0 * planted_time, 1.0), [&] {
    auto again = planted;
    again.out = root / "planted_again";
    full_run(again);
    const auto a = tree(planted.out);
    const auto b = tree(again.out);
    return Outcome{a == b && !a.empty(), "files=" + std::to_string(a.size()) + (a == b ? " identical" : " differ")};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
