#include "fluct/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fluct/csv.hpp"
#include "fluct/errors.hpp"
#include "fluct/featureset.hpp"
#include "fluct/graph.hpp"

namespace fluct {

namespace fs = std::filesystem;

StageError::StageError(std::string stage, int exit_code, const std::string& message)
    : std::runtime_error(stage + ": " + message), stage_(std::move(stage)), exit_code_(exit_code) {}

std::string artifacts::edge_list_name(std::size_t snapshot) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "graphs/edges_%04zu.csv", snapshot);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return in;
}

std::vector<csv::Row> read_table(const fs::path& path, const std::vector<std::string>& header) {
  auto in = open_in(path);
  auto rows = csv::read_all(in);
  if (rows.empty() || rows.front().fields != header) {
    throw DataError(path.string() + ": unexpected header");
  }
  rows.erase(rows.begin());
  for (const auto& r : rows) {
    if (r.fields.size() != header.size()) {
      throw DataError(path.string() + " line " + std::to_string(r.line) + ": wrong column count");
    }
  }
  return rows;
}

std::size_t to_index(const std::string& text, const fs::path& path, std::size_t line) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(path.string() + " line " + std::to_string(line) + ": bad integer '" + text + "'");
  }
  return value;
}

double to_real(const std::string& text, const fs::path& path, std::size_t line) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(path.string() + " line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return value;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig config, Logger log) : config_(std::move(config)), log_(std::move(log)) {}

fs::path Pipeline::path(std::string_view artifact) const { return config_.out / fs::path(artifact); }

fs::path Pipeline::corpus_path() const {
  if (!config_.input.empty()) return config_.input;
  return config_.out / (config_.synth_format == CorpusFormat::Jsonl ? "corpus.jsonl" : "corpus.csv");
}

fs::path Pipeline::require(std::string_view artifact) const {
  fs::path p = path(artifact);
  if (!fs::exists(p)) throw DataError("missing required artifact '" + p.string() + "'");
  return p;
}

void Pipeline::info(std::string_view message) const {
  if (log_) log_(message);
}

template <typename Fn>
auto Pipeline::guarded(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ModelError& e) {
    throw StageError(std::string(stage), 3, e.what());
  } catch (const std::exception& e) {
    throw StageError(std::string(stage), 2, e.what());
  }
}

void Pipeline::synth() {
  guarded("synth", [&] {
    const auto posts = generate_synthetic_forum(config_.cv.seed, config_.synth);
    const fs::path target = corpus_path();
    auto out = open_out(target);
    write_posts(out, posts, config_.synth_format);
    info("synth: wrote " + std::to_string(posts.size()) + " posts to " + target.string());
  });
}

void Pipeline::ingest() {
  guarded("ingest", [&] {
    const fs::path source = corpus_path();
    if (!fs::exists(source)) throw DataError("missing corpus '" + source.string() + "'");
    const CorpusFormat format = config_.format ? *config_.format : format_for_path(source.string());
    const auto posts = load_posts(source.string(), format);
    const CorpusStats stats = corpus_stats(posts);
    {
      auto out = open_out(path(artifacts::kCorpusStats));
      out << corpus_stats_json(stats);
    }
    auto out = open_out(path(artifacts::kPosts));
    write_posts(out, posts, CorpusFormat::Jsonl);
    info("ingest: " + std::to_string(stats.post_count) + " posts, " + std::to_string(stats.user_count) +
         " users, " + std::to_string(stats.thread_count) + " threads");
  });
}

void Pipeline::snapshots() {
  guarded("snapshots", [&] {
    const auto posts = load_posts(require(artifacts::kPosts).string(), CorpusFormat::Jsonl);
    const CorpusStats stats = corpus_stats(posts);
    const auto windows = build_windows(stats.first_post, stats.last_post, config_.window_days);
    const auto graphs = build_all_graphs(posts, windows);

    fs::remove_all(path(artifacts::kGraphsDir));
    {
      auto out = open_out(path(artifacts::kWindows));
      out << "snapshot_index,start,end\n";
      for (const auto& w : windows) {
        csv::write_row(out, {std::to_string(w.index), format_timestamp(w.start), format_timestamp(w.end)});
      }
    }
    auto nodes = open_out(path(artifacts::kNodes));
    auto centrality = open_out(path(artifacts::kCentrality));
    nodes << "snapshot_index,user_id\n";
    centrality << "snapshot_index,user_id,closeness,betweenness\n";
    for (const auto& g : graphs) {
      const std::string snapshot = std::to_string(g.snapshot_index());
      const auto closeness = closeness_by_index(g);
      const auto betweenness = betweenness_by_index(g);
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        csv::write_row(nodes, {snapshot, g.node(i)});
        csv::write_row(centrality, {snapshot, g.node(i), csv::format_real(closeness[i]),
                                    csv::format_real(betweenness[i])});
      }
      auto edges = open_out(path(artifacts::edge_list_name(g.snapshot_index())));
      write_edge_list(edges, g);
    }
    info("snapshots: " + std::to_string(windows.size()) + " windows of " +
         std::to_string(config_.window_days) + " days");
  });
}

namespace {

std::vector<SnapshotWindow> read_windows(const fs::path& path) {
  std::vector<SnapshotWindow> windows;
  for (const auto& r : read_table(path, {"snapshot_index", "start", "end"})) {
    auto start = parse_timestamp(r.fields[1]);
    auto end = parse_timestamp(r.fields[2]);
    if (!start || !end) throw DataError(path.string() + " line " + std::to_string(r.line) + ": bad timestamp");
    const std::size_t index = to_index(r.fields[0], path, r.line);
    if (index != windows.size()) throw DataError(path.string() + ": windows out of order");
    windows.push_back({index, *start, *end});
  }
  return windows;
}

}  // namespace

void Pipeline::communities() {
  guarded("communities", [&] {
    const auto windows = read_windows(require(artifacts::kWindows));
    const fs::path nodes_path = require(artifacts::kNodes);
    std::vector<std::vector<std::string>> nodes(windows.size());
    for (const auto& r : read_table(nodes_path, {"snapshot_index", "user_id"})) {
      const std::size_t s = to_index(r.fields[0], nodes_path, r.line);
      if (s >= windows.size()) throw DataError(nodes_path.string() + ": snapshot out of range");
      nodes[s].push_back(r.fields[1]);
    }

    auto communities_out = open_out(path(artifacts::kCommunities));
    auto modularity_out = open_out(path(artifacts::kModularity));
    communities_out << "snapshot_index,community_id,user_id\n";
    modularity_out << "snapshot_index,modularity,communities\n";
    std::size_t total = 0;
    for (std::size_t s = 0; s < windows.size(); ++s) {
      const fs::path edge_path = require(artifacts::edge_list_name(s));
      std::vector<InteractionGraph::NamedEdge> edges;
      for (const auto& r : read_table(edge_path, {"snapshot_index", "user_a", "user_b", "weight"})) {
        edges.push_back({r.fields[1], r.fields[2], static_cast<int>(to_index(r.fields[3], edge_path, r.line))});
      }
      const auto graph = InteractionGraph::from_parts(s, nodes[s], edges);
      const auto found = detect_communities(graph, config_.propinquity);
      write_communities(communities_out, found, false);
      csv::write_row(modularity_out, {std::to_string(s), csv::format_real(modularity(graph, found)),
                                      std::to_string(found.size())});
      total += found.size();
    }
    info("communities: " + std::to_string(total) + " communities across " +
         std::to_string(windows.size()) + " snapshots");
  });
}

namespace {

std::vector<std::vector<Community>> read_communities(const fs::path& path, std::size_t snapshots) {
  std::vector<std::vector<Community>> by_snapshot(snapshots);
  for (const auto& r : read_table(path, {"snapshot_index", "community_id", "user_id"})) {
    const std::size_t s = to_index(r.fields[0], path, r.line);
    const std::size_t id = to_index(r.fields[1], path, r.line);
    if (s >= snapshots) throw DataError(path.string() + ": snapshot out of range");
    auto& list = by_snapshot[s];
    if (list.empty() || list.back().community_id != id) {
      if (id != list.size()) throw DataError(path.string() + ": community ids out of order");
      list.push_back({s, id, {}});
    }
    list.back().members.push_back(r.fields[2]);
  }
  return by_snapshot;
}

}  // namespace

void Pipeline::roles() {
  guarded("roles", [&] {
    const auto windows = read_windows(require(artifacts::kWindows));
    const auto by_snapshot = read_communities(require(artifacts::kCommunities), windows.size());
    const auto labels = label_all_snapshots(by_snapshot);
    auto out = open_out(path(artifacts::kRoles));
    write_roles(out, labels);
    std::map<Role, std::size_t> counts;
    for (const auto& l : labels) ++counts[l.role];
    info("roles: " + std::to_string(counts[Role::Joining]) + " joining, " +
         std::to_string(counts[Role::Previous]) + " previous, " + std::to_string(counts[Role::Leaving]) +
         " leaving, " + std::to_string(counts[Role::Staying]) + " staying");
  });
}

void Pipeline::features() {
  guarded("features", [&] {
    const auto posts = load_posts(require(artifacts::kPosts).string(), CorpusFormat::Jsonl);
    const auto windows = read_windows(require(artifacts::kWindows));

    std::vector<SnapshotMeasures> snapshots(windows.size());
    for (std::size_t s = 0; s < windows.size(); ++s) snapshots[s].centrality.snapshot_index = s;
    const fs::path centrality_path = require(artifacts::kCentrality);
    for (const auto& r : read_table(centrality_path, {"snapshot_index", "user_id", "closeness", "betweenness"})) {
      const std::size_t s = to_index(r.fields[0], centrality_path, r.line);
      if (s >= windows.size()) throw DataError(centrality_path.string() + ": snapshot out of range");
      snapshots[s].centrality.closeness[r.fields[1]] = to_real(r.fields[2], centrality_path, r.line);
      snapshots[s].centrality.betweenness[r.fields[1]] = to_real(r.fields[3], centrality_path, r.line);
    }
    const fs::path modularity_path = require(artifacts::kModularity);
    for (const auto& r : read_table(modularity_path, {"snapshot_index", "modularity", "communities"})) {
      const std::size_t s = to_index(r.fields[0], modularity_path, r.line);
      if (s >= windows.size()) throw DataError(modularity_path.string() + ": snapshot out of range");
      snapshots[s].modularity = to_real(r.fields[1], modularity_path, r.line);
    }

    const fs::path roles_path = require(artifacts::kRoles);
    std::vector<RoleLabel> labels;
    for (const auto& r : read_table(roles_path, {"snapshot_index", "user_id", "role", "community_id"})) {
      labels.push_back({r.fields[1], to_index(r.fields[0], roles_path, r.line), parse_role(r.fields[2]),
                        to_index(r.fields[3], roles_path, r.line)});
    }

    const Lexicon lexicon = Lexicon::load(config_.lexicon.string());
    const IntentPatterns patterns = IntentPatterns::load(config_.intents.string());
    const FeatureContext context(posts, windows, std::move(snapshots), lexicon, patterns);

    auto out = open_out(path(artifacts::kDataset));
    csv::write_row(out, dataset_header());
    for (Task task : config_.tasks) {
      const auto rows = build_dataset(labels, task, context);
      write_dataset(out, rows, false);
      info("features: " + std::to_string(rows.size()) + " " + std::string(to_string(task)) + " examples");
    }
  });
}

void Pipeline::train() {
  guarded("train", [&] {
    auto in = open_in(require(artifacts::kDataset));
    const auto dataset = read_dataset(in);
    fs::remove_all(path(artifacts::kReportsDir));
    for (Task task : config_.tasks) {
      std::vector<LabeledExample> rows;
      for (const auto& ex : dataset) {
        if (ex.task == task) rows.push_back(ex);
      }
      if (rows.empty()) throw ModelError("dataset holds no " + std::string(to_string(task)) + " rows");
      for (const auto& preset : ablation_presets()) {
        EvalReport report = monte_carlo_cv(rows, preset, config_.cv, config_.hyper);
        report.task = std::string(to_string(task));
        const fs::path target = path(artifacts::kReportsDir) / report.task / (preset.name + ".json");
        auto out = open_out(target);
        out << report_json(report);
        char line[160];
        std::snprintf(line, sizeof line, "train: %s %s P=%.4f R=%.4f F=%.4f", report.task.c_str(),
                      preset.name.c_str(), report.precision.mean, report.recall.mean, report.f_measure.mean);
        info(line);
      }
    }
  });
}

std::string Pipeline::report() {
  return guarded("report", [&] {
    require(artifacts::kReportsDir);
    std::vector<EvalReport> reports;
    for (Task task : config_.tasks) {
      for (const auto& preset : ablation_presets()) {
        const std::string rel = std::string(artifacts::kReportsDir) + "/" + std::string(to_string(task)) +
                                "/" + preset.name + ".json";
        auto in = open_in(require(rel));
        std::stringstream text;
        text << in.rdbuf();
        reports.push_back(parse_report_json(text.str()));
      }
    }
    const std::string table = format_report_table(reports);
    auto out = open_out(path(artifacts::kReportTable));
    out << table;
    return table;
  });
}

void Pipeline::run() {
  ingest();
  snapshots();
  communities();
  roles();
  features();
  train();
  report();
}

}  // namespace fluct
