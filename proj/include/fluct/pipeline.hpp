#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fluct/config.hpp"

namespace fluct {

/// Stage failure carrying the CLI exit code: 2 for data errors, 3 for
/// modeling errors.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, int exit_code, const std::string& message);
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

/// Artifact layout under the output directory.
namespace artifacts {
inline constexpr std::string_view kSyntheticCorpus = "corpus.jsonl";
inline constexpr std::string_view kPosts = "posts.jsonl";
inline constexpr std::string_view kCorpusStats = "corpus_stats.json";
inline constexpr std::string_view kGraphsDir = "graphs";
inline constexpr std::string_view kWindows = "graphs/windows.csv";
inline constexpr std::string_view kNodes = "graphs/nodes.csv";
inline constexpr std::string_view kCentrality = "graphs/centrality.csv";
inline constexpr std::string_view kCommunities = "communities.csv";
inline constexpr std::string_view kModularity = "modularity.csv";
inline constexpr std::string_view kRoles = "roles.csv";
inline constexpr std::string_view kDataset = "dataset.csv";
inline constexpr std::string_view kReportsDir = "reports";
inline constexpr std::string_view kReportTable = "report_table.txt";

std::string edge_list_name(std::size_t snapshot);
}  // namespace artifacts

using Logger = std::function<void(std::string_view)>;

/// Each stage reads its inputs from, and writes its outputs to, config.out.
/// A missing upstream artifact raises StageError naming the file.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, Logger log = {});

  const PipelineConfig& config() const { return config_; }

  void synth();        // writes the synthetic corpus
  void ingest();       // posts.jsonl, corpus_stats.json
  void snapshots();    // graphs/
  void communities();  // communities.csv, modularity.csv
  void roles();        // roles.csv
  void features();     // dataset.csv
  void train();        // reports/<task>/<preset>.json
  std::string report();  // report_table.txt, returned as text

  /// ingest through report.
  void run();

  std::filesystem::path path(std::string_view artifact) const;
  std::filesystem::path corpus_path() const;

 private:
  template <typename Fn>
  auto guarded(std::string_view stage, Fn&& fn) -> decltype(fn());
  std::filesystem::path require(std::string_view artifact) const;
  void info(std::string_view message) const;

  PipelineConfig config_;
  Logger log_;
};

}  // namespace fluct
