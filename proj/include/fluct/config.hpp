#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fluct/community.hpp"
#include "fluct/evolution.hpp"
#include "fluct/ingest.hpp"
#include "fluct/model.hpp"

namespace fluct {

struct PipelineConfig {
  std::filesystem::path input;  // empty: <out>/corpus.jsonl written by `synth`
  std::optional<CorpusFormat> format;  // empty: from the input extension
  int window_days = 24;
  PropinquityConfig propinquity;
  std::filesystem::path lexicon = std::filesystem::path(FLUCT_DATA_DIR) / "sample_lexicon.tsv";
  std::filesystem::path intents = std::filesystem::path(FLUCT_DATA_DIR) / "intent_phrases.txt";
  std::vector<Task> tasks{Task::LeaveVsStay, Task::JoinVsPrevious};
  Hyperparameters hyper;
  CvConfig cv;
  std::filesystem::path out = "fluct_out";
  SyntheticParams synth;
  CorpusFormat synth_format = CorpusFormat::Jsonl;

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

/// Flat `key = value` text; '#' starts a comment. Unknown keys and bad
/// values throw std::invalid_argument naming the key and line.
PipelineConfig parse_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Renders every key with its current value, in the parse_config syntax.
std::string dump_config(const PipelineConfig& config);

}  // namespace fluct
