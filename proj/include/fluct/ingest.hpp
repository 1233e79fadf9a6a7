#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fluct/timestamp.hpp"

namespace fluct {

struct PostRecord {
  std::string post_id;
  std::string thread_id;
  std::string user_id;
  Timestamp created_at;
  std::string body;

  bool operator==(const PostRecord&) const = default;
};

enum class CorpusFormat { Jsonl, Csv };

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

/// Picks the format from a file extension (.jsonl / .csv).
CorpusFormat format_for_path(std::string_view path);

struct CorpusStats {
  std::size_t post_count = 0;
  std::size_t user_count = 0;
  std::size_t thread_count = 0;
  double avg_thread_depth = 0.0;
  Timestamp first_post;
  Timestamp last_post;
};

/// Reads a whole corpus in input order. Any malformed row, bad timestamp or
/// repeated post_id aborts with a DataError naming the line.
std::vector<PostRecord> parse_posts(std::istream& in, CorpusFormat format);
std::vector<PostRecord> load_posts(const std::string& path, CorpusFormat format);

void write_posts(std::ostream& out, const std::vector<PostRecord>& posts,
                 CorpusFormat format);

/// Throws DataError on an empty corpus.
CorpusStats corpus_stats(const std::vector<PostRecord>& posts);

std::string corpus_stats_json(const CorpusStats& stats);

struct SyntheticParams {
  std::size_t n_users = 300;
  std::size_t n_threads = 240;
  std::size_t n_windows = 16;
  int window_days = 24;
  double churn_signal_strength = 1.0;
};

/// Ground truth planted by the generator: members of a group in `window`
/// who are absent from that group in `window + 1`.
struct PlantedDeparture {
  std::string user_id;
  std::size_t window = 0;
  std::size_t group = 0;
  bool leaves = false;
};

struct SyntheticForum {
  std::vector<PostRecord> posts;
  std::vector<PlantedDeparture> memberships;
};

/// Seeded forum with stable discussion groups whose membership turns over
/// every window. Members about to leave post fewer cognition words and join
/// fewer threads than members who stay, scaled by churn_signal_strength in
/// [0, 1]. Nothing in the posts names the outcome.
SyntheticForum generate_synthetic_forum_with_truth(std::uint64_t seed,
                                                   const SyntheticParams& params);

std::vector<PostRecord> generate_synthetic_forum(std::uint64_t seed,
                                                 const SyntheticParams& params);

/// Vocabulary the generator draws from, exposed so tests can check it
/// against the bundled lexicon.
struct SyntheticVocabulary {
  std::vector<std::string_view> cognition;
  std::vector<std::string_view> sentiment;
  std::vector<std::string_view> filler;
  std::vector<std::string_view> intent;
};
const SyntheticVocabulary& synthetic_vocabulary();

}  // namespace fluct
