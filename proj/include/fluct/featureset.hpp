#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fluct/evolution.hpp"
#include "fluct/graph.hpp"
#include "fluct/ingest.hpp"
#include "fluct/lexifeat.hpp"

namespace fluct {

inline constexpr std::size_t kFeatureCount = 18;

/// Column order of every feature row, report and dataset header.
enum class Feature : std::size_t {
  Sentiment,
  Cognition,
  Intent,
  Connectiveness,
  Betweenness,
  TimesAppearedBefore,
  AvgSentimentBefore,
  AvgCognitionBefore,
  AvgIntentBefore,
  AvgConnectiveness,
  AvgBetweenness,
  LastSentiment,
  LastCognition,
  LastIntent,
  LastConnectiveness,
  LastBetweenness,
  LastActivity,
  Modularity,
};

using FeatureArray = std::array<double, kFeatureCount>;
using FeatureMask = std::bitset<kFeatureCount>;

const std::array<std::string_view, kFeatureCount>& feature_names();
std::string_view to_string(Feature feature);
Feature parse_feature(std::string_view name);

struct FeatureVector {
  // Current window / snapshot.
  double sentiment = 0.0;
  double cognition = 0.0;
  double intent = 0.0;
  double connectiveness = 0.0;
  double betweenness = 0.0;
  // Strictly before the window start.
  double times_appeared_before = 0.0;
  double avg_sentiment_before = 0.0;
  double avg_cognition_before = 0.0;
  double avg_intent_before = 0.0;
  double avg_connectiveness = 0.0;
  double avg_betweenness = 0.0;
  double last_sentiment = 0.0;
  double last_cognition = 0.0;
  double last_intent = 0.0;
  double last_connectiveness = 0.0;
  double last_betweenness = 0.0;
  double last_activity = 0.0;  // days
  // Snapshot level.
  double modularity = 0.0;

  FeatureArray to_array() const;
  static FeatureVector from_array(const FeatureArray& values);
  bool operator==(const FeatureVector&) const = default;
};

/// Everything that happened strictly before a window start.
struct HistoryMeasures {
  std::size_t prior_posts = 0;
  TextMeasures avg_text;
  TextMeasures last_text;
  std::size_t prior_snapshots = 0;
  double avg_closeness = 0.0;
  double avg_betweenness = 0.0;
  double last_closeness = 0.0;
  double last_betweenness = 0.0;
  double last_activity_days = 0.0;
};

/// Per-snapshot inputs the feature assembly reads.
struct SnapshotMeasures {
  CentralityScores centrality;
  double modularity = 0.0;
};

/// Indexed view over a corpus: per-post text measures, per-user timelines and
/// per-snapshot centralities and modularity. Immutable once built.
class FeatureContext {
 public:
  FeatureContext(std::vector<PostRecord> posts, std::vector<SnapshotWindow> windows,
                 std::vector<SnapshotMeasures> snapshots, const Lexicon& lexicon,
                 const IntentPatterns& patterns);

  /// Builds graphs, centralities, communities and modularity from raw posts.
  static FeatureContext from_posts(std::vector<PostRecord> posts, int window_days,
                                   const PropinquityConfig& propinquity,
                                   const Lexicon& lexicon, const IntentPatterns& patterns);

  const std::vector<PostRecord>& posts() const { return posts_; }
  const std::vector<SnapshotWindow>& windows() const { return windows_; }
  const std::vector<SnapshotMeasures>& snapshots() const { return snapshots_; }
  Timestamp corpus_start() const { return corpus_start_; }

  bool knows_user(std::string_view user) const;
  /// Sums of per-post measures for the user's posts inside the window.
  TextMeasures user_window_measures(std::string_view user, std::size_t snapshot) const;
  HistoryMeasures history(std::string_view user, std::size_t snapshot) const;

  /// Throws std::invalid_argument for an unknown user, an out-of-range
  /// snapshot, or a user with no presence in the snapshot.
  FeatureVector assemble(std::string_view user, std::size_t snapshot) const;

  const TextMeasures& post_measures(std::size_t post_index) const {
    return post_measures_[post_index];
  }

 private:
  std::vector<PostRecord> posts_;
  std::vector<SnapshotWindow> windows_;
  std::vector<SnapshotMeasures> snapshots_;
  std::vector<TextMeasures> post_measures_;
  // user -> post indices ordered by (created_at, post_id)
  std::map<std::string, std::vector<std::size_t>, std::less<>> timelines_;
  Timestamp corpus_start_;
};

/// Free-function form over a context.
TextMeasures user_window_measures(const FeatureContext& context, std::string_view user,
                                  std::size_t snapshot);
FeatureVector assemble_features(const FeatureContext& context, std::string_view user,
                                std::size_t snapshot);

struct LabeledExample {
  std::string user_id;
  std::size_t snapshot_index = 0;  // label snapshot t
  Task task = Task::LeaveVsStay;
  bool positive = false;
  FeatureVector features;
};

/// Feature snapshot used for a label: t for JoinVsPrevious, t-1 for
/// LeaveVsStay.
std::size_t feature_snapshot_for(Task task, std::size_t label_snapshot);

/// Rows for one task, ordered by (snapshot, user). Duplicate (user, snapshot)
/// labels collapse to one row, positive winning. Throws ModelError when the
/// task ends up with no positive or no negative rows.
std::vector<LabeledExample> build_dataset(const std::vector<RoleLabel>& labels, Task task,
                                          const FeatureContext& context);

std::vector<std::string> dataset_header();
void write_dataset(std::ostream& out, const std::vector<LabeledExample>& rows,
                   bool header = true);
/// Throws DataError on a malformed file or header mismatch.
std::vector<LabeledExample> read_dataset(std::istream& in);

}  // namespace fluct
