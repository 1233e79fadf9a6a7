#include "fluct/featureset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "fluct/community.hpp"
#include "fluct/csv.hpp"
#include "fluct/errors.hpp"

namespace fluct {

namespace {
constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "sentiment",           "cognition",           "intent",
    "connectiveness",      "betweenness",         "times_appeared_before",
    "avg_sentiment_before", "avg_cognition_before", "avg_intent_before",
    "avg_connectiveness",  "avg_betweenness",     "last_sentiment",
    "last_cognition",      "last_intent",         "last_connectiveness",
    "last_betweenness",    "last_activity",       "modularity",
};
}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() { return kFeatureNames; }

std::string_view to_string(Feature feature) {
  return kFeatureNames[static_cast<std::size_t>(feature)];
}

Feature parse_feature(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  }
  throw std::invalid_argument("unknown feature '" + std::string(name) + "'");
}

FeatureArray FeatureVector::to_array() const {
  return {sentiment,          cognition,          intent,           connectiveness,
          betweenness,        times_appeared_before, avg_sentiment_before, avg_cognition_before,
          avg_intent_before,  avg_connectiveness, avg_betweenness,  last_sentiment,
          last_cognition,     last_intent,        last_connectiveness, last_betweenness,
          last_activity,      modularity};
}

FeatureVector FeatureVector::from_array(const FeatureArray& v) {
  return {v[0],  v[1],  v[2],  v[3],  v[4],  v[5],  v[6],  v[7],  v[8],
          v[9],  v[10], v[11], v[12], v[13], v[14], v[15], v[16], v[17]};
}

FeatureContext::FeatureContext(std::vector<PostRecord> posts, std::vector<SnapshotWindow> windows,
                               std::vector<SnapshotMeasures> snapshots, const Lexicon& lexicon,
                               const IntentPatterns& patterns)
    : posts_(std::move(posts)), windows_(std::move(windows)), snapshots_(std::move(snapshots)) {
  if (posts_.empty()) throw DataError("empty corpus");
  if (snapshots_.size() != windows_.size()) {
    throw std::invalid_argument("one snapshot measure set is required per window");
  }
  corpus_start_ = posts_.front().created_at;
  post_measures_.reserve(posts_.size());
  for (std::size_t i = 0; i < posts_.size(); ++i) {
    corpus_start_ = std::min(corpus_start_, posts_[i].created_at);
    post_measures_.push_back(measure_text(posts_[i].body, lexicon, patterns));
    timelines_[posts_[i].user_id].push_back(i);
  }
  for (auto& [user, indices] : timelines_) {
    std::sort(indices.begin(), indices.end(), [this](std::size_t a, std::size_t b) {
      const auto& pa = posts_[a];
      const auto& pb = posts_[b];
      return std::tie(pa.created_at, pa.post_id) < std::tie(pb.created_at, pb.post_id);
    });
  }
}

FeatureContext FeatureContext::from_posts(std::vector<PostRecord> posts, int window_days,
                                          const PropinquityConfig& propinquity,
                                          const Lexicon& lexicon, const IntentPatterns& patterns) {
  const CorpusStats stats = corpus_stats(posts);
  auto windows = build_windows(stats.first_post, stats.last_post, window_days);
  auto graphs = build_all_graphs(posts, windows);
  std::vector<SnapshotMeasures> snapshots;
  snapshots.reserve(graphs.size());
  for (const auto& g : graphs) {
    snapshots.push_back({centrality_scores(g), modularity(g, detect_communities(g, propinquity))});
  }
  return FeatureContext(std::move(posts), std::move(windows), std::move(snapshots), lexicon, patterns);
}

bool FeatureContext::knows_user(std::string_view user) const {
  return timelines_.find(user) != timelines_.end();
}

TextMeasures FeatureContext::user_window_measures(std::string_view user, std::size_t snapshot) const {
  if (snapshot >= windows_.size()) throw std::invalid_argument("snapshot index out of range");
  TextMeasures total;
  auto it = timelines_.find(user);
  if (it == timelines_.end()) return total;
  const auto& window = windows_[snapshot];
  for (std::size_t i : it->second) {
    if (window.contains(posts_[i].created_at)) total += post_measures_[i];
  }
  return total;
}

HistoryMeasures FeatureContext::history(std::string_view user, std::size_t snapshot) const {
  if (snapshot >= windows_.size()) throw std::invalid_argument("snapshot index out of range");
  HistoryMeasures h;
  const Timestamp start = windows_[snapshot].start;
  h.last_activity_days = days_between(corpus_start_, start);

  auto it = timelines_.find(user);
  if (it == timelines_.end()) return h;

  TextMeasures sum;
  const PostRecord* last = nullptr;
  for (std::size_t i : it->second) {
    if (posts_[i].created_at >= start) break;  // timeline is chronological
    sum += post_measures_[i];
    h.last_text = post_measures_[i];
    last = &posts_[i];
    ++h.prior_posts;
  }
  if (h.prior_posts > 0) {
    const double n = static_cast<double>(h.prior_posts);
    h.avg_text = {sum.sentiment / n, sum.cognition / n, sum.intent / n};
    h.last_activity_days = days_between(last->created_at, start);
  }

  double closeness_sum = 0.0, betweenness_sum = 0.0;
  for (std::size_t s = 0; s < snapshot; ++s) {
    const auto& c = snapshots_[s].centrality;
    auto cl = c.closeness.find(user);
    if (cl == c.closeness.end()) continue;
    auto bt = c.betweenness.find(user);
    const double b = bt == c.betweenness.end() ? 0.0 : bt->second;
    closeness_sum += cl->second;
    betweenness_sum += b;
    h.last_closeness = cl->second;
    h.last_betweenness = b;
    ++h.prior_snapshots;
  }
  if (h.prior_snapshots > 0) {
    const double n = static_cast<double>(h.prior_snapshots);
    h.avg_closeness = closeness_sum / n;
    h.avg_betweenness = betweenness_sum / n;
  }
  return h;
}

FeatureVector FeatureContext::assemble(std::string_view user, std::size_t snapshot) const {
  if (!knows_user(user)) throw std::invalid_argument("unknown user '" + std::string(user) + "'");
  if (snapshot >= windows_.size()) throw std::invalid_argument("snapshot index out of range");
  const auto& measures = snapshots_[snapshot];
  auto cl = measures.centrality.closeness.find(user);
  if (cl == measures.centrality.closeness.end()) {
    throw std::invalid_argument("user '" + std::string(user) + "' is absent from snapshot " +
                                std::to_string(snapshot));
  }
  auto bt = measures.centrality.betweenness.find(user);

  const TextMeasures current = user_window_measures(user, snapshot);
  const HistoryMeasures h = history(user, snapshot);

  FeatureVector f;
  f.sentiment = current.sentiment;
  f.cognition = current.cognition;
  f.intent = current.intent;
  f.connectiveness = cl->second;
  f.betweenness = bt == measures.centrality.betweenness.end() ? 0.0 : bt->second;
  f.times_appeared_before = static_cast<double>(h.prior_posts);
  f.avg_sentiment_before = h.avg_text.sentiment;
  f.avg_cognition_before = h.avg_text.cognition;
  f.avg_intent_before = h.avg_text.intent;
  f.avg_connectiveness = h.avg_closeness;
  f.avg_betweenness = h.avg_betweenness;
  f.last_sentiment = h.last_text.sentiment;
  f.last_cognition = h.last_text.cognition;
  f.last_intent = h.last_text.intent;
  f.last_connectiveness = h.last_closeness;
  f.last_betweenness = h.last_betweenness;
  f.last_activity = h.last_activity_days;
  f.modularity = measures.modularity;
  return f;
}

TextMeasures user_window_measures(const FeatureContext& context, std::string_view user,
                                  std::size_t snapshot) {
  return context.user_window_measures(user, snapshot);
}

FeatureVector assemble_features(const FeatureContext& context, std::string_view user,
                                std::size_t snapshot) {
  return context.assemble(user, snapshot);
}

std::size_t feature_snapshot_for(Task task, std::size_t label_snapshot) {
  if (task == Task::JoinVsPrevious) return label_snapshot;
  if (label_snapshot == 0) throw std::invalid_argument("LeaveVsStay labels start at snapshot 1");
  return label_snapshot - 1;
}

std::vector<LabeledExample> build_dataset(const std::vector<RoleLabel>& labels, Task task,
                                          const FeatureContext& context) {
  // (snapshot, user) -> positive?
  std::map<std::pair<std::size_t, std::string>, bool> chosen;
  for (const auto& l : labels) {
    if (task_of(l.role) != task) continue;
    auto [it, inserted] = chosen.try_emplace({l.snapshot_index, l.user_id}, is_positive(l.role));
    if (!inserted) it->second = it->second || is_positive(l.role);
  }
  std::vector<LabeledExample> rows;
  std::size_t positives = 0;
  for (const auto& [key, positive] : chosen) {
    LabeledExample ex;
    ex.snapshot_index = key.first;
    ex.user_id = key.second;
    ex.task = task;
    ex.positive = positive;
    ex.features = context.assemble(ex.user_id, feature_snapshot_for(task, ex.snapshot_index));
    positives += positive ? 1 : 0;
    rows.push_back(std::move(ex));
  }
  if (positives == 0 || positives == rows.size()) {
    throw ModelError("degenerate dataset for task " + std::string(to_string(task)) + ": " +
                     std::to_string(positives) + " positive and " +
                     std::to_string(rows.size() - positives) + " negative examples");
  }
  return rows;
}

std::vector<std::string> dataset_header() {
  std::vector<std::string> header = {"task", "snapshot_index", "user_id", "label"};
  for (auto name : kFeatureNames) header.emplace_back(name);
  return header;
}

void write_dataset(std::ostream& out, const std::vector<LabeledExample>& rows, bool header) {
  if (header) csv::write_row(out, dataset_header());
  for (const auto& r : rows) {
    std::vector<std::string> fields = {std::string(to_string(r.task)), std::to_string(r.snapshot_index),
                                       r.user_id, r.positive ? "1" : "0"};
    for (double v : r.features.to_array()) fields.push_back(csv::format_real(v));
    csv::write_row(out, fields);
  }
}

std::vector<LabeledExample> read_dataset(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty() || rows.front().fields != dataset_header()) {
    throw DataError("dataset: header does not match the expected feature columns");
  }
  std::vector<LabeledExample> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() == 1 && f[0].empty()) continue;
    const std::string where = "dataset line " + std::to_string(rows[r].line) + ": ";
    if (f.size() != 4 + kFeatureCount) throw DataError(where + "wrong column count");
    try {
      LabeledExample ex;
      ex.task = parse_task(f[0]);
      ex.snapshot_index = std::stoul(f[1]);
      ex.user_id = f[2];
      if (f[3] != "0" && f[3] != "1") throw std::invalid_argument("label must be 0 or 1");
      ex.positive = f[3] == "1";
      FeatureArray values{};
      for (std::size_t i = 0; i < kFeatureCount; ++i) {
        const std::string& text = f[4 + i];
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), values[i]);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(values[i])) {
          throw std::invalid_argument("bad value for " + std::string(kFeatureNames[i]));
        }
      }
      ex.features = FeatureVector::from_array(values);
      out.push_back(std::move(ex));
    } catch (const std::exception& e) {
      throw DataError(where + e.what());
    }
  }
  return out;
}

}  // namespace fluct
