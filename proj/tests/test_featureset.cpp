#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fluct/errors.hpp"
#include "fluct/evolution.hpp"
#include "fluct/featureset.hpp"
#include "support.hpp"

using namespace fluct;
using fluct::testing::at;
using fluct::testing::post;

namespace {

const Lexicon& sample_lexicon() {
  static const Lexicon lexicon = Lexicon::load(std::string(FLUCT_DATA_DIR) + "/sample_lexicon.tsv");
  return lexicon;
}

const IntentPatterns& sample_intents() {
  static const IntentPatterns patterns = IntentPatterns::load(std::string(FLUCT_DATA_DIR) + "/intent_phrases.txt");
  return patterns;
}

FeatureContext context_of(std::vector<PostRecord> posts) {
  return FeatureContext::from_posts(std::move(posts), 24, PropinquityConfig{}, sample_lexicon(), sample_intents());
}

// Window 0: a, b, c, d share one thread. Window 1: a, b, c, e share one.
std::vector<PostRecord> turnover_posts() {
  std::vector<PostRecord> posts;
  int id = 0;
  for (auto user : {"a", "b", "c", "d"}) posts.push_back(post("p" + std::to_string(id++), "t1", user, "2000-04-21T00:00:00Z"));
  for (auto user : {"a", "b", "c", "e"}) posts.push_back(post("p" + std::to_string(id++), "t2", user, "2000-05-16T00:00:00Z"));
  return posts;
}

std::vector<RoleLabel> labels_of(const FeatureContext& context) {
  std::vector<std::vector<Community>> by_snapshot;
  for (const auto& w : context.windows()) {
    by_snapshot.push_back(detect_communities(build_graph(context.posts(), w), PropinquityConfig{}));
  }
  return label_all_snapshots(by_snapshot);
}

}  // namespace

TEST_CASE("feature order is fixed") {
  const auto& names = feature_names();
  CHECK(names.size() == 18);
  CHECK(names.front() == "sentiment");
  CHECK(names[static_cast<std::size_t>(Feature::LastActivity)] == "last_activity");
  CHECK(names.back() == "modularity");
  for (std::size_t i = 0; i < names.size(); ++i) CHECK(parse_feature(names[i]) == static_cast<Feature>(i));
  const auto header = dataset_header();
  REQUIRE(header.size() == 22);
  CHECK(header[4] == "sentiment");
  CHECK(header[21] == "modularity");

  FeatureArray values{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) values[i] = static_cast<double>(i) + 0.5;
  const auto v = FeatureVector::from_array(values);
  CHECK(v.to_array() == values);
  CHECK(v.times_appeared_before == 5.5);
  CHECK(v.last_activity == 16.5);
}

TEST_CASE("user_window_measures examples") {
  const auto context = context_of({
      post("p1", "t1", "u1", "2000-04-21T00:00:00Z", "I am happy and sad, thinking I know"),
      post("p2", "t1", "u1", "2000-04-22T00:00:00Z", "great news, I will think it over"),
      post("p3", "t1", "u2", "2000-04-22T00:00:00Z", "happy happy"),
      post("p4", "t1", "u2", "2000-04-23T00:00:00Z", "happy"),
      post("p5", "t2", "u3", "2000-06-01T00:00:00Z", "happy"),
  });
  CHECK(user_window_measures(context, "u3", 0) == TextMeasures{});
  CHECK(user_window_measures(context, "nobody", 0) == TextMeasures{});
  CHECK(user_window_measures(context, "u2", 0).sentiment == 3.0);
  // Hand count: happy, sad, great / thinking, know, think / "i will".
  CHECK(user_window_measures(context, "u1", 0) == TextMeasures{3.0, 3.0, 1.0});
}

TEST_CASE("assemble_features on constructed histories") {
  const auto context = context_of({
      // Window 0: path a-b-c gives b betweenness 1.
      post("p1", "t1", "a", "2000-04-21T00:00:00Z"),
      post("p2", "t1", "b", "2000-04-21T01:00:00Z"),
      post("p3", "t2", "b", "2000-04-22T00:00:00Z", "happy happy"),
      post("p4", "t2", "c", "2000-04-22T01:00:00Z"),
      post("p5", "t2", "b", "2000-04-23T00:00:00Z", "meh"),
      post("p6", "t2", "b", "2000-05-05T00:00:00Z", "sad"),
      // Window 1 starts 2000-05-15.
      post("p7", "t3", "b", "2000-05-16T00:00:00Z", "happy"),
      post("p8", "t3", "e", "2000-05-17T00:00:00Z"),
  });
  REQUIRE(context.windows().size() == 2);

  const auto first = assemble_features(context, "e", 1);
  const auto values = first.to_array();
  for (std::size_t i = static_cast<std::size_t>(Feature::TimesAppearedBefore);
       i < static_cast<std::size_t>(Feature::LastActivity); ++i) {
    CHECK(values[i] == 0.0);
  }
  CHECK(first.last_activity == 24.0);
  CHECK(first.connectiveness == 1.0);

  const auto b = assemble_features(context, "b", 1);
  CHECK(b.avg_betweenness == 1.0);
  CHECK(b.last_betweenness == 1.0);
  CHECK(b.avg_connectiveness == 1.0);
  // Prior sentiments in time order: 0, 2, 0, 1.
  CHECK(b.times_appeared_before == 4.0);
  CHECK(b.avg_sentiment_before == 0.75);
  CHECK(b.last_sentiment == 1.0);
  CHECK(b.sentiment == 1.0);
  CHECK(b.last_activity == 10.0);

  CHECK_THROWS_AS(assemble_features(context, "zed", 1), std::invalid_argument);
  CHECK_THROWS_AS(assemble_features(context, "e", 0), std::invalid_argument);
  CHECK_THROWS_AS(assemble_features(context, "b", 2), std::invalid_argument);
}

TEST_CASE("three prior posts with sentiments 2, 0, 1") {
  const auto context = context_of({
      post("p1", "t1", "u", "2000-04-21T00:00:00Z", "happy glad"),
      post("p2", "t1", "u", "2000-04-22T00:00:00Z", "plain words"),
      post("p3", "t1", "u", "2000-04-23T00:00:00Z", "sad"),
      post("p4", "t2", "u", "2000-05-20T00:00:00Z"),
  });
  const auto f = assemble_features(context, "u", 1);
  CHECK(f.times_appeared_before == 3.0);
  CHECK(f.avg_sentiment_before == 1.0);
  CHECK(f.last_sentiment == 1.0);
  CHECK(f.last_activity == 22.0);
}

TEST_CASE("build_dataset on the turnover scenario") {
  const auto context = context_of(turnover_posts());
  const auto labels = labels_of(context);

  const auto join = build_dataset(labels, Task::JoinVsPrevious, context);
  REQUIRE(join.size() == 4);
  for (const auto& row : join) {
    CHECK(row.snapshot_index == 1);
    CHECK(row.positive == (row.user_id == "e"));
  }
  const auto leave = build_dataset(labels, Task::LeaveVsStay, context);
  REQUIRE(leave.size() == 4);
  for (const auto& row : leave) {
    CHECK(row.snapshot_index == 1);
    CHECK(row.positive == (row.user_id == "d"));
    // Features come from snapshot 0, where d was still present.
    CHECK(row.features == assemble_features(context, row.user_id, 0));
  }
}

TEST_CASE("build_dataset errors and precedence") {
  const auto context = context_of(turnover_posts());
  const std::vector<RoleLabel> previous_only = {{"a", 1, Role::Previous, 0}, {"b", 1, Role::Previous, 0}};
  CHECK_THROWS_AS(build_dataset(previous_only, Task::JoinVsPrevious, context), ModelError);

  const std::vector<RoleLabel> clash = {
      {"a", 1, Role::Previous, 0}, {"a", 1, Role::Joining, 1}, {"b", 1, Role::Previous, 0}};
  const auto rows = build_dataset(clash, Task::JoinVsPrevious, context);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].user_id == "a");
  CHECK(rows[0].positive);
  CHECK_FALSE(rows[1].positive);
}

namespace {

struct SyntheticCase {
  std::vector<PostRecord> posts;
  std::vector<LabeledExample> rows;
};

const SyntheticCase& synthetic_case() {
  static const SyntheticCase c = [] {
    SyntheticCase out;
    out.posts = generate_synthetic_forum(5, {90, 80, 6, 24, 1.0});
    const auto context = context_of(out.posts);
    const auto labels = labels_of(context);
    for (auto task : {Task::JoinVsPrevious, Task::LeaveVsStay}) {
      auto rows = build_dataset(labels, task, context);
      out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }
    return out;
  }();
  return c;
}

}  // namespace

TEST_CASE("dataset rows satisfy the feature invariants") {
  const auto& c = synthetic_case();
  REQUIRE(c.rows.size() > 20);
  for (const auto& row : c.rows) {
    const auto v = row.features.to_array();
    for (double x : v) CHECK(std::isfinite(x));
    for (std::size_t i = 0; i < static_cast<std::size_t>(Feature::Modularity); ++i) CHECK(v[i] >= 0.0);
    if (row.features.times_appeared_before == 0.0) {
      for (std::size_t i = static_cast<std::size_t>(Feature::AvgSentimentBefore);
           i <= static_cast<std::size_t>(Feature::AvgIntentBefore); ++i) {
        CHECK(v[i] == 0.0);
      }
      CHECK(row.features.last_sentiment == 0.0);
      CHECK(row.features.last_cognition == 0.0);
      CHECK(row.features.last_intent == 0.0);
    }
  }
}

TEST_CASE("recomputing from shuffled raw posts reproduces every row exactly") {
  const auto& c = synthetic_case();
  auto shuffled = c.posts;
  std::mt19937_64 rng(12);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto fresh = context_of(shuffled);
  for (const auto& row : c.rows) {
    const auto again = assemble_features(fresh, row.user_id, feature_snapshot_for(row.task, row.snapshot_index));
    CHECK(again.to_array() == row.features.to_array());
  }
}

TEST_CASE("history fields ignore everything from the window start on") {
  const auto& c = synthetic_case();
  const auto full = context_of(c.posts);
  for (const auto& row : c.rows) {
    const auto t = feature_snapshot_for(row.task, row.snapshot_index);
    if (t == 0) continue;
    const auto& window = full.windows()[t];
    // Keep the past and window t itself; rewrite window t's text so only the
    // current-window fields could notice.
    std::vector<PostRecord> truncated;
    for (auto p : c.posts) {
      if (p.created_at >= window.end) continue;
      if (window.contains(p.created_at)) p.body = "happy think i will";
      truncated.push_back(std::move(p));
    }
    const auto cut = context_of(truncated);
    const auto a = full.assemble(row.user_id, t).to_array();
    const auto b = cut.assemble(row.user_id, t).to_array();
    for (std::size_t i = static_cast<std::size_t>(Feature::TimesAppearedBefore);
         i <= static_cast<std::size_t>(Feature::LastActivity); ++i) {
      CAPTURE(i);
      CHECK(a[i] == b[i]);
    }
  }
}

TEST_CASE("dataset CSV round trip") {
  const auto& c = synthetic_case();
  std::ostringstream out;
  write_dataset(out, c.rows);
  std::istringstream in(out.str());
  const auto back = read_dataset(in);
  REQUIRE(back.size() == c.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].user_id == c.rows[i].user_id);
    CHECK(back[i].snapshot_index == c.rows[i].snapshot_index);
    CHECK(back[i].task == c.rows[i].task);
    CHECK(back[i].positive == c.rows[i].positive);
    CHECK(back[i].features == c.rows[i].features);
  }

  std::istringstream bad("task,snapshot_index\n");
  CHECK_THROWS_AS(read_dataset(bad), DataError);
}
