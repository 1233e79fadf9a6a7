#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fluct/ingest.hpp"

namespace fluct {

namespace {

constexpr std::string_view kCognition[] = {
    "think",   "know",      "because", "reason",  "understand", "consider", "question",
    "believe", "maybe",     "perhaps", "wonder",  "realize",    "cause",    "analyze",
    "figure",  "learn",     "explain", "decide",  "guess",      "assume",   "compare",
    "solve",   "thinking",  "knowing", "reasons", "understood", "decided",  "learned"};

constexpr std::string_view kSentiment[] = {
    "happy",  "glad",     "great",    "love",    "nice",   "sad",     "worried",
    "angry",  "hate",     "annoyed",  "excited", "awesome", "terrible", "upset",
    "afraid", "lonely",   "hurt",     "stressed", "proud",  "hopeless"};

constexpr std::string_view kFiller[] = {
    "the",   "a",        "to",       "of",     "and",     "in",        "for",     "on",
    "with",  "exam",     "class",    "step",   "rotation", "patient",  "hospital", "school",
    "program", "score",  "interview", "week",  "today",   "anyone",    "here",    "clinic",
    "notes", "lab",      "book",     "chapter", "residency", "schedule", "forum",  "reply",
    "my",    "your",     "this",     "that",   "is",      "was",       "it",      "at",
    "med",   "board",    "shift",    "call",   "year",    "month",     "review",  "bank"};

constexpr std::string_view kIntent[] = {"i will", "i plan to", "i am going to"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return static_cast<std::size_t>(x % bound);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

std::string padded_id(char prefix, std::size_t value, std::size_t count) {
  const std::size_t width = std::max<std::size_t>(4, std::to_string(count).size());
  std::string digits = std::to_string(value);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

struct Draft {
  std::size_t user;
  std::size_t thread;
  long offset_seconds;  // from corpus start
  std::string body;
};

std::string make_body(Rng& rng, double cognition_rate) {
  constexpr double kSentimentRate = 0.08;
  std::string body;
  if (rng.uniform() < 0.15) body = std::string(kIntent[rng.below(std::size(kIntent))]);
  const std::size_t words = 8 + rng.below(9);
  for (std::size_t i = 0; i < words; ++i) {
    const double r = rng.uniform();
    std::string_view word;
    if (r < cognition_rate) word = kCognition[rng.below(std::size(kCognition))];
    else if (r < cognition_rate + kSentimentRate) word = kSentiment[rng.below(std::size(kSentiment))];
    else word = kFiller[rng.below(std::size(kFiller))];
    if (!body.empty()) body.push_back(' ');
    body += word;
  }
  body[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(body[0])));
  body.push_back('.');
  return body;
}

}  // namespace

const SyntheticVocabulary& synthetic_vocabulary() {
  static const SyntheticVocabulary vocab{
      {std::begin(kCognition), std::end(kCognition)},
      {std::begin(kSentiment), std::end(kSentiment)},
      {std::begin(kFiller), std::end(kFiller)},
      {std::begin(kIntent), std::end(kIntent)},
  };
  return vocab;
}

SyntheticForum generate_synthetic_forum_with_truth(std::uint64_t seed, const SyntheticParams& params) {
  if (params.n_users < 6) throw std::invalid_argument("synthetic forum needs at least 6 users");
  if (params.n_windows < 1) throw std::invalid_argument("synthetic forum needs at least 1 window");
  if (params.window_days < 1) throw std::invalid_argument("window_days must be positive");
  if (!(params.churn_signal_strength >= 0.0 && params.churn_signal_strength <= 1.0)) {
    throw std::invalid_argument("churn_signal_strength must lie in [0, 1]");
  }
  const std::size_t n_groups = std::max<std::size_t>(1, params.n_users / 30);
  if (params.n_threads < 3 * n_groups) {
    throw std::invalid_argument("synthetic forum needs at least 3 threads per group (" +
                                std::to_string(3 * n_groups) + ")");
  }

  Rng rng(seed);
  const double s = params.churn_signal_strength;
  constexpr double kParticipation = 0.8;
  constexpr double kCognitionRate = 0.15;
  const double leaver_participation = kParticipation * (1.0 - 0.7 * s);
  const double leaver_cognition = kCognitionRate * (1.0 - 0.85 * s);

  // Group thread pools are disjoint. The remaining threads host one-off
  // posts by users outside every group.
  const std::size_t group_thread_total = std::max(3 * n_groups, params.n_threads * 3 / 4);
  const std::size_t per_group = group_thread_total / n_groups;
  const std::size_t noise_first = per_group * n_groups;
  const std::size_t noise_threads = params.n_threads - noise_first;

  const std::size_t base_size =
      std::max<std::size_t>(4, static_cast<std::size_t>(static_cast<double>(params.n_users) /
                                                        (2.5 * static_cast<double>(n_groups))));
  std::vector<std::size_t> target(n_groups);
  for (auto& t : target) {
    const long jitter = static_cast<long>(rng.below(3)) - 1;  // -1, 0, +1
    t = static_cast<std::size_t>(std::max<long>(4, static_cast<long>(base_size) + 2 * jitter));
  }

  std::vector<std::size_t> order(params.n_users);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> groups(n_groups);
  std::vector<bool> active(params.n_users, false);
  {
    std::size_t next = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
      while (groups[g].size() < target[g] && next < order.size()) {
        groups[g].push_back(order[next]);
        active[order[next++]] = true;
      }
    }
  }

  const long window_seconds = 86400L * params.window_days;
  std::vector<Draft> drafts;
  SyntheticForum forum;
  std::vector<bool> leaving(params.n_users, false);

  for (std::size_t w = 0; w < params.n_windows; ++w) {
    const long window_start = static_cast<long>(w) * window_seconds;
    auto post_time = [&] { return window_start + static_cast<long>(rng.below(static_cast<std::size_t>(window_seconds))); };
    const bool last_window = w + 1 == params.n_windows;

    for (std::size_t g = 0; g < n_groups; ++g) {
      auto& members = groups[g];
      if (members.empty()) continue;

      std::vector<std::size_t> shuffled = members;
      rng.shuffle(shuffled);
      const std::size_t n_leave = members.size() / 2;
      for (std::size_t i = 0; i < shuffled.size(); ++i) leaving[shuffled[i]] = i < n_leave;

      std::vector<std::size_t> pool(per_group);
      std::iota(pool.begin(), pool.end(), g * per_group);
      rng.shuffle(pool);
      pool.resize(std::min<std::size_t>(3, per_group));

      // participation[k] = members posting in pool[k]
      std::vector<std::vector<std::size_t>> participation(pool.size());
      for (std::size_t m : members) {
        const double p = leaving[m] ? leaver_participation : kParticipation;
        bool any = false;
        for (std::size_t k = 0; k < pool.size(); ++k) {
          if (rng.uniform() < p) {
            participation[k].push_back(m);
            any = true;
          }
        }
        if (!any) participation[rng.below(pool.size())].push_back(m);
      }
      const std::size_t host = members[rng.below(members.size())];
      for (auto& list : participation) {
        if (std::find(list.begin(), list.end(), host) == list.end()) list.push_back(host);
        while (list.size() < std::min<std::size_t>(3, members.size())) {
          const std::size_t extra = members[rng.below(members.size())];
          if (std::find(list.begin(), list.end(), extra) == list.end()) list.push_back(extra);
        }
      }

      for (std::size_t k = 0; k < pool.size(); ++k) {
        for (std::size_t m : participation[k]) {
          const double rate = leaving[m] ? leaver_cognition : kCognitionRate;
          const std::size_t n_posts = rng.uniform() < 0.35 ? 2 : 1;
          for (std::size_t i = 0; i < n_posts; ++i) {
            drafts.push_back({m, pool[k], post_time(), make_body(rng, rate)});
          }
        }
      }

      for (std::size_t m : members) {
        forum.memberships.push_back({"", w, g, !last_window && leaving[m]});
        forum.memberships.back().user_id = padded_id('u', m + 1, params.n_users);
      }
    }

    // One-off posts by idle users, each in its own thread for this window.
    std::vector<std::size_t> idle;
    for (std::size_t u = 0; u < params.n_users; ++u) {
      if (!active[u]) idle.push_back(u);
    }
    rng.shuffle(idle);
    const std::size_t solo = std::min({noise_threads, idle.size(), params.n_users / 20});
    for (std::size_t i = 0; i < solo; ++i) {
      drafts.push_back({idle[i], noise_first + i, post_time(), make_body(rng, kCognitionRate)});
    }

    if (last_window) break;

    // Turnover: leavers drop out, idle users fill the groups back up.
    std::vector<std::size_t> candidates;
    for (std::size_t u = 0; u < params.n_users; ++u) {
      if (!active[u]) candidates.push_back(u);
    }
    rng.shuffle(candidates);
    std::size_t next_candidate = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
      auto& members = groups[g];
      const std::size_t size_before = members.size();
      std::vector<std::size_t> stayers;
      for (std::size_t m : members) {
        if (leaving[m]) active[m] = false;
        else stayers.push_back(m);
      }
      const std::size_t next_size = size_before == target[g] ? target[g] - 1 : target[g];
      while (stayers.size() < next_size && next_candidate < candidates.size()) {
        const std::size_t joiner = candidates[next_candidate++];
        stayers.push_back(joiner);
        active[joiner] = true;
      }
      members = std::move(stayers);
    }
    std::fill(leaving.begin(), leaving.end(), false);
  }

  if (drafts.empty()) return forum;
  // Pin the earliest post to the corpus start.
  std::min_element(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    return a.offset_seconds < b.offset_seconds;
  })->offset_seconds = 0;
  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Draft& a, const Draft& b) { return a.offset_seconds < b.offset_seconds; });

  using namespace std::chrono;
  const Timestamp base = sys_days{year{2000} / April / 21};
  forum.posts.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const auto& d = drafts[i];
    forum.posts.push_back({padded_id('p', i + 1, drafts.size()), padded_id('t', d.thread + 1, params.n_threads),
                           padded_id('u', d.user + 1, params.n_users), base + seconds{d.offset_seconds},
                           d.body});
  }
  return forum;
}

std::vector<PostRecord> generate_synthetic_forum(std::uint64_t seed, const SyntheticParams& params) {
  return generate_synthetic_forum_with_truth(seed, params).posts;
}

}  // namespace fluct
