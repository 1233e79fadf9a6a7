#include "fluct/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "fluct/csv.hpp"
#include "fluct/errors.hpp"

namespace fluct {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 5> kColumns = {"post_id", "thread_id", "user_id",
                                                      "created_at", "body"};

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw DataError("line " + std::to_string(line) + ": " + message);
}

class Collector {
 public:
  void add(std::size_t line, PostRecord record) {
    if (!ids_.insert(record.post_id).second) {
      fail(line, "duplicate post_id '" + record.post_id + "'");
    }
    posts_.push_back(std::move(record));
  }
  std::vector<PostRecord> take() { return std::move(posts_); }

 private:
  std::vector<PostRecord> posts_;
  std::unordered_set<std::string> ids_;
};

PostRecord make_record(std::size_t line, std::string post_id, std::string thread_id,
                       std::string user_id, std::string_view created_at, std::string body) {
  if (post_id.empty()) fail(line, "empty post_id");
  if (thread_id.empty()) fail(line, "empty thread_id");
  if (user_id.empty()) fail(line, "empty user_id");
  auto ts = parse_timestamp(created_at);
  if (!ts) fail(line, "unparseable timestamp '" + std::string(created_at) + "'");
  return PostRecord{std::move(post_id), std::move(thread_id), std::move(user_id), *ts,
                    std::move(body)};
}

std::vector<PostRecord> parse_jsonl(std::istream& in) {
  Collector posts;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(line, std::string("malformed JSON: ") + e.what());
    }
    if (!row.is_object()) fail(line, "expected a JSON object");
    if (row.size() != kColumns.size()) fail(line, "expected exactly the keys post_id, thread_id, user_id, created_at, body");
    std::array<std::string, 5> values;
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
      auto it = row.find(kColumns[i]);
      if (it == row.end()) fail(line, "missing key '" + std::string(kColumns[i]) + "'");
      if (!it->is_string()) fail(line, "key '" + std::string(kColumns[i]) + "' must be a string");
      values[i] = it->get<std::string>();
    }
    posts.add(line, make_record(line, std::move(values[0]), std::move(values[1]),
                                std::move(values[2]), values[3], std::move(values[4])));
  }
  return posts.take();
}

std::vector<PostRecord> parse_csv(std::istream& in) {
  Collector posts;
  csv::Reader reader(in);
  csv::Row row;
  bool header_seen = false;
  while (reader.next(row)) {
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (!header_seen) {
      if (row.fields.size() != kColumns.size() ||
          !std::equal(kColumns.begin(), kColumns.end(), row.fields.begin())) {
        fail(row.line, "expected header post_id,thread_id,user_id,created_at,body");
      }
      header_seen = true;
      continue;
    }
    if (row.fields.size() != kColumns.size()) {
      fail(row.line, "expected 5 columns, got " + std::to_string(row.fields.size()));
    }
    auto& f = row.fields;
    posts.add(row.line, make_record(row.line, std::move(f[0]), std::move(f[1]), std::move(f[2]),
                                    f[3], std::move(f[4])));
  }
  return posts.take();
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::Jsonl;
  if (name == "csv") return CorpusFormat::Csv;
  throw std::invalid_argument("unknown corpus format '" + std::string(name) + "'");
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::Jsonl ? "jsonl" : "csv";
}

CorpusFormat format_for_path(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot != std::string_view::npos) {
    auto ext = path.substr(dot + 1);
    if (ext == "jsonl") return CorpusFormat::Jsonl;
    if (ext == "csv") return CorpusFormat::Csv;
  }
  throw std::invalid_argument("cannot infer corpus format from '" + std::string(path) + "'");
}

std::vector<PostRecord> parse_posts(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::Jsonl ? parse_jsonl(in) : parse_csv(in);
}

std::vector<PostRecord> load_posts(const std::string& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus '" + path + "'");
  try {
    return parse_posts(in, format);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_posts(std::ostream& out, const std::vector<PostRecord>& posts, CorpusFormat format) {
  if (format == CorpusFormat::Jsonl) {
    for (const auto& p : posts) {
      json row = json::object();
      row["post_id"] = p.post_id;
      row["thread_id"] = p.thread_id;
      row["user_id"] = p.user_id;
      row["created_at"] = format_timestamp(p.created_at);
      row["body"] = p.body;
      out << row.dump() << '\n';
    }
    return;
  }
  csv::write_row(out, {kColumns.begin(), kColumns.end()});
  for (const auto& p : posts) {
    csv::write_row(out, {p.post_id, p.thread_id, p.user_id, format_timestamp(p.created_at), p.body});
  }
}

CorpusStats corpus_stats(const std::vector<PostRecord>& posts) {
  if (posts.empty()) throw DataError("empty corpus");
  std::set<std::string_view> users, threads;
  CorpusStats stats;
  stats.first_post = posts.front().created_at;
  stats.last_post = posts.front().created_at;
  for (const auto& p : posts) {
    users.insert(p.user_id);
    threads.insert(p.thread_id);
    stats.first_post = std::min(stats.first_post, p.created_at);
    stats.last_post = std::max(stats.last_post, p.created_at);
  }
  stats.post_count = posts.size();
  stats.user_count = users.size();
  stats.thread_count = threads.size();
  stats.avg_thread_depth =
      static_cast<double>(stats.post_count) / static_cast<double>(stats.thread_count);
  return stats;
}

std::string corpus_stats_json(const CorpusStats& stats) {
  nlohmann::ordered_json j;
  j["post_count"] = stats.post_count;
  j["user_count"] = stats.user_count;
  j["thread_count"] = stats.thread_count;
  j["avg_thread_depth"] = stats.avg_thread_depth;
  j["first_post"] = format_timestamp(stats.first_post);
  j["last_post"] = format_timestamp(stats.last_post);
  return j.dump(2) + "\n";
}

}  // namespace fluct
