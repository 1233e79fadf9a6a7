#include "fluct/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace fluct {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument("config key '" + key + "': '" + value + "' is not a valid number");
  }
  return out;
}

std::vector<Task> parse_tasks(const std::string& value) {
  std::vector<Task> tasks;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) tasks.push_back(parse_task(item));
  }
  return tasks;
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"input", [](auto& c, auto&, auto& v) { c.input = v; }},
      {"format", [](auto& c, auto&, auto& v) {
         if (v.empty() || v == "auto") c.format.reset();
         else c.format = parse_corpus_format(v);
       }},
      {"window_days", [](auto& c, auto& k, auto& v) { c.window_days = parse_number<int>(k, v); }},
      {"propinquity.alpha", [](auto& c, auto& k, auto& v) { c.propinquity.alpha = parse_number<int>(k, v); }},
      {"propinquity.beta", [](auto& c, auto& k, auto& v) { c.propinquity.beta = parse_number<int>(k, v); }},
      {"propinquity.max_iterations",
       [](auto& c, auto& k, auto& v) { c.propinquity.max_iterations = parse_number<int>(k, v); }},
      {"propinquity.min_community_size",
       [](auto& c, auto& k, auto& v) { c.propinquity.min_community_size = parse_number<std::size_t>(k, v); }},
      {"lexicon", [](auto& c, auto&, auto& v) { c.lexicon = v; }},
      {"intents", [](auto& c, auto&, auto& v) { c.intents = v; }},
      {"tasks", [](auto& c, auto&, auto& v) { c.tasks = parse_tasks(v); }},
      {"model.learning_rate", [](auto& c, auto& k, auto& v) { c.hyper.learning_rate = parse_number<double>(k, v); }},
      {"model.epochs", [](auto& c, auto& k, auto& v) { c.hyper.epochs = parse_number<int>(k, v); }},
      {"model.l2_lambda", [](auto& c, auto& k, auto& v) { c.hyper.l2_lambda = parse_number<double>(k, v); }},
      {"cv.repeats", [](auto& c, auto& k, auto& v) { c.cv.repeats = parse_number<int>(k, v); }},
      {"cv.train_fraction", [](auto& c, auto& k, auto& v) { c.cv.train_fraction = parse_number<double>(k, v); }},
      {"cv.seed", [](auto& c, auto& k, auto& v) { c.cv.seed = parse_number<std::uint64_t>(k, v); }},
      {"seed", [](auto& c, auto& k, auto& v) { c.cv.seed = parse_number<std::uint64_t>(k, v); }},
      {"cv.balance", [](auto& c, auto&, auto& v) { c.cv.balance = parse_balance(v); }},
      {"out", [](auto& c, auto&, auto& v) { c.out = v; }},
      {"synth.n_users", [](auto& c, auto& k, auto& v) { c.synth.n_users = parse_number<std::size_t>(k, v); }},
      {"synth.n_threads", [](auto& c, auto& k, auto& v) { c.synth.n_threads = parse_number<std::size_t>(k, v); }},
      {"synth.n_windows", [](auto& c, auto& k, auto& v) { c.synth.n_windows = parse_number<std::size_t>(k, v); }},
      {"synth.window_days", [](auto& c, auto& k, auto& v) { c.synth.window_days = parse_number<int>(k, v); }},
      {"synth.churn_signal_strength",
       [](auto& c, auto& k, auto& v) { c.synth.churn_signal_strength = parse_number<double>(k, v); }},
      {"synth.format", [](auto& c, auto&, auto& v) { c.synth_format = parse_corpus_format(v); }},
  };
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  if (window_days <= 0) throw std::invalid_argument("config key 'window_days' must be positive");
  propinquity.validate();
  hyper.validate();
  cv.validate();
  if (tasks.empty()) throw std::invalid_argument("config key 'tasks' lists no task");
  if (out.empty()) throw std::invalid_argument("config key 'out' is empty");
}

PipelineConfig parse_config(std::istream& in, PipelineConfig base) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    bool known = false;
    for (const auto& [name, set] : setters()) {
      if (name != key) continue;
      known = true;
      try {
        set(base, key, value);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config line " + std::to_string(number) + ": " + e.what());
      }
    }
    if (!known) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
  }
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path.string() + "'");
  return parse_config(in, std::move(base));
}

std::string dump_config(const PipelineConfig& c) {
  std::ostringstream out;
  std::string tasks;
  for (Task t : c.tasks) {
    if (!tasks.empty()) tasks += ",";
    tasks += to_string(t);
  }
  out << "input = " << c.input.string() << "\n"
      << "format = " << (c.format ? std::string(to_string(*c.format)) : "auto") << "\n"
      << "window_days = " << c.window_days << "\n"
      << "propinquity.alpha = " << c.propinquity.alpha << "\n"
      << "propinquity.beta = " << c.propinquity.beta << "\n"
      << "propinquity.max_iterations = " << c.propinquity.max_iterations << "\n"
      << "propinquity.min_community_size = " << c.propinquity.min_community_size << "\n"
      << "lexicon = " << c.lexicon.string() << "\n"
      << "intents = " << c.intents.string() << "\n"
      << "tasks = " << tasks << "\n"
      << "model.learning_rate = " << c.hyper.learning_rate << "\n"
      << "model.epochs = " << c.hyper.epochs << "\n"
      << "model.l2_lambda = " << c.hyper.l2_lambda << "\n"
      << "cv.repeats = " << c.cv.repeats << "\n"
      << "cv.train_fraction = " << c.cv.train_fraction << "\n"
      << "cv.seed = " << c.cv.seed << "\n"
      << "cv.balance = " << to_string(c.cv.balance) << "\n"
      << "out = " << c.out.string() << "\n"
      << "synth.n_users = " << c.synth.n_users << "\n"
      << "synth.n_threads = " << c.synth.n_threads << "\n"
      << "synth.n_windows = " << c.synth.n_windows << "\n"
      << "synth.window_days = " << c.synth.window_days << "\n"
      << "synth.churn_signal_strength = " << c.synth.churn_signal_strength << "\n"
      << "synth.format = " << to_string(c.synth_format) << "\n";
  return out.str();
}

}  // namespace fluct
