#include "fluct/lexifeat.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "fluct/errors.hpp"

namespace fluct {

namespace {
constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "posemo", "negemo", "anger", "sadness", "cogmech"};
}

std::string_view to_string(Category category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

Category parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  throw std::invalid_argument("unknown lexicon category '" + std::string(name) + "'");
}

CategorySet category_set(std::initializer_list<Category> categories) {
  CategorySet set;
  for (Category c : categories) set.set(static_cast<std::size_t>(c));
  return set;
}

CategorySet sentiment_categories() {
  return category_set({Category::Posemo, Category::Negemo, Category::Anger, Category::Sadness});
}

CategorySet cognition_categories() { return category_set({Category::Cogmech}); }

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
  std::map<std::string, CategorySet, std::less<>> prefix_map;
  for (const auto& e : entries_) {
    const auto star = e.pattern.find('*');
    if (e.pattern.empty() || e.pattern == "*") {
      throw std::invalid_argument("empty lexicon pattern");
    }
    if (star != std::string::npos && star != e.pattern.size() - 1) {
      throw std::invalid_argument("'*' must be the last character of pattern '" + e.pattern + "'");
    }
    const auto bit = static_cast<std::size_t>(e.category);
    if (star == std::string::npos) {
      exact_[e.pattern].set(bit);
    } else {
      prefix_map[e.pattern.substr(0, star)].set(bit);
    }
  }
  prefixes_.assign(prefix_map.begin(), prefix_map.end());
}

Lexicon Lexicon::parse(std::istream& in) {
  std::vector<LexiconEntry> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("lexicon line " + std::to_string(number) + ": expected pattern<TAB>category");
    }
    std::string pattern = line.substr(0, tab);
    std::string category = line.substr(tab + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    trim(pattern);
    trim(category);
    std::transform(pattern.begin(), pattern.end(), pattern.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    try {
      entries.push_back({pattern, parse_category(category)});
    } catch (const std::invalid_argument& e) {
      throw DataError("lexicon line " + std::to_string(number) + ": " + e.what());
    }
  }
  try {
    return Lexicon(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("lexicon: ") + e.what());
  }
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon '" + path + "'");
  try {
    return parse(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

CategorySet Lexicon::categories_of(std::string_view token) const {
  if (auto it = exact_.find(token); it != exact_.end()) return it->second;
  CategorySet found;
  // Every stem that prefixes the token sorts at or before it.
  auto end = std::upper_bound(prefixes_.begin(), prefixes_.end(), token,
                              [](std::string_view t, const auto& p) { return t < p.first; });
  for (auto it = prefixes_.begin(); it != end; ++it) {
    if (token.substr(0, it->first.size()) == it->first) found |= it->second;
  }
  return found;
}

IntentPatterns::IntentPatterns(std::vector<std::vector<std::string>> phrases)
    : phrases_(std::move(phrases)) {
  for (const auto& p : phrases_) {
    if (p.size() < 2) throw std::invalid_argument("intent phrases need at least two tokens");
    for (const auto& tok : p) {
      if (tok.empty()) throw std::invalid_argument("empty token in intent phrase");
    }
  }
  std::stable_sort(phrases_.begin(), phrases_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

IntentPatterns IntentPatterns::parse(std::istream& in) {
  std::vector<std::vector<std::string>> phrases;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tokens = tokenize(line);
    if (tokens.size() < 2) {
      throw DataError("intent line " + std::to_string(number) + ": phrase needs at least two tokens");
    }
    phrases.push_back(std::move(tokens));
  }
  return IntentPatterns(std::move(phrases));
}

IntentPatterns IntentPatterns::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open intent phrase file '" + path + "'");
  try {
    return parse(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::size_t IntentPatterns::shortest_length() const {
  std::size_t shortest = 0;
  for (const auto& p : phrases_) {
    if (shortest == 0 || p.size() < shortest) shortest = p.size();
  }
  return shortest;
}

namespace {

// Decodes one UTF-8 sequence; malformed bytes decode as U+FFFD, one byte each.
char32_t decode(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto byte = [&](std::size_t k) { return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F); };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x1F) << 6) | byte(1);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x07) << 18) | (byte(1) << 12) | (byte(2) << 6) | byte(3);
    i += 4;
    return cp;
  }
  ++i;
  return 0xFFFD;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_letter(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  return cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7;
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool starts_url(std::string_view s, std::size_t i) {
  auto rest = s.substr(i);
  auto ci_prefix = [&](std::string_view p) {
    if (rest.size() < p.size()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (std::tolower(static_cast<unsigned char>(rest[k])) != p[k]) return false;
    }
    return true;
  };
  return ci_prefix("http://") || ci_prefix("https://");
}

void flush(std::string& current, std::vector<std::string>& tokens) {
  const auto first = current.find_first_not_of('\'');
  if (first != std::string::npos) {
    const auto last = current.find_last_not_of('\'');
    tokens.push_back(current.substr(first, last - first + 1));
  }
  current.clear();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view body) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < body.size()) {
    const bool boundary = i == 0 || is_space(body[i - 1]);
    if (boundary && starts_url(body, i)) {
      flush(current, tokens);
      while (i < body.size() && !is_space(body[i])) ++i;
      continue;
    }
    char32_t cp = decode(body, i);
    if (is_letter(cp)) {
      append_utf8(current, to_lower(cp));
    } else if (is_apostrophe(cp)) {
      current.push_back('\'');
    } else {
      flush(current, tokens);
    }
  }
  flush(current, tokens);
  return tokens;
}

std::size_t count_category(const std::vector<std::string>& tokens, const Lexicon& lexicon,
                           CategorySet categories) {
  std::size_t count = 0;
  for (const auto& tok : tokens) {
    if ((lexicon.categories_of(tok) & categories).any()) ++count;
  }
  return count;
}

std::size_t count_intents(const std::vector<std::string>& tokens, const IntentPatterns& patterns) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    for (const auto& phrase : patterns.phrases()) {  // longest first
      if (phrase.size() > tokens.size() - i) continue;
      if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<long>(i))) {
        matched = phrase.size();
        break;
      }
    }
    if (matched) {
      ++count;
      i += matched;
    } else {
      ++i;
    }
  }
  return count;
}

TextMeasures& TextMeasures::operator+=(const TextMeasures& other) {
  sentiment += other.sentiment;
  cognition += other.cognition;
  intent += other.intent;
  return *this;
}

TextMeasures measure_text(std::string_view body, const Lexicon& lexicon,
                          const IntentPatterns& patterns) {
  const auto tokens = tokenize(body);
  return {static_cast<double>(count_category(tokens, lexicon, sentiment_categories())),
          static_cast<double>(count_category(tokens, lexicon, cognition_categories())),
          static_cast<double>(count_intents(tokens, patterns))};
}

}  // namespace fluct
