#pragma once

#include <bitset>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fluct {

enum class Category : std::size_t { Posemo, Negemo, Anger, Sadness, Cogmech };
inline constexpr std::size_t kCategoryCount = 5;

std::string_view to_string(Category category);
Category parse_category(std::string_view name);

using CategorySet = std::bitset<kCategoryCount>;

CategorySet category_set(std::initializer_list<Category> categories);
/// posemo, negemo, anger, sadness
CategorySet sentiment_categories();
/// cogmech
CategorySet cognition_categories();

struct LexiconEntry {
  std::string pattern;  // lowercase; a trailing '*' marks a prefix pattern
  Category category = Category::Posemo;
};

/// LIWC-style dictionary. Exact patterns shadow prefix patterns: a token with
/// an exact entry takes only the categories of its exact entries; otherwise
/// it takes the categories of every prefix pattern it starts with.
class Lexicon {
 public:
  Lexicon() = default;
  /// Throws std::invalid_argument on empty patterns or a misplaced '*'.
  explicit Lexicon(std::vector<LexiconEntry> entries);

  /// TSV `pattern<TAB>category`; blank lines and '#' comments are skipped.
  static Lexicon parse(std::istream& in);
  static Lexicon load(const std::string& path);

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  CategorySet categories_of(std::string_view token) const;

 private:
  std::vector<LexiconEntry> entries_;
  std::map<std::string, CategorySet, std::less<>> exact_;
  std::vector<std::pair<std::string, CategorySet>> prefixes_;  // sorted by stem
};

/// Multi-token phrases (each at least two tokens).
class IntentPatterns {
 public:
  IntentPatterns() = default;
  /// Throws std::invalid_argument on phrases shorter than two tokens.
  explicit IntentPatterns(std::vector<std::vector<std::string>> phrases);

  /// One phrase per line, tokenized with `tokenize`; '#' comments allowed.
  static IntentPatterns parse(std::istream& in);
  static IntentPatterns load(const std::string& path);

  const std::vector<std::vector<std::string>>& phrases() const { return phrases_; }
  std::size_t shortest_length() const;

 private:
  std::vector<std::vector<std::string>> phrases_;  // longest first
};

/// Maximal runs of letters and apostrophes, lowercased. URLs (http:// or
/// https:// up to the next whitespace), digits and punctuation are dropped.
/// Letters are ASCII plus the Latin-1/Latin Extended-A/B ranges; apostrophes
/// at the edges of a run are trimmed.
std::vector<std::string> tokenize(std::string_view body);

/// Tokens whose lexicon categories intersect `categories`; each token counts
/// at most once.
std::size_t count_category(const std::vector<std::string>& tokens, const Lexicon& lexicon,
                           CategorySet categories);

/// Non-overlapping left-to-right phrase matches, longest phrase first at
/// each position.
std::size_t count_intents(const std::vector<std::string>& tokens, const IntentPatterns& patterns);

struct TextMeasures {
  double sentiment = 0.0;
  double cognition = 0.0;
  double intent = 0.0;

  TextMeasures& operator+=(const TextMeasures& other);
  bool operator==(const TextMeasures&) const = default;
};

TextMeasures measure_text(std::string_view body, const Lexicon& lexicon,
                          const IntentPatterns& patterns);

}  // namespace fluct
