#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace clinfilter {

struct CodepointRange {
  char32_t first;
  char32_t last;  // inclusive
};

// Emoji, pictographs, variation selectors and joiners inside the BMP.
// Everything above U+FFFF is always stripped.
inline constexpr std::string_view kDefaultStripRanges =
    "00A9,00AE,200D,203C,2049,20E3,2122,2139,2194-2199,21A9-21AA,231A-231B,2328,"
    "23CF,23E9-23F3,23F8-23FA,24C2,25AA-25AB,25B6,25C0,25FB-25FE,2600-27BF,"
    "2934-2935,2B05-2B07,2B1B-2B1C,2B50,2B55,3030,303D,3297,3299,FE00-FE0F";

std::vector<CodepointRange> default_strip_ranges();

// Parses "2600-27BF,FE00-FE0F,200D" (hex, comma separated).
std::vector<CodepointRange> parse_codepoint_ranges(std::string_view text);

// Word -> lemma lookup with a plural suffix-stripping fallback.
//
// lemmatize() is idempotent: the table is closed under lookup on load and the
// fallback runs to a fixpoint, so lemmatize(lemmatize(w)) == lemmatize(w).
class Lemmatizer {
 public:
  Lemmatizer() = default;

  // Tab-separated `word\tlemma`, one pair per line, `#` comments.
  static Lemmatizer load(const std::filesystem::path& path);

  void add(std::string word, std::string lemma);
  std::string lemmatize(std::string_view word) const;
  std::size_t size() const { return table_.size(); }

 private:
  void close();

  std::unordered_map<std::string, std::string> table_;
};

struct PreprocessOptions {
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> query_terms;
  std::vector<CodepointRange> strip_ranges = default_strip_ranges();
};

std::unordered_set<std::string> load_word_list(const std::filesystem::path& path);
std::unordered_set<std::string> default_query_terms();

// Text -> token pipeline:
//   URLs and HTML tags removed, entities decoded, NFC, emoji stripped,
//   lowercased, contractions expanded, split on non-alphanumerics,
//   lemmatized, stopwords and query terms removed.
class Preprocessor {
 public:
  Preprocessor() = default;
  Preprocessor(PreprocessOptions options, Lemmatizer lemmatizer)
      : options_(std::move(options)), lemmatizer_(std::move(lemmatizer)) {}

  std::vector<std::string> tokenize(std::string_view text) const;

  const PreprocessOptions& options() const { return options_; }
  const Lemmatizer& lemmatizer() const { return lemmatizer_; }

 private:
  bool dropped(const std::string& word) const;

  PreprocessOptions options_;
  Lemmatizer lemmatizer_;
};

// Lowercased words with URLs, tags, emoji and punctuation removed and
// contractions expanded; no lemmatization or stopword removal.
std::vector<std::string> normalize_words(std::string_view text,
                                         const std::vector<CodepointRange>& strip);

// Pieces of the normalizer, exposed for testing.
std::string strip_urls(std::string_view text);
std::string strip_html(std::string_view text);
std::vector<std::string> expand_contraction(std::string_view word);

}  // namespace clinfilter
