#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clinfilter/common.hpp"
#include "clinfilter/concepts.hpp"
#include "clinfilter/corpus.hpp"
#include "clinfilter/pipeline.hpp"
#include "clinfilter/relevance.hpp"
#include "clinfilter/text.hpp"
#include "clinfilter/topic_model.hpp"

namespace clinfilter {

// Fraction of all top words (top_n per topic) that equal a single-token
// lexicon trigger.
double concept_fraction(const TopicModel& model, const Matcher& matcher, int top_n = 10);

struct EnrichmentOptions {
  int max_n = 3;
  std::size_t top_n = 20;
  std::uint64_t min_count = 5;  // occurrences in the reference corpus
  double epsilon = kDefaultEpsilon;
};

struct EnrichmentRow {
  std::string phrase;
  int n = 1;
  std::uint64_t f_filtered = 0;
  std::uint64_t f_reference = 0;
  double rel = 0.0;

  bool operator==(const EnrichmentRow&) const = default;
};

struct EnrichmentTable {
  std::vector<EnrichmentRow> rows;    // every scored phrase, descending rel then phrase
  std::vector<EnrichmentRow> top;     // first top_n rows
  std::vector<EnrichmentRow> bottom;  // last top_n rows, ascending rel
};

// Rel(phrase; filtered, reference) for every n-gram (n <= max_n) seen at
// least min_count times in reference. Throws std::invalid_argument unless
// filtered ids are a subset of reference ids.
EnrichmentTable enrichment_table(const Corpus& filtered, const Corpus& reference,
                                 const EnrichmentOptions& options = {});

enum class Expected { relevant, irrelevant };
std::string_view to_string(Expected expected);

struct CategorySpec {
  std::string name;
  std::vector<std::string> keywords;  // normalized phrases, tokens joined by spaces
  Expected expected = Expected::relevant;

  void validate() const;  // throws ConfigError
};

// Tab-separated `name \t relevant|irrelevant \t kw1;kw2;...`. Keywords go
// through `normalizer` when given so they match document tokens.
std::vector<CategorySpec> parse_categories(std::string_view text,
                                           const Preprocessor* normalizer = nullptr);
std::vector<CategorySpec> load_categories(const std::filesystem::path& path,
                                          const Preprocessor* normalizer = nullptr);

// At least two distinct keywords occur as contiguous token runs.
bool in_category(const Document& doc, const CategorySpec& category);

struct CategoryRetention {
  std::string name;
  Expected expected = Expected::relevant;
  std::size_t members = 0;                       // documents of D1 in the category
  std::vector<std::optional<double>> fractions;  // per applied iteration; null when members == 0
};

struct CategoryReport {
  std::vector<int> iterations;  // iteration index of each fraction column
  std::vector<CategoryRetention> categories;
  // Pooled over categories of each class: retained members / members.
  std::vector<std::optional<double>> relevant_aggregate;
  std::vector<std::optional<double>> irrelevant_aggregate;
};

// fraction = |category ∩ D(i+1)| / |category ∩ D1| for every applied record.
CategoryReport category_preservation(std::span<const IterationRecord> records, const Corpus& d1,
                                     std::span<const CategorySpec> categories);

struct KeywordPattern {
  std::string name;
  std::string regex;  // matched against whole tokens, case-insensitive
};

// `name=regex` or a bare regex (the name is then the regex).
KeywordPattern parse_keyword_pattern(std::string_view text);

struct TimelinePoint {
  Day date;
  std::size_t tweet_count = 0;
  double moving_avg = 0.0;  // trailing 7 days, inclusive
  bool in_topic_model = false;

  bool operator==(const TimelinePoint&) const = default;
};

struct KeywordTimeline {
  KeywordPattern pattern;
  std::vector<TimelinePoint> points;  // every day from first to last document; empty without matches
  std::optional<Day> first_mention;
  std::vector<bool> window_hits;  // per window: a relevant topic of its last round has a matching top word
  std::optional<std::size_t> first_hit_window;
  std::size_t total_matches = 0;
};

inline constexpr int kTimelineTopWords = 10;
inline constexpr int kMovingAverageDays = 7;

// Daily counts of documents with a matching token. Throws ConfigError on an
// invalid regular expression.
KeywordTimeline keyword_timeline(const Corpus& corpus, std::span<const WindowResult> windows,
                                 const KeywordPattern& pattern);

}  // namespace clinfilter
