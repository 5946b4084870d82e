#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clinfilter/corpus.hpp"

namespace clinfilter {

struct LexiconEntry {
  std::vector<std::string> trigger;  // normalized tokens
  std::string cui;
  std::string preferred_name;
  std::vector<std::string> semantic_types;

  std::string trigger_text() const;
};

using Lexicon = std::vector<LexiconEntry>;

// Tab-separated `trigger_phrase \t cui \t preferred_name \t semtype1;semtype2`.
// When a preprocessor is given, trigger phrases run through the same
// normalization as documents; entries that normalize to nothing are dropped.
Lexicon load_lexicon(const std::filesystem::path& path, const Preprocessor* normalizer = nullptr);
Lexicon parse_lexicon(std::string_view text, const Preprocessor* normalizer = nullptr);

// Documents shorter than this carry no concept mentions.
inline constexpr std::size_t kMinAnnotatedTokens = 4;

// Token-level trie over all trigger phrases. Matching is leftmost-first,
// longest-match, non-overlapping. Immutable after build; safe to share.
class Matcher {
 public:
  Matcher() = default;

  // Throws std::invalid_argument on an empty trigger or a duplicate
  // (trigger, cui) pair. Entries sharing a trigger become one phrase.
  static Matcher build(Lexicon lexicon);

  std::vector<ConceptMention> match(std::span<const std::string> tokens) const;

  std::size_t phrase_count() const { return phrases_.size(); }
  const std::string& phrase(std::uint32_t id) const { return phrases_[id]; }
  std::size_t phrase_length(std::uint32_t id) const { return phrase_lengths_[id]; }
  const std::vector<std::size_t>& entries(std::uint32_t phrase_id) const {
    return phrase_entries_[phrase_id];
  }
  std::optional<std::uint32_t> find_phrase(std::string_view trigger) const;
  const Lexicon& lexicon() const { return lexicon_; }
  const std::vector<std::string>& phrases() const { return phrases_; }

 private:
  struct Node {
    std::unordered_map<std::uint32_t, std::uint32_t> children;  // token id -> node
    std::int64_t phrase = -1;
  };

  Lexicon lexicon_;
  std::vector<std::string> phrases_;
  std::vector<std::size_t> phrase_lengths_;
  std::vector<std::vector<std::size_t>> phrase_entries_;
  std::unordered_map<std::string, std::uint32_t> phrase_index_;
  std::unordered_map<std::string, std::uint32_t> token_ids_;
  std::vector<Node> nodes_;
};

// Fills `concepts` unless the document has fewer than kMinAnnotatedTokens.
Document annotate(Document doc, const Matcher& matcher);
std::vector<ConceptMention> annotate_tokens(std::span<const std::string> tokens,
                                            const Matcher& matcher);
Corpus annotate_corpus(Corpus corpus, const Matcher& matcher);

struct PhraseCount {
  std::uint64_t occurrences = 0;
  std::uint64_t documents = 0;

  bool operator==(const PhraseCount&) const = default;
};

// Per phrase id of the matcher. Every document is scanned regardless of
// length, so counts over a subset never exceed counts over its superset.
std::vector<PhraseCount> count_triggers(const Corpus& corpus, const Matcher& matcher);

// Same counts keyed by trigger text; phrases with zero occurrences omitted.
std::unordered_map<std::string, PhraseCount> count_triggers_by_phrase(const Corpus& corpus,
                                                                       const Matcher& matcher);

}  // namespace clinfilter
