#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "clinfilter/common.hpp"
#include "clinfilter/concepts.hpp"
#include "clinfilter/corpus.hpp"

namespace clinfilter {

// Planted-label corpora for tests, benchmarks and the demo.

struct Theme {
  std::string name;
  bool clinical = false;
  std::vector<std::string> words;
};

const std::vector<Theme>& clinical_themes();
const std::vector<Theme>& chatter_themes();
// Words every kind of author uses.
const std::vector<std::string>& filler_words();
// Vocabulary every clinical theme draws on (patient, icu, ...).
const std::vector<std::string>& clinical_core_words();
// Lexicon words that also turn up in everyday chatter (mask, test, ...).
const std::vector<std::string>& shared_concept_words();

struct SyntheticSpec {
  std::size_t relevant = 300;          // clinical text, HCP authors
  std::size_t irrelevant_hcp = 2000;   // chatter, HCP authors
  std::size_t irrelevant_public = 700; // chatter, other authors
  int min_words = 12;
  int max_words = 24;
  double theme_share = 0.8;   // remaining words: filler and shared concepts
  double core_share = 0.25;   // clinical documents only, taken before the theme draw
  double shared_share = 0.08;
  // Chatter that mentions clinical words in passing.
  double mixed_fraction = 0.5;
  double mixed_clinical_share = 0.5;  // upper bound; each document draws uniformly below it
  std::size_t chatter_themes = 0;  // how many chatter themes to draw from; 0 = all
  int relevant_min_words = 16;
  int relevant_max_words = 28;
  Day start = parse_date("2020-03-01");
  int days = 70;
  std::uint64_t seed = 7;
  bool decorate = true;  // hashtags, URLs, emoji, query terms, stopwords
};

struct SyntheticCorpus {
  std::vector<RawRecord> records;  // chronological, ids s000001...
  std::unordered_set<std::string> relevant;
  std::unordered_set<std::string> irrelevant;
  std::unordered_set<std::string> hcp;
};

SyntheticCorpus make_planted_corpus(const SyntheticSpec& spec);

// Extra clinical documents from HCP authors, all dated inside
// [start, start + days), each using at least two of `keywords`.
struct BurstSpec {
  std::vector<std::string> keywords;
  Day start;
  int days = 7;
  std::size_t documents = 80;
  // Chatter mentioning one keyword in passing, half of it from HCP authors.
  std::size_t public_documents = 0;
  std::uint64_t seed = 11;
};
void add_burst(SyntheticCorpus& corpus, const BurstSpec& burst, const SyntheticSpec& base);

// Every clinical theme word and shared concept as a single-token entry,
// plus a few multi-word triggers.
Lexicon synthetic_lexicon();

std::string records_jsonl(const std::vector<RawRecord>& records);
Corpus records_corpus(const std::vector<RawRecord>& records, std::string label = "D0");

}  // namespace clinfilter
