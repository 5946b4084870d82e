#pragma once

// Serial, deliberately plain versions of the parallel kernels. Tests compare
// the kernels against these; the benchmark times both.

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "clinfilter/author_filter.hpp"
#include "clinfilter/concepts.hpp"
#include "clinfilter/corpus.hpp"
#include "clinfilter/matrix.hpp"
#include "clinfilter/relevance.hpp"
#include "clinfilter/topic_model.hpp"

namespace clinfilter::reference {

// Tries every phrase at every position; longest wins, ties by phrase id.
std::vector<ConceptMention> match(std::span<const std::string> tokens, const Matcher& matcher);

std::vector<std::vector<ConceptMention>> annotate_corpus(const Corpus& corpus, const Matcher& matcher);
std::vector<PhraseCount> count_triggers(const Corpus& corpus, const Matcher& matcher);
std::unordered_map<std::string, PhraseCount> count_ngrams(const Corpus& corpus, int min_n, int max_n);

// Score(t) computed topic by topic straight from the definition.
std::vector<double> score_topics(const Matrix& theta, std::span<const double> doc_weights);
std::vector<std::size_t> filter_documents(const Matrix& theta, std::span<const std::size_t> relevant,
                                          std::size_t k);

// Document frequencies counted by rescanning the corpus for every pair.
std::vector<double> umass_coherence(const std::vector<std::vector<std::string>>& top_words,
                                    const Corpus& corpus, int top_n);

std::vector<bool> hcp_mask(const Corpus& corpus, std::span<const CredentialPattern> patterns);

}  // namespace clinfilter::reference
