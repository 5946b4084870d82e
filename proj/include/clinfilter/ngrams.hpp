#pragma once

#include <string>
#include <unordered_map>

#include "clinfilter/concepts.hpp"
#include "clinfilter/corpus.hpp"

namespace clinfilter {

// Contiguous token n-grams (min_n <= n <= max_n) joined by single spaces.
// occurrences counts every position; documents counts distinct documents.
std::unordered_map<std::string, PhraseCount> count_ngrams(const Corpus& corpus, int min_n,
                                                          int max_n);

}  // namespace clinfilter
