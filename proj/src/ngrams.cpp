#include "clinfilter/ngrams.hpp"

#include <stdexcept>
#include <unordered_set>

namespace clinfilter {

std::unordered_map<std::string, PhraseCount> count_ngrams(const Corpus& corpus, int min_n,
                                                          int max_n) {
  if (min_n < 1 || max_n < min_n) throw std::invalid_argument("count_ngrams: bad n range");
  std::unordered_map<std::string, PhraseCount> total;
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel
  {
    std::unordered_map<std::string, PhraseCount> local;
    std::unordered_set<std::string> in_doc;
    std::string gram;
#pragma omp for schedule(dynamic, 256) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& tokens = corpus[static_cast<std::size_t>(i)].tokens;
      in_doc.clear();
      for (std::size_t start = 0; start < tokens.size(); ++start) {
        gram.clear();
        for (int len = 1; len <= max_n && start + static_cast<std::size_t>(len) <= tokens.size(); ++len) {
          if (len > 1) gram += ' ';
          gram += tokens[start + static_cast<std::size_t>(len) - 1];
          if (len < min_n) continue;
          auto& c = local[gram];
          ++c.occurrences;
          if (in_doc.insert(gram).second) ++c.documents;
        }
      }
    }
#pragma omp critical(count_ngrams_merge)
    for (auto& [g, c] : local) {
      auto& t = total[g];
      t.occurrences += c.occurrences;
      t.documents += c.documents;
    }
  }
  return total;
}

}  // namespace clinfilter
