#include "clinfilter/reference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace clinfilter::reference {
namespace {

std::vector<std::string> words(const std::string& phrase) {
  std::vector<std::string> out;
  std::istringstream in(phrase);
  for (std::string w; in >> w;) out.push_back(std::move(w));
  return out;
}

}  // namespace

std::vector<ConceptMention> match(std::span<const std::string> tokens, const Matcher& matcher) {
  std::vector<std::vector<std::string>> phrases;
  for (const auto& p : matcher.phrases()) phrases.push_back(words(p));
  std::vector<ConceptMention> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best_len = 0;
    std::uint32_t best = 0;
    for (std::uint32_t p = 0; p < phrases.size(); ++p) {
      const auto& ph = phrases[p];
      if (ph.size() <= best_len || i + ph.size() > tokens.size()) continue;
      if (std::equal(ph.begin(), ph.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        best_len = ph.size();
        best = p;
      }
    }
    if (best_len == 0) {
      ++i;
      continue;
    }
    out.push_back({best, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + best_len)});
    i += best_len;
  }
  return out;
}

std::vector<std::vector<ConceptMention>> annotate_corpus(const Corpus& corpus, const Matcher& matcher) {
  std::vector<std::vector<ConceptMention>> out;
  for (const auto& doc : corpus) {
    if (doc.tokens.size() < kMinAnnotatedTokens) {
      out.emplace_back();
    } else {
      out.push_back(match(doc.tokens, matcher));
    }
  }
  return out;
}

std::vector<PhraseCount> count_triggers(const Corpus& corpus, const Matcher& matcher) {
  std::vector<PhraseCount> out(matcher.phrase_count());
  for (const auto& doc : corpus) {
    std::unordered_set<std::uint32_t> seen;
    for (const auto& m : match(doc.tokens, matcher)) {
      ++out[m.phrase].occurrences;
      if (seen.insert(m.phrase).second) ++out[m.phrase].documents;
    }
  }
  return out;
}

std::unordered_map<std::string, PhraseCount> count_ngrams(const Corpus& corpus, int min_n, int max_n) {
  std::unordered_map<std::string, PhraseCount> out;
  for (const auto& doc : corpus) {
    std::unordered_set<std::string> seen;
    for (int n = min_n; n <= max_n; ++n) {
      const auto len = static_cast<std::size_t>(n);
      for (std::size_t i = 0; i + len <= doc.tokens.size(); ++i) {
        std::string g = doc.tokens[i];
        for (std::size_t j = 1; j < len; ++j) g += " " + doc.tokens[i + j];
        ++out[g].occurrences;
        if (seen.insert(g).second) ++out[g].documents;
      }
    }
  }
  return out;
}

std::vector<double> score_topics(const Matrix& theta, std::span<const double> doc_weights) {
  std::vector<double> out;
  for (std::size_t t = 0; t < theta.rows(); ++t) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t m = 0; m < theta.cols(); ++m) {
      num += theta(t, m) * doc_weights[m];
      den += theta(t, m);
    }
    out.push_back(den > 0.0 ? num / den : 0.0);
  }
  return out;
}

std::vector<std::size_t> filter_documents(const Matrix& theta, std::span<const std::size_t> relevant,
                                          std::size_t k) {
  std::vector<std::size_t> out;
  const double bar = static_cast<double>(relevant.size()) / static_cast<double>(k);
  for (std::size_t m = 0; m < theta.cols(); ++m) {
    double mass = 0.0;
    for (std::size_t t : relevant) mass += theta(t, m);
    if (mass >= bar - kMassTolerance) out.push_back(m);
  }
  return out;
}

std::vector<double> umass_coherence(const std::vector<std::vector<std::string>>& top_words,
                                    const Corpus& corpus, int top_n) {
  auto df = [&](const std::string& a, const std::string* b) {
    std::size_t n = 0;
    for (const auto& doc : corpus) {
      const bool has_a = std::find(doc.tokens.begin(), doc.tokens.end(), a) != doc.tokens.end();
      const bool has_b = !b || std::find(doc.tokens.begin(), doc.tokens.end(), *b) != doc.tokens.end();
      if (has_a && has_b) ++n;
    }
    return n;
  };
  std::vector<double> out;
  for (const auto& w : top_words) {
    const std::size_t n = std::min(w.size(), static_cast<std::size_t>(top_n));
    double score = 0.0;
    for (std::size_t m = 1; m < n; ++m) {
      for (std::size_t l = 0; l < m; ++l) {
        const double dl = static_cast<double>(std::max<std::size_t>(df(w[l], nullptr), 1));
        score += std::log((static_cast<double>(df(w[m], &w[l])) + 1.0) / dl);
      }
    }
    out.push_back(score);
  }
  return out;
}

std::vector<bool> hcp_mask(const Corpus& corpus, std::span<const CredentialPattern> patterns) {
  std::vector<bool> out;
  for (const auto& doc : corpus) out.push_back(is_hcp(doc.author, patterns));
  return out;
}

}  // namespace clinfilter::reference
