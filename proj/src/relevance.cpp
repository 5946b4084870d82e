#include "clinfilter/relevance.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace clinfilter {

double relevance_score(std::uint64_t f_a, std::uint64_t f_b, std::size_t size_a,
                       std::size_t size_b, double epsilon) {
  if (size_a > size_b) throw std::logic_error("relevance: |A| > |B|, A is not a subset of B");
  if (f_a > f_b) throw std::logic_error("relevance: f_A > f_B, A is not a subset of B");
  if (!(epsilon > 0.0)) throw std::invalid_argument("relevance: epsilon must be positive");
  const double rate_a = size_a == 0 ? 0.0 : static_cast<double>(f_a) / static_cast<double>(size_a);
  const double rate_rest = size_b == size_a ? 0.0
                                            : static_cast<double>(f_b - f_a) /
                                                  static_cast<double>(size_b - size_a);
  return (rate_a + epsilon) / (rate_rest + epsilon);
}

std::vector<std::pair<std::string, double>> RelevanceTable::ranked() const {
  std::vector<std::pair<std::string, double>> out(scores_.begin(), scores_.end());
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  return out;
}

RelevanceTable relevance(const CorpusCounts& a, const CorpusCounts& b, double epsilon) {
  if (a.size > b.size) throw std::logic_error("relevance: |A| > |B|, A is not a subset of B");
  RelevanceTable table(a.label, b.label, epsilon);
  auto count_in = [](const CorpusCounts& c, const std::string& phrase) -> std::uint64_t {
    auto it = c.counts.find(phrase);
    return it == c.counts.end() ? 0 : it->second;
  };
  for (const auto& [phrase, f_b] : b.counts) {
    table.set(phrase, relevance_score(count_in(a, phrase), f_b, a.size, b.size, epsilon));
  }
  for (const auto& [phrase, f_a] : a.counts) {
    if (!b.counts.contains(phrase))
      table.set(phrase, relevance_score(f_a, 0, a.size, b.size, epsilon));  // throws unless f_a == 0
  }
  return table;
}

RelevanceTable iterative_relevance(int iteration, const CorpusCounts* d0, const CorpusCounts& d1,
                                   const CorpusCounts* di, double epsilon) {
  if (iteration < 1) throw std::invalid_argument("iterative_relevance: iteration must be >= 1");
  if (iteration == 1) {
    if (!d0) throw std::invalid_argument("iterative_relevance: iteration 1 needs D0 counts");
    return relevance(d1, *d0, epsilon);
  }
  if (!di) throw std::invalid_argument("iterative_relevance: iteration > 1 needs Di counts");
  return relevance(*di, d1, epsilon);
}

Lexicon prefilter_concepts(const Lexicon& lexicon, const RelevanceTable& rel_first) {
  Lexicon out;
  for (const auto& e : lexicon) {
    if (!(rel_first.get(e.trigger_text()) < 1.0)) out.push_back(e);
  }
  return out;
}

std::vector<double> evidence_weights(std::span<const std::vector<std::string>> doc_items,
                                     const RelevanceTable& table) {
  std::vector<double> w(doc_items.size(), 0.0);
  for (std::size_t m = 0; m < doc_items.size(); ++m) {
    for (const auto& item : doc_items[m]) w[m] += table.get(item);
  }
  return w;
}

TopicScoreSet score_topics(const Matrix& theta, std::span<const double> doc_weights) {
  if (theta.cols() != doc_weights.size())
    throw std::invalid_argument("score_topics: theta has " + std::to_string(theta.cols()) +
                                " documents, weights " + std::to_string(doc_weights.size()));
  const std::size_t k = theta.rows();
  TopicScoreSet out;
  out.scores.assign(k, 0.0);
  std::vector<char> zero(k, 0);
  const auto nk = static_cast<std::ptrdiff_t>(k);
  // One topic per iteration; each row is summed in document order so results
  // do not depend on the worker count.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ti = 0; ti < nk; ++ti) {
    const auto row = theta.row(static_cast<std::size_t>(ti));
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < row.size(); ++m) {
      num += row[m] * doc_weights[m];
      den += row[m];
    }
    if (den > 0.0) {
      out.scores[static_cast<std::size_t>(ti)] = num / den;
    } else {
      zero[static_cast<std::size_t>(ti)] = 1;
    }
  }
  out.zero_mass.assign(zero.begin(), zero.end());
  if (k > 0) {
    auto [lo, hi] = std::minmax_element(out.scores.begin(), out.scores.end());
    out.s_min = *lo;
    out.s_max = *hi;
  }
  return out;
}

TopicScoreSet score_topics(const Matrix& theta,
                           std::span<const std::vector<std::string>> doc_items,
                           const RelevanceTable& table) {
  auto w = evidence_weights(doc_items, table);
  return score_topics(theta, w);
}

TopicScoreSet threshold_topics(TopicScoreSet set, double tau) {
  if (set.scores.empty()) throw std::invalid_argument("threshold_topics: no scores");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("threshold_topics: tau must be in [0,1]");
  auto [lo, hi] = std::minmax_element(set.scores.begin(), set.scores.end());
  set.s_min = *lo;
  set.s_max = *hi;
  set.tau = tau;
  set.all_equal = set.s_min == set.s_max;
  set.cutoff = set.all_equal ? set.s_min : (set.s_max - set.s_min) * tau + set.s_min;
  // The top score must always pass even if rounding lands the cutoff above it.
  set.cutoff = std::min(set.cutoff, set.s_max);
  set.relevant.clear();
  for (std::size_t t = 0; t < set.scores.size(); ++t) {
    if (set.scores[t] >= set.cutoff) set.relevant.push_back(t);
  }
  return set;
}

TopicScoreSet threshold_topics(std::span<const double> scores, double tau) {
  TopicScoreSet set;
  set.scores.assign(scores.begin(), scores.end());
  set.zero_mass.assign(scores.size(), false);
  return threshold_topics(std::move(set), tau);
}

std::vector<std::size_t> filter_documents(const Matrix& theta, const TopicScoreSet& topics,
                                          std::size_t k) {
  if (k == 0 || theta.rows() != k)
    throw std::invalid_argument("filter_documents: theta rows do not match k");
  for (std::size_t t : topics.relevant) {
    if (t >= k) throw std::invalid_argument("filter_documents: relevant topic out of range");
  }
  const std::size_t M = theta.cols();
  const double threshold =
      static_cast<double>(topics.relevant.size()) / static_cast<double>(k) - kMassTolerance;
  std::vector<char> keep(M, 0);
  const auto nm = static_cast<std::ptrdiff_t>(M);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t mi = 0; mi < nm; ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    double mass = 0.0;
    for (std::size_t t : topics.relevant) mass += theta(t, m);
    keep[m] = mass >= threshold ? 1 : 0;
  }
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < M; ++m) {
    if (keep[m]) out.push_back(m);
  }
  return out;
}

}  // namespace clinfilter
