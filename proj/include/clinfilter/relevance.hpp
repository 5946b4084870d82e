#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "clinfilter/concepts.hpp"
#include "clinfilter/matrix.hpp"

namespace clinfilter {

inline constexpr double kDefaultEpsilon = 1e-4;

// Occurrence counts of phrases in one corpus, plus its document count.
struct CorpusCounts {
  std::string label;
  std::unordered_map<std::string, std::uint64_t> counts;
  std::size_t size = 0;
};

// Enrichment of a phrase in A against the documents of B outside A:
//
//   Rel = (fA/|A| + eps) / ((fB - fA)/(|B| - |A|) + eps)
//
// When |B| == |A| the complement is empty and its rate is taken as 0.
// Throws std::logic_error when fA > fB or |A| > |B| (A must be a subset of B).
double relevance_score(std::uint64_t f_a, std::uint64_t f_b, std::size_t size_a,
                       std::size_t size_b, double epsilon);

class RelevanceTable {
 public:
  RelevanceTable() = default;
  RelevanceTable(std::string a_label, std::string b_label, double epsilon)
      : a_label_(std::move(a_label)), b_label_(std::move(b_label)), epsilon_(epsilon) {}

  // Phrases never seen score 1 (the eps/eps limit).
  double get(const std::string& phrase) const {
    auto it = scores_.find(phrase);
    return it == scores_.end() ? 1.0 : it->second;
  }
  bool contains(const std::string& phrase) const { return scores_.contains(phrase); }
  void set(std::string phrase, double score) { scores_.insert_or_assign(std::move(phrase), score); }

  const std::unordered_map<std::string, double>& scores() const { return scores_; }
  const std::string& a_label() const { return a_label_; }
  const std::string& b_label() const { return b_label_; }
  double epsilon() const { return epsilon_; }

  // (phrase, score) sorted by descending score, then phrase.
  std::vector<std::pair<std::string, double>> ranked() const;

 private:
  std::string a_label_, b_label_;
  double epsilon_ = kDefaultEpsilon;
  std::unordered_map<std::string, double> scores_;
};

// Scores every phrase in counts_a ∪ counts_b.
RelevanceTable relevance(const CorpusCounts& a, const CorpusCounts& b, double epsilon);

// Iteration i >= 1: i == 1 compares D1 against D0, later iterations compare
// Di against the fixed D1 baseline. Missing inputs throw std::invalid_argument.
RelevanceTable iterative_relevance(int iteration, const CorpusCounts* d0, const CorpusCounts& d1,
                                   const CorpusCounts* di, double epsilon);

// Keeps entries whose trigger has Rel >= 1 under the iteration-1 table.
Lexicon prefilter_concepts(const Lexicon& lexicon, const RelevanceTable& rel_first);

struct TopicScoreSet {
  std::vector<double> scores;
  std::vector<bool> zero_mass;  // topic with sum_m theta = 0, scored 0
  double s_min = 0.0;
  double s_max = 0.0;
  double tau = 0.0;
  double cutoff = 0.0;
  std::vector<std::size_t> relevant;  // ascending topic ids
  bool all_equal = false;

  std::size_t r() const { return relevant.size(); }
};

// Per-document evidence weight: sum of Rel over the document's concept
// mentions (each mention counted).
std::vector<double> evidence_weights(std::span<const std::vector<std::string>> doc_items,
                                     const RelevanceTable& table);

// Score(t) = sum_m theta[t][m] * w[m] / sum_m theta[t][m].
TopicScoreSet score_topics(const Matrix& theta, std::span<const double> doc_weights);
TopicScoreSet score_topics(const Matrix& theta,
                           std::span<const std::vector<std::string>> doc_items,
                           const RelevanceTable& table);

// relevant = { t : score[t] >= (s_max - s_min) * tau + s_min }.
TopicScoreSet threshold_topics(TopicScoreSet scores, double tau);
TopicScoreSet threshold_topics(std::span<const double> scores, double tau);

// Slack on the r/k comparison absorbing rounding in the theta column sums.
inline constexpr double kMassTolerance = 1e-12;

// Documents whose relevant-topic mass is at least r/k.
std::vector<std::size_t> filter_documents(const Matrix& theta, const TopicScoreSet& topics,
                                          std::size_t k);

}  // namespace clinfilter
