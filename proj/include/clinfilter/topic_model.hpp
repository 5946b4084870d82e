#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "clinfilter/corpus.hpp"
#include "clinfilter/matrix.hpp"
#include "json.hpp"

namespace clinfilter {

struct LdaConfig {
  int k = 100;
  double alpha = 0.0;  // per-topic symmetric prior; <= 0 means 5/k
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 1;
  int top_words = 10;

  double alpha_per_topic() const { return alpha > 0.0 ? alpha : 5.0 / k; }
  void validate() const;  // throws std::invalid_argument

  bool operator==(const LdaConfig&) const = default;
};

struct TopWord {
  std::string token;
  double weight = 0.0;

  bool operator==(const TopWord&) const = default;
};

struct TopicModel {
  LdaConfig config;
  std::vector<std::string> vocab;    // word id -> token
  std::vector<std::string> doc_ids;  // column order of theta
  Matrix theta;                      // k x M, columns sum to 1
  Matrix phi;                        // k x V, rows sum to 1
  std::vector<std::vector<std::uint16_t>> assignments;  // per document, per token
  std::vector<std::vector<TopWord>> top_words;          // per topic, descending weight
  std::vector<std::string> warnings;                    // not serialized

  std::size_t num_topics() const { return theta.rows(); }
  std::size_t num_docs() const { return theta.cols(); }

  bool same_state(const TopicModel& other) const;
};

// Collapsed Gibbs sampling; theta and phi come from the final sample.
// Deterministic for a given (corpus, config). Empty corpus throws
// std::invalid_argument; k above the vocabulary size adds a warning.
TopicModel fit(const Corpus& corpus, const LdaConfig& config);

// Sum of theta over `topics` for one document. Out-of-range indices throw
// std::out_of_range.
double doc_topic_mass(const TopicModel& model, std::size_t doc,
                      std::span<const std::size_t> topics);

struct CoherenceResult {
  std::vector<double> scores;         // per topic
  std::vector<bool> missing_word;     // a top word never occurs in the corpus
};

// UMass coherence over the top_n words of each topic, with document
// frequencies counted in `corpus`.
CoherenceResult umass_coherence(const TopicModel& model, const Corpus& corpus, int top_n);

nlohmann::json model_to_json(const TopicModel& model);
TopicModel model_from_json(const nlohmann::json& j);
void save_model(const TopicModel& model, const std::filesystem::path& path);
TopicModel load_model(const std::filesystem::path& path);

}  // namespace clinfilter
