#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinfilter/author_filter.hpp"
#include "clinfilter/concepts.hpp"
#include "clinfilter/corpus.hpp"
#include "clinfilter/relevance.hpp"
#include "clinfilter/topic_model.hpp"

namespace clinfilter {

enum class CountMode { occurrences, documents };

struct PipelineConfig {
  int k = 100;
  double tau = 0.25;
  int max_iterations = 3;
  double epsilon = kDefaultEpsilon;
  LdaConfig lda;  // lda.k is overridden by k
  bool use_concepts = true;
  double stop_growth_factor = 2.0;
  CountMode count_mode = CountMode::occurrences;
  std::vector<CredentialPattern> patterns = default_patterns();

  void validate() const;  // throws ConfigError
};

enum class HaltReason { completed, topic_growth, corpus_too_small, no_hcp_documents };
std::string_view to_string(HaltReason reason);

struct IterationRecord {
  int iteration = 0;
  std::size_t corpus_size = 0;  // M^(i)
  std::uint64_t seed = 0;
  TopicModel model;
  RelevanceTable relevance;
  TopicScoreSet topics;
  std::vector<std::string> retained_ids;  // ids of D^(i+1)
  bool applied = true;  // false when the run stopped on topic growth here
};

struct PipelineResult {
  std::size_t d0_size = 0;
  Corpus d1;  // HCP-authored, annotated
  std::vector<std::size_t> pattern_counts;
  RelevanceTable baseline;  // Rel(c; D1, D0)
  std::size_t evidence_kept = 0;     // phrases passing the Rel >= 1 pre-filter
  std::size_t evidence_dropped = 0;
  std::vector<IterationRecord> records;
  Corpus final_corpus;
  HaltReason halt = HaltReason::completed;
  std::vector<std::string> notices;
};

struct RunOptions {
  // Replaces the iteration-1 table computed from this D0/D1 pair.
  const RelevanceTable* baseline = nullptr;
  // Distinguishes sampler seeds of runs sharing one base seed (windows).
  std::uint64_t seed_stream = 0;
};

std::uint64_t iteration_seed(std::uint64_t base, std::uint64_t stream, int iteration);

// Author filter, annotation of D1, then per iteration: fit LDA, score
// concepts, score topics, threshold, filter documents. Stops after
// max_iterations, when r grows past stop_growth_factor * previous r (that
// iteration's filter is not applied), or when the corpus drops below k.
PipelineResult run(const Corpus& d0, const PipelineConfig& config, const Lexicon& lexicon,
                   const RunOptions& options = {});

// Rel(c; D1, D0) as run() computes it, for use as a shared baseline.
RelevanceTable baseline_relevance(const Corpus& d0, const PipelineConfig& config,
                                  const Lexicon& lexicon);

struct WindowSpec {
  std::optional<Day> start;  // defaults to the day of the earliest document
  int length_days = 14;
  int stride_days = 7;
  int rounds = 2;
  bool global_baseline = false;

  void validate() const;  // throws ConfigError
  static WindowSpec parse(std::string_view text);  // "14:7:2"
};

struct WindowBounds {
  Day start;
  Day end;  // exclusive; a document at exactly `end` belongs to the next window

  bool contains(Timestamp ts) const { return ts >= start && ts < end; }
  bool operator==(const WindowBounds&) const = default;
};

// Windows covering [start, last document day], stepping by stride_days.
std::vector<WindowBounds> make_windows(const Corpus& corpus, const WindowSpec& spec);

struct WindowResult {
  std::size_t index = 0;
  WindowBounds bounds;
  std::size_t documents = 0;
  std::optional<PipelineResult> result;  // empty when skipped
  std::string notice;
};

// Independent pipeline runs (max_iterations = rounds) per window, in parallel.
std::vector<WindowResult> run_windows(const Corpus& d0, const WindowSpec& spec,
                                      const PipelineConfig& config, const Lexicon& lexicon);

}  // namespace clinfilter
