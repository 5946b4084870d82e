// Parallel kernels against their serial reference versions on the planted
// corpus. Thread count comes from OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "clinfilter/author_filter.hpp"
#include "clinfilter/concepts.hpp"
#include "clinfilter/ngrams.hpp"
#include "clinfilter/reference.hpp"
#include "clinfilter/relevance.hpp"
#include "clinfilter/synthetic.hpp"
#include "clinfilter/topic_model.hpp"

using namespace clinfilter;

namespace {

struct Fixture {
  Corpus corpus;
  Matcher matcher;
  TopicModel model;
  std::vector<double> weights;

  Fixture() : matcher(Matcher::build(synthetic_lexicon())) {
    SyntheticSpec spec;
    PreprocessOptions o;
    o.query_terms = default_query_terms();
    corpus = annotate_corpus(preprocess_corpus(records_corpus(make_planted_corpus(spec).records),
                                               Preprocessor(o, Lemmatizer{})),
                             matcher);
    LdaConfig cfg;
    cfg.k = 50;
    cfg.iterations = 20;
    model = fit(corpus, cfg);
    for (std::size_t m = 0; m < corpus.size(); ++m) weights.push_back(1.0 + double(m % 7));
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_annotate(benchmark::State& s) {
  const auto& f = fixture();
  for (auto _ : s) benchmark::DoNotOptimize(annotate_corpus(f.corpus, f.matcher));
}
void BM_annotate_serial(benchmark::State& s) {
  const auto& f = fixture();
  for (auto _ : s) benchmark::DoNotOptimize(reference::annotate_corpus(f.corpus, f.matcher));
}

void BM_count_triggers(benchmark::State& s) {
  const auto& f = fixture();
  for (auto _ : s) benchmark::DoNotOptimize(count_triggers(f.corpus, f.matcher));
}
void BM_count_triggers_serial(benchmark::State& s) {
  const auto& f = fixture();
  for (auto _ : s) benchmark::DoNotOptimize(reference::count_triggers(f.corpus, f.matcher));
}

void BM_count_ngrams(benchmark::State& s) {
  const auto& f = fixture();
  for (auto _ : s) benchmark::DoNotOptimize(count_ngrams(f.corpus, 1, 3));
}
void BM_count_ngrams_serial(benchmark::State& s) {
  const auto& f = fixture();
  for (auto _ : s) benchmark::DoNotOptimize(reference::count_ngrams(f.corpus, 1, 3));
}

void BM_score_topics(benchmark::State& s) {
  const auto& f = fixture();
  for (auto _ : s) benchmark::DoNotOptimize(score_topics(f.model.theta, f.weights));
}
void BM_score_topics_serial(benchmark::State& s) {
  const auto& f = fixture();
  for (auto _ : s) benchmark::DoNotOptimize(reference::score_topics(f.model.theta, f.weights));
}

void BM_hcp_filter(benchmark::State& s) {
  const auto& f = fixture();
  const auto patterns = default_patterns();
  for (auto _ : s) benchmark::DoNotOptimize(filter_hcp(f.corpus, patterns, "D1"));
}
void BM_hcp_filter_serial(benchmark::State& s) {
  const auto& f = fixture();
  const auto patterns = default_patterns();
  for (auto _ : s) benchmark::DoNotOptimize(reference::hcp_mask(f.corpus, patterns));
}

void BM_umass(benchmark::State& s) {
  const auto& f = fixture();
  for (auto _ : s) benchmark::DoNotOptimize(umass_coherence(f.model, f.corpus, 10));
}
void BM_umass_serial(benchmark::State& s) {
  const auto& f = fixture();
  std::vector<std::vector<std::string>> top;
  for (const auto& t : f.model.top_words) {
    top.emplace_back();
    for (const auto& w : t) top.back().push_back(w.token);
  }
  for (auto _ : s) benchmark::DoNotOptimize(reference::umass_coherence(top, f.corpus, 10));
}

}  // namespace

BENCHMARK(BM_annotate)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_annotate_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_triggers)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_triggers_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_ngrams)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_ngrams_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_score_topics)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_score_topics_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_hcp_filter)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hcp_filter_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_umass)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_umass_serial)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
