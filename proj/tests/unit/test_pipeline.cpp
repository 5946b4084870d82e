#include <algorithm>

#include "clinfilter/parallel.hpp"
#include "clinfilter/pipeline.hpp"
#include "clinfilter/synthetic.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace clinfilter;

namespace {

struct Fixture {
  SyntheticCorpus truth;
  Corpus d0;
};

Fixture small_planted(std::uint64_t seed = 3) {
  SyntheticSpec spec;
  spec.relevant = 60;
  spec.irrelevant_hcp = 240;
  spec.irrelevant_public = 100;
  spec.seed = seed;
  Fixture f;
  f.truth = make_planted_corpus(spec);
  PreprocessOptions o;
  o.query_terms = default_query_terms();
  f.d0 = preprocess_corpus(records_corpus(f.truth.records), Preprocessor(o, Lemmatizer{}));
  return f;
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.k = 8;
  c.lda.iterations = 60;
  c.max_iterations = 3;
  return c;
}

bool subset_of(const std::vector<std::string>& inner, const std::vector<std::string>& outer) {
  std::unordered_set<std::string> o(outer.begin(), outer.end());
  return std::all_of(inner.begin(), inner.end(), [&](const auto& id) { return o.contains(id); });
}

Corpus dated(const std::vector<std::string>& when) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < when.size(); ++i) docs.push_back(testing::doc("w" + std::to_string(i), "x y", "", when[i]));
  return Corpus("D0", docs);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config validation") {
  PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  c.tau = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = PipelineConfig{};
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = PipelineConfig{};
  c.k = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = PipelineConfig{};
  c.patterns.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("retained sets are nested and records consistent") {
  auto f = small_planted();
  auto res = run(f.d0, small_config(), synthetic_lexicon());
  REQUIRE_FALSE(res.records.empty());
  CHECK(res.d0_size == f.d0.size());
  CHECK(subset_of(res.d1.ids(), f.d0.ids()));
  std::vector<std::string> prev = res.d1.ids();
  std::size_t prev_size = res.d1.size();
  for (const auto& rec : res.records) {
    CHECK(rec.corpus_size == prev_size);
    CHECK(rec.topics.r() >= 1);
    if (!rec.applied) break;
    CHECK(subset_of(rec.retained_ids, prev));
    CHECK(rec.retained_ids.size() <= prev.size());
    prev = rec.retained_ids;
    prev_size = prev.size();
  }
  CHECK(res.final_corpus.ids() == prev);
  for (const auto& d : res.d1) CHECK(f.truth.hcp.contains(d.id));
}

TEST_CASE("one iteration gives one record") {
  auto f = small_planted();
  auto cfg = small_config();
  cfg.max_iterations = 1;
  auto res = run(f.d0, cfg, synthetic_lexicon());
  REQUIRE(res.records.size() == 1);
  CHECK(res.final_corpus.ids() == res.records[0].retained_ids);
  CHECK(res.halt == HaltReason::completed);
}

TEST_CASE("tau zero keeps everything") {
  auto f = small_planted();
  auto cfg = small_config();
  cfg.tau = 0.0;
  cfg.max_iterations = 1;
  auto res = run(f.d0, cfg, synthetic_lexicon());
  CHECK(res.records[0].topics.r() == static_cast<std::size_t>(cfg.k));
  CHECK(res.final_corpus.ids() == res.d1.ids());
}

TEST_CASE("iteration one uses the D1 against D0 baseline") {
  auto f = small_planted();
  auto cfg = small_config();
  auto res = run(f.d0, cfg, synthetic_lexicon());
  REQUIRE(res.records.size() >= 2);
  CHECK(res.records[0].relevance.a_label() == "D1");
  CHECK(res.records[0].relevance.b_label() == "D0");
  CHECK(res.records[0].relevance.scores() == res.baseline.scores());
  CHECK(res.records[1].relevance.a_label() == "D2");
  CHECK(res.records[1].relevance.b_label() == "D1");
  auto base = baseline_relevance(f.d0, cfg, synthetic_lexicon());
  CHECK(base.scores() == res.baseline.scores());
}

TEST_CASE("halts") {
  auto f = small_planted();
  CHECK_THROWS(run(Corpus{}, small_config(), synthetic_lexicon()));

  auto cfg = small_config();
  cfg.patterns = {CredentialPattern::parse("zzzqqq")};
  auto none = run(f.d0, cfg, synthetic_lexicon());
  CHECK(none.halt == HaltReason::no_hcp_documents);
  CHECK(none.records.empty());
  CHECK(none.final_corpus.empty());

  cfg = small_config();
  cfg.k = 500;
  auto tiny = run(f.d0, cfg, synthetic_lexicon());
  CHECK(tiny.halt == HaltReason::corpus_too_small);
  CHECK(tiny.records.empty());
  CHECK(tiny.final_corpus.ids() == tiny.d1.ids());
  CHECK_FALSE(tiny.notices.empty());
}

TEST_CASE("topic growth stops before applying the filter") {
  auto f = small_planted();
  auto cfg = small_config();
  cfg.stop_growth_factor = 0.5;  // any r at iteration 2 exceeds half the previous r
  auto res = run(f.d0, cfg, synthetic_lexicon());
  REQUIRE(res.records.size() == 2);
  CHECK(res.halt == HaltReason::topic_growth);
  CHECK_FALSE(res.records[1].applied);
  CHECK(res.final_corpus.ids() == res.records[0].retained_ids);
}

TEST_CASE("runs are deterministic across worker counts") {
  auto f = small_planted(5);
  auto cfg = small_config();
  set_jobs(1);
  auto a = run(f.d0, cfg, synthetic_lexicon());
  set_jobs(4);
  auto b = run(f.d0, cfg, synthetic_lexicon());
  set_jobs(0);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].model.same_state(b.records[i].model));
    CHECK(a.records[i].topics.scores == b.records[i].topics.scores);
    CHECK(a.records[i].retained_ids == b.records[i].retained_ids);
  }
}

TEST_CASE("ablation scores every token") {
  auto f = small_planted();
  auto cfg = small_config();
  cfg.use_concepts = false;
  cfg.max_iterations = 1;
  auto res = run(f.d0, cfg, synthetic_lexicon());
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].relevance.contains("kitchen"));
}

TEST_CASE("iteration seeds") {
  CHECK(iteration_seed(7, 0, 1) == mix_seed(7, 1));
  CHECK(iteration_seed(7, 0, 1) != iteration_seed(7, 0, 2));
  CHECK(iteration_seed(7, 1, 1) != iteration_seed(7, 2, 1));
  CHECK(iteration_seed(7, 3, 2) == mix_seed(mix_seed(7, 1000003ULL * 3), 2));
}

TEST_CASE("window spec parsing") {
  auto s = WindowSpec::parse("14:7:2");
  CHECK(s.length_days == 14);
  CHECK(s.stride_days == 7);
  CHECK(s.rounds == 2);
  CHECK(WindowSpec::parse("10:5").rounds == 2);
  CHECK_THROWS_AS(WindowSpec::parse("7:14"), ConfigError);
  CHECK_THROWS_AS(WindowSpec::parse("14"), ConfigError);
  CHECK_THROWS_AS(WindowSpec::parse("a:b"), ConfigError);
  CHECK_THROWS_AS(WindowSpec::parse("14:7:0"), ConfigError);
}

TEST_CASE("calendar: ten weeks give nine windows") {
  auto c = dated({"2020-03-02T05:00:00Z", "2020-05-10T23:59:00Z"});  // 70 days, Monday to Sunday
  WindowSpec spec;
  auto w = make_windows(c, spec);
  REQUIRE(w.size() == 9);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(w[i].start == parse_date("2020-03-02") + std::chrono::days{7 * static_cast<int>(i)});
    CHECK(w[i].end == w[i].start + std::chrono::days{14});
  }
  CHECK(format_date(w.back().end) == "2020-05-11");
}

TEST_CASE("calendar: five weeks give four windows") {
  auto c = dated({"2020-03-02T00:00:00Z", "2020-04-05T12:00:00Z"});
  auto w = make_windows(c, WindowSpec{});
  REQUIRE(w.size() == 4);
  CHECK(format_date(w[0].start) == "2020-03-02");
  CHECK(format_date(w[3].start) == "2020-03-23");
  CHECK(format_date(w[3].end) == "2020-04-06");
}

TEST_CASE("calendar: disjoint windows and boundary ownership") {
  auto c = dated({"2020-03-01T00:00:00Z", "2020-03-28T10:00:00Z"});
  WindowSpec spec;
  spec.stride_days = 14;
  auto w = make_windows(c, spec);
  REQUIRE(w.size() == 2);
  CHECK(w[0].end == w[1].start);
  const auto edge = parse_iso8601("2020-03-15T00:00:00Z");
  CHECK_FALSE(w[0].contains(edge));
  CHECK(w[1].contains(edge));
}

TEST_CASE("calendar: an explicit start date") {
  auto c = dated({"2020-03-10T00:00:00Z", "2020-03-20T00:00:00Z"});
  WindowSpec spec;
  spec.start = parse_date("2020-03-01");
  auto w = make_windows(c, spec);
  CHECK(format_date(w.front().start) == "2020-03-01");
  CHECK(w.back().end > parse_date("2020-03-20"));
}

TEST_CASE("run_windows skips empty windows") {
  auto f = small_planted();
  // Move every document into the first week, leaving one straggler in week five.
  std::vector<Document> docs(f.d0.begin(), f.d0.end());
  for (std::size_t i = 0; i < docs.size(); ++i)
    docs[i].created_at = parse_iso8601("2020-03-01T00:00:00Z") + std::chrono::minutes{static_cast<int>(i)};
  docs.back().created_at = parse_iso8601("2020-04-01T00:00:00Z");
  Corpus c("D0", docs);
  WindowSpec spec;
  spec.length_days = 7;
  spec.stride_days = 7;
  spec.rounds = 1;
  auto cfg = small_config();
  auto results = run_windows(c, spec, cfg, synthetic_lexicon());
  REQUIRE(results.size() == 5);
  CHECK(results[0].result.has_value());
  CHECK(results[0].documents == docs.size() - 1);
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK_FALSE(results[i].result.has_value());
    CHECK_FALSE(results[i].notice.empty());
  }
  CHECK(results[0].result->records.size() <= 1);
}

}  // TEST_SUITE
