#include <fstream>

#include "clinfilter/corpus.hpp"
#include "doctest.h"
#include "clinfilter/parallel.hpp"
#include "helpers.hpp"

using namespace clinfilter;
using testing::record_line;

namespace {

Preprocessor english() {
  PreprocessOptions o;
  o.stopwords = load_word_list(CLINFILTER_DATA_DIR "/stopwords_en.txt");
  o.query_terms = default_query_terms();
  return Preprocessor(o, Lemmatizer::load(CLINFILTER_DATA_DIR "/lemmas.tsv"));
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("ingest counts valid and malformed lines") {
  std::vector<std::string> lines = {record_line("a", "one", ""), record_line("b", "two", ""),
                                    record_line("c", "three", "")};
  auto ok = ingest_lines(lines);
  CHECK(ok.corpus.size() == 3);
  CHECK(ok.skipped == 0);

  lines.insert(lines.begin() + 1, "{not json");
  auto bad = ingest_lines(lines);
  CHECK(bad.corpus.size() == 3);
  CHECK(bad.skipped == 1);
  CHECK(bad.lines == 4);
  CHECK_FALSE(bad.warnings.empty());

  auto empty = ingest_lines(std::vector<std::string>{});
  CHECK(empty.corpus.empty());
  CHECK(empty.skipped == 0);
}

TEST_CASE("ingest rejects duplicate ids, bad timestamps and missing fields") {
  std::vector<std::string> lines = {
      record_line("a", "one", ""),
      record_line("a", "again", ""),
      record_line("b", "two", "", "yesterday"),
      R"({"id":"c","text":"x"})",
      record_line("", "empty id", ""),
  };
  auto res = ingest_lines(lines);
  CHECK(res.corpus.size() == 1);
  CHECK(res.skipped == 4);
}

TEST_CASE("ingest of an unreadable file throws") {
  CHECK_THROWS_AS(ingest("/nonexistent/corpus.jsonl"), InputError);
}

TEST_CASE("ingest reads a file and keeps thread ids") {
  auto dir = testing::scratch_dir("ingest");
  {
    std::ofstream f(dir / "c.jsonl");
    f << record_line("a", "hello", "") << "\n\n";
    f << R"({"id":"b","text":"reply","user_name":"n","user_handle":"h","user_bio":"","created_at":"2020-03-02","thread_id":"t1"})"
      << "\n";
  }
  auto res = ingest(dir / "c.jsonl");
  REQUIRE(res.corpus.size() == 2);
  CHECK_FALSE(res.corpus[0].thread_id.has_value());
  CHECK(res.corpus[1].thread_id == "t1");
  CHECK(format_iso8601(res.corpus[1].created_at) == "2020-03-02T00:00:00Z");
}

TEST_CASE("timestamps normalize to UTC") {
  CHECK(format_iso8601(parse_iso8601("2020-03-15T10:30:00+02:00")) == "2020-03-15T08:30:00Z");
  CHECK(format_iso8601(parse_iso8601("2020-03-15 08:30")) == "2020-03-15T08:30:00Z");
  CHECK(format_iso8601(parse_iso8601("2020-03-15T08:30:00.250Z")) == "2020-03-15T08:30:00Z");
  CHECK_FALSE(try_parse_iso8601("2020-13-01").has_value());
  CHECK_FALSE(try_parse_iso8601("2020-02-30").has_value());
}

TEST_CASE("preprocess hand trace") {
  auto pp = english();
  RawRecord r;
  r.id = "x";
  r.text = "Doctors can't treat COVID19 <b>yet</b> \xF0\x9F\x98\xB7 http://x.co";
  auto d = preprocess(r, pp);
  CHECK(d.tokens == std::vector<std::string>{"doctor", "treat", "yet"});
}

TEST_CASE("preprocess degenerate texts") {
  auto pp = english();
  RawRecord r;
  r.text = "the and of to it is";
  CHECK(preprocess(r, pp).tokens.empty());
  r.text = "coronavirus";
  CHECK(preprocess(r, pp).tokens.empty());
  r.text = "#COVID19";
  CHECK(preprocess(r, pp).tokens.empty());
  r.text = "";
  CHECK(preprocess(r, pp).tokens.empty());
}

TEST_CASE("preprocess strips markup, entities and emoji") {
  auto pp = english();
  CHECK(pp.tokenize("<a href='x'>Nurses</a> &amp; ICU beds\xE2\x9D\xA4\xEF\xB8\x8F www.example.org") ==
        std::vector<std::string>{"nurse", "icu", "bed"});
  CHECK(pp.tokenize("Caf\x65\xCC\x81 patients") == std::vector<std::string>{"caf\xC3\xA9", "patient"});
  CHECK(pp.tokenize("We're waiting, they've got ventilators!") == std::vector<std::string>{"waiting", "got", "ventilator"});
}

TEST_CASE("preprocess is idempotent and drops every stopword and query term") {
  auto pp = english();
  const std::vector<std::string> texts = {
      "Doctors can't treat COVID19 <b>yet</b>", "Our hospitals aren't ready for the SARS-CoV-2 surge!!",
      "Masks, masks & more masks... @cdc #StayHome", "Patients' lungs show ground-glass opacities",
      "I've been an ICU nurse for 12 years; this is different"};
  for (const auto& t : texts) {
    auto once = pp.tokenize(t);
    CHECK(pp.tokenize(join(once, " ")) == once);
    for (const auto& tok : once) {
      CHECK_FALSE(pp.options().stopwords.contains(tok));
      CHECK_FALSE(pp.options().query_terms.contains(tok));
      CHECK_FALSE(tok.empty());
    }
  }
}

TEST_CASE("lemmatizer is idempotent") {
  auto lem = Lemmatizer::load(CLINFILTER_DATA_DIR "/lemmas.tsv");
  for (std::string w : {"doctors", "viruses", "children", "diagnoses", "pts", "ards", "glasses", "feet", "tested"}) {
    auto once = lem.lemmatize(w);
    CHECK(lem.lemmatize(once) == once);
  }
  CHECK(lem.lemmatize("children") == "child");
  CHECK(lem.lemmatize("ards") == "ards");
}

TEST_CASE("subset preserves order and composes") {
  auto c = testing::corpus_of({"a b", "b c", "c d", "d e"});
  CHECK(subset(c, std::unordered_set<std::string>{"d0", "d1", "d2", "d3"}).ids() == c.ids());
  CHECK(subset(c, std::unordered_set<std::string>{}).empty());

  auto half = subset(c, std::unordered_set<std::string>{"d3", "d1"});
  CHECK(half.ids() == std::vector<std::string>{"d1", "d3"});
  CHECK(half.vocab().size() == 4);  // b c d e

  auto two_step = subset(subset(c, std::unordered_set<std::string>{"d0", "d1", "d3"}),
                         std::unordered_set<std::string>{"d3", "d0"});
  auto one_step = subset(c, std::unordered_set<std::string>{"d0", "d3"});
  CHECK(two_step.ids() == one_step.ids());

  CHECK_THROWS_AS(subset(c, std::unordered_set<std::string>{"zz"}), std::invalid_argument);
}

TEST_CASE("vocabulary covers exactly the tokens present") {
  auto c = testing::corpus_of({"x y x", "z"});
  CHECK(c.vocab().tokens() == std::vector<std::string>{"x", "y", "z"});
  CHECK(c.word_ids(0) == std::vector<std::uint32_t>{0, 1, 0});
}

TEST_CASE("group_threads concatenates replies in time order") {
  std::vector<Document> docs = {
      testing::doc("r2", "third", "", "2020-03-01T12:00:02Z"),
      testing::doc("solo", "alone", "", "2020-03-01T12:00:01Z"),
      testing::doc("r1", "first", "", "2020-03-01T12:00:00Z"),
  };
  docs[0].thread_id = "t";
  docs[2].thread_id = "t";
  docs[0].raw_text = "third";
  docs[2].raw_text = "first";
  auto grouped = group_threads(Corpus("D0", docs));
  REQUIRE(grouped.size() == 2);
  CHECK(grouped[0].raw_text.find("first") < grouped[0].raw_text.find("third"));
  CHECK(grouped[1].id == "solo");
}

TEST_CASE("preprocess_corpus output does not depend on worker count") {
  auto pp = english();
  std::vector<std::string> lines;
  for (int i = 0; i < 200; ++i)
    lines.push_back(record_line("id" + std::to_string(i), "Doctors treating patients number " + std::to_string(i), ""));
  auto raw = ingest_lines(lines).corpus;
  set_jobs(1);
  auto serial = preprocess_corpus(raw, pp);
  set_jobs(4);
  auto parallel = preprocess_corpus(raw, pp);
  set_jobs(0);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].id == parallel[i].id);
    CHECK(serial[i].tokens == parallel[i].tokens);
  }
}

}  // TEST_SUITE
