#include "clinfilter/config.hpp"
#include "clinfilter/io.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace clinfilter;
namespace fs = std::filesystem;

TEST_SUITE("config") {

TEST_CASE("parse, defaults and path resolution") {
  auto m = parse_config_text("# run\nk = 12\ntau=0.5\nlexicon = lex.tsv\n\nwindow.length_days = 10\n", "/data/x");
  auto c = build_config(m);
  CHECK(c.pipeline.k == 12);
  CHECK(c.pipeline.tau == 0.5);
  CHECK(c.lexicon == fs::path("/data/x/lex.tsv"));
  CHECK(c.window.length_days == 10);
  CHECK(c.window.stride_days == 7);
  CHECK(c.pipeline.max_iterations == 3);
  CHECK(c.pipeline.use_concepts);
}

TEST_CASE("bad input is rejected") {
  CHECK_THROWS_AS(parse_config_text("kk = 3\n", "/"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("k = three\n", "/"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just words\n", "/"), ConfigError);
  CHECK_THROWS_AS(build_config(parse_config_text("tau = 1.5\n", "/")), ConfigError);
  CHECK_THROWS_AS(build_config(parse_config_text("k = 0\n", "/")), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/clinfilter.conf"), std::exception);
}

TEST_CASE("overrides go through the same validation") {
  ConfigMap m;
  set_config_value(m, "use_concepts", "off", "/");
  CHECK_FALSE(build_config(m).pipeline.use_concepts);
  CHECK_THROWS_AS(set_config_value(m, "nope", "1", "/"), ConfigError);
  set_config_value(m, "max_iterations", "-1", "/");
  CHECK_THROWS_AS(build_config(m), ConfigError);
}

TEST_CASE("snapshot replays to the same configuration") {
  auto m = parse_config_text("k = 9\nseed = 42\nlexicon = /l.tsv\nlda.iterations = 77\nquery_terms = covid,sars\n"
                             "timeline_keywords = a=x.*;y.*\n",
                             "/");
  auto first = snapshot(build_config(m));
  CHECK(first.count("tau") == 1);
  CHECK(first.count("output_dir") == 0);
  ConfigMap again;
  for (const auto& [k, v] : first) set_config_value(again, k, v, "/elsewhere");
  CHECK(snapshot(build_config(again)) == first);
  auto c = build_config(again);
  CHECK(c.pipeline.lda.seed == 42);
  CHECK(c.timeline_keywords.size() == 2);
  CHECK(c.query_terms == std::vector<std::string>{"covid", "sars"});
}

TEST_CASE("every known key appears in the snapshot") {
  auto snap = snapshot(build_config({}));
  for (auto key : config_keys()) {
    if (key == "output_dir") continue;
    CHECK_MESSAGE(snap.count(std::string(key)) == 1, key);
  }
}

}  // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  auto dir = testing::scratch_dir("sha");
  write_file(dir / "f.txt", "abc");
  CHECK(sha256_file(dir / "f.txt") == sha256_hex("abc"));
  CHECK(read_file(dir / "f.txt") == "abc");
  CHECK_THROWS_AS(read_file(dir / "missing"), InputError);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

}  // TEST_SUITE
