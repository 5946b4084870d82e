#include <random>

#include "clinfilter/reference.hpp"
#include "clinfilter/relevance.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace clinfilter;

namespace {

CorpusCounts counts(std::string label, std::size_t size, std::unordered_map<std::string, std::uint64_t> c) {
  return CorpusCounts{std::move(label), std::move(c), size};
}

Matrix theta_of(std::vector<std::vector<double>> rows) {
  Matrix m(rows.size(), rows.at(0).size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

}  // namespace

TEST_SUITE("relevance-engine") {

TEST_CASE("relevance score frozen values") {
  CHECK(relevance_score(0, 0, 10, 110, 1e-4) == 1.0);
  CHECK(relevance_score(5, 15, 10, 110, 1e-4) == doctest::Approx(4.996003996003996).epsilon(1e-14));
  CHECK(relevance_score(3, 3, 10, 110, 1e-4) == doctest::Approx(3001.0).epsilon(1e-12));
  // Empty complement: the rest rate is 0.
  CHECK(relevance_score(4, 4, 8, 8, 1e-4) == doctest::Approx(5001.0).epsilon(1e-12));
}

TEST_CASE("relevance rejects broken containment") {
  CHECK_THROWS_AS(relevance_score(4, 3, 10, 20, 1e-4), std::logic_error);
  CHECK_THROWS_AS(relevance_score(1, 3, 30, 20, 1e-4), std::logic_error);
  CHECK_THROWS_AS(relevance_score(1, 3, 10, 20, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(relevance(counts("A", 2, {{"x", 5}}), counts("B", 9, {{"x", 4}}), 1e-4), std::logic_error);
}

TEST_CASE("relevance monotonicity") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const std::size_t a = 1 + rng() % 50, b = a + 1 + rng() % 100;
    const std::uint64_t fa = rng() % 30, rest = rng() % 30;
    const double base = relevance_score(fa, fa + rest, a, b, 1e-4);
    CHECK(relevance_score(fa + 1, fa + 1 + rest, a, b, 1e-4) > base);
    CHECK(relevance_score(fa, fa + rest + 1, a, b, 1e-4) < base);
  }
}

TEST_CASE("relevance is scale invariant as epsilon vanishes") {
  const double e = 1e-15;
  CHECK(relevance_score(5, 15, 10, 110, e) == doctest::Approx(relevance_score(15, 45, 30, 330, e)).epsilon(1e-12));
}

TEST_CASE("relevance table covers both count maps and defaults to 1") {
  auto t = relevance(counts("D1", 10, {{"fever", 5}, {"rare", 0}}), counts("D0", 110, {{"fever", 15}, {"cough", 4}}),
                     1e-4);
  CHECK(t.contains("fever"));
  CHECK(t.contains("cough"));
  CHECK(t.contains("rare"));
  CHECK(t.get("cough") < 1.0);
  CHECK(t.get("unseen") == 1.0);
  CHECK(t.a_label() == "D1");
  CHECK(t.b_label() == "D0");
  auto ranked = t.ranked();
  CHECK(ranked.front().first == "fever");
}

TEST_CASE("iterative relevance case split") {
  auto d0 = counts("D0", 100, {{"x", 10}});
  auto d1 = counts("D1", 40, {{"x", 8}});
  auto d3 = counts("D3", 10, {{"x", 6}});
  auto first = iterative_relevance(1, &d0, d1, nullptr, 1e-4);
  CHECK(first.get("x") == relevance_score(8, 10, 40, 100, 1e-4));
  auto third = iterative_relevance(3, nullptr, d1, &d3, 1e-4);
  CHECK(third.get("x") == relevance_score(6, 8, 10, 40, 1e-4));
  CHECK(third.a_label() == "D3");
  CHECK(third.b_label() == "D1");
  CHECK_THROWS_AS(iterative_relevance(1, nullptr, d1, &d3, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(iterative_relevance(2, &d0, d1, nullptr, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(iterative_relevance(0, &d0, d1, &d3, 1e-4), std::invalid_argument);
}

TEST_CASE("concept prefilter boundary") {
  auto lex = testing::lexicon_of({"exact", "low", "absent", "high"});
  RelevanceTable t("D1", "D0", 1e-4);
  t.set("exact", 1.0);
  t.set("low", 0.4);
  t.set("high", 7.0);
  auto kept = prefilter_concepts(lex, t);
  std::vector<std::string> names;
  for (const auto& e : kept) names.push_back(e.trigger_text());
  CHECK(names == std::vector<std::string>{"exact", "absent", "high"});
}

TEST_CASE("score_topics hand cases") {
  RelevanceTable t("A", "B", 1e-4);
  t.set("a", 2.0);
  t.set("b", 3.0);
  std::vector<std::vector<std::string>> items = {{"a", "b"}};
  auto s = score_topics(theta_of({{1.0}}), items, t);
  CHECK(s.scores[0] == 5.0);

  std::vector<std::vector<std::string>> none = {{}, {}};
  auto z = score_topics(theta_of({{0.5, 0.2}, {0.5, 0.8}}), none, t);
  CHECK(z.scores == std::vector<double>{0.0, 0.0});

  // Duplicate mentions count.
  std::vector<std::vector<std::string>> dup = {{"a", "a"}};
  CHECK(score_topics(theta_of({{1.0}}), dup, t).scores[0] == 4.0);
}

TEST_CASE("score_topics three documents two topics") {
  const std::vector<double> w = {5.0, 1.0, 0.0};
  auto theta = theta_of({{0.9, 0.3, 0.5}, {0.1, 0.7, 0.5}});
  auto s = score_topics(theta, w);
  CHECK(s.scores[0] == doctest::Approx((0.9 * 5 + 0.3 * 1) / 1.7).epsilon(1e-15));
  CHECK(s.scores[1] == doctest::Approx((0.1 * 5 + 0.7 * 1) / 1.3).epsilon(1e-15));
}

TEST_CASE("score_topics flags zero-mass topics") {
  const std::vector<double> w = {1.0, 2.0};
  auto s = score_topics(theta_of({{0.0, 0.0}, {1.0, 1.0}}), w);
  CHECK(s.zero_mass[0]);
  CHECK(s.scores[0] == 0.0);
  CHECK_FALSE(s.zero_mass[1]);
  const std::vector<double> short_w = {1.0};
  CHECK_THROWS_AS(score_topics(theta_of({{1.0, 1.0}}), short_w), std::invalid_argument);
}

TEST_CASE("threshold frozen example and extremes") {
  const std::vector<double> s = {0.0, 4.0, 10.0};
  auto r = threshold_topics(s, 0.25);
  CHECK(r.cutoff == 2.5);
  CHECK(r.relevant == std::vector<std::size_t>{1, 2});
  CHECK(r.r() == 2);
  CHECK(threshold_topics(s, 0.0).r() == 3);
  CHECK(threshold_topics(s, 1.0).relevant == std::vector<std::size_t>{2});

  const std::vector<double> flat = {3.0, 3.0};
  auto f = threshold_topics(flat, 0.7);
  CHECK(f.all_equal);
  CHECK(f.r() == 2);

  CHECK_THROWS_AS(threshold_topics(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(threshold_topics(s, 1.5), std::invalid_argument);
}

TEST_CASE("filter_documents rules") {
  auto theta = theta_of({{0.3, 0.1}, {0.3, 0.1}, {0.2, 0.4}, {0.2, 0.4}});
  TopicScoreSet rs;
  rs.relevant = {0, 1};
  // k=4, r=2: threshold 0.5; doc0 has 0.6, doc1 0.2.
  CHECK(filter_documents(theta, rs, 4) == std::vector<std::size_t>{0});
  rs.relevant = {0, 1, 2, 3};
  CHECK(filter_documents(theta, rs, 4) == std::vector<std::size_t>{0, 1});

  Matrix big(100, 1, 0.61 / 60);
  for (std::size_t t = 0; t < 40; ++t) big(t, 0) = 0.39 / 40;
  TopicScoreSet forty;
  for (std::size_t t = 0; t < 40; ++t) forty.relevant.push_back(t);
  CHECK(filter_documents(big, forty, 100).empty());
  CHECK_THROWS_AS(filter_documents(big, forty, 50), std::invalid_argument);
}

TEST_CASE("filter and score agree with the reference kernels") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng() % 6, M = 1 + rng() % 40;
    Matrix theta(k, M);
    for (std::size_t m = 0; m < M; ++m) {
      double s = 0;
      for (std::size_t t = 0; t < k; ++t) s += theta(t, m) = u(rng);
      for (std::size_t t = 0; t < k; ++t) theta(t, m) /= s;
    }
    std::vector<double> w(M);
    for (auto& x : w) x = u(rng) * 10;
    auto scores = score_topics(theta, w);
    auto expect = reference::score_topics(theta, w);
    for (std::size_t t = 0; t < k; ++t) CHECK(scores.scores[t] == doctest::Approx(expect[t]).epsilon(1e-12));
    auto th = threshold_topics(std::move(scores), u(rng));
    CHECK(filter_documents(theta, th, k) == reference::filter_documents(theta, th.relevant, k));
  }
}

}  // TEST_SUITE
