// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "clinfilter/config.hpp"
#include "clinfilter/io.hpp"
#include "clinfilter/pipeline.hpp"
#include "clinfilter/reference.hpp"
#include "clinfilter/relevance.hpp"
#include "clinfilter/synthetic.hpp"
#include "clinfilter/topic_model.hpp"
#include "commands.hpp"

using namespace clinfilter;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

// Written out from the definition, independent of relevance_score.
double direct_rel(double fa, double fb, double a, double b, double eps) {
  const double inside = fa / a;
  const double outside = b == a ? 0.0 : (fb - fa) / (b - a);
  return (inside + eps) / (outside + eps);
}

Outcome relevance_oracle() {
  std::mt19937_64 rng(20200301);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t size_b = 1 + rng() % 100000;
    const std::uint64_t size_a = 1 + rng() % size_b;
    const std::uint64_t f_b = rng() % (5 * size_b + 1);
    const std::uint64_t f_a = std::min<std::uint64_t>(f_b, rng() % (5 * size_a + 1));
    const double eps = std::pow(10.0, -1.0 - static_cast<double>(rng() % 8));
    const double got = relevance_score(f_a, f_b, size_a, size_b, eps);
    const double want = direct_rel(double(f_a), double(f_b), double(size_a), double(size_b), eps);
    worst = std::max(worst, std::abs(got - want) / std::abs(want));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 1.0,
          "max relative error " + fmt(worst) + " over 1000 tuples, " + fmt(secs, 3) + " s"};
}

CorpusCounts counts(std::string label, std::size_t size, std::map<std::string, std::uint64_t> c) {
  CorpusCounts out;
  out.label = std::move(label);
  out.size = size;
  for (auto& [k, v] : c) out.counts[k] = v;
  return out;
}

Outcome iteration_case_split() {
  const auto d0 = counts("D0", 1000, {{"fever", 90}, {"cough", 40}, {"rash", 7}});
  const auto d1 = counts("D1", 400, {{"fever", 60}, {"cough", 10}, {"rash", 6}});
  const auto d2 = counts("D2", 50, {{"fever", 30}, {"cough", 1}, {"rash", 0}});
  const double eps = 1e-4;
  auto agrees = [&](const RelevanceTable& t, const CorpusCounts& a, const CorpusCounts& b) {
    for (const auto& [phrase, fb] : b.counts) {
      const auto fa = a.counts.contains(phrase) ? a.counts.at(phrase) : 0;
      if (t.get(phrase) != relevance_score(fa, fb, a.size, b.size, eps)) return false;
    }
    return true;
  };
  bool ok = true;
  std::string detail;
  // Iteration 1 may not look at a later corpus; later ones may not look at D0.
  const auto first = iterative_relevance(1, &d0, d1, nullptr, eps);
  ok &= first.a_label() == "D1" && first.b_label() == "D0" && agrees(first, d1, d0) && !agrees(first, d2, d1);
  for (int i = 2; i <= 3; ++i) {
    const auto later = iterative_relevance(i, nullptr, d1, &d2, eps);
    ok &= later.a_label() == "D2" && later.b_label() == "D1" && agrees(later, d2, d1) && !agrees(later, d1, d0);
  }
  detail = "i=1 scores (D1, D0); i=2,3 score (Di, D1)";
  try {
    iterative_relevance(2, &d0, d1, nullptr, eps);
    ok = false;
    detail += "; missing Di not rejected";
  } catch (const std::exception&) {
  }
  return {ok, detail};
}

Outcome score_oracle() {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t docs = 1 + rng() % 5, k = 1 + rng() % 4, concepts = 1 + rng() % 6;
    Matrix theta(k, docs);
    for (std::size_t m = 0; m < docs; ++m) {
      double s = 0;
      for (std::size_t t = 0; t < k; ++t) s += theta(t, m) = u(rng) < 0.2 ? 0.0 : u(rng);
      for (std::size_t t = 0; t < k; ++t) theta(t, m) = s > 0 ? theta(t, m) / s : 1.0 / double(k);
    }
    RelevanceTable table("A", "B", 1e-4);
    std::vector<double> rel(concepts);
    for (std::size_t c = 0; c < concepts; ++c) table.set("c" + std::to_string(c), rel[c] = 0.01 + 20 * u(rng));
    std::vector<std::vector<std::string>> items(docs);
    std::vector<double> evidence(docs, 0.0);
    for (std::size_t m = 0; m < docs; ++m) {
      const std::size_t n = rng() % 5;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t c = rng() % concepts;
        items[m].push_back("c" + std::to_string(c));
        evidence[m] += rel[c];
      }
    }
    const auto got = score_topics(theta, items, table).scores;
    for (std::size_t t = 0; t < k; ++t) {
      double num = 0, den = 0;
      for (std::size_t m = 0; m < docs; ++m) {
        num += theta(t, m) * evidence[m];
        den += theta(t, m);
      }
      const double want = den > 0 ? num / den : 0.0;
      worst = std::max(worst, std::abs(got[t] - want) / std::max(1.0, std::abs(want)));
    }
  }
  return {worst <= 1e-12, "max error " + fmt(worst) + " over 20 instances"};
}

Outcome threshold_properties() {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int v = 0; v < 500; ++v) {
    const std::size_t k = 1 + rng() % 30;
    std::vector<double> scores(k);
    // Small integer range makes ties common.
    for (auto& s : scores) s = v % 2 ? double(rng() % 5) : 100 * u(rng);
    const double hi = *std::max_element(scores.begin(), scores.end());
    std::vector<std::size_t> argmax;
    for (std::size_t t = 0; t < k; ++t)
      if (scores[t] == hi) argmax.push_back(t);

    std::vector<std::size_t> prev;
    for (int step = 0; step <= 20; ++step) {
      const auto cur = threshold_topics(scores, step / 20.0).relevant;
      if (step > 0 && !std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) ++violations;
      if (step == 0 && cur.size() != k) ++violations;
      if (step == 20 && cur != argmax) ++violations;
      prev = cur;
    }

    const std::size_t docs = 1 + rng() % 20;
    Matrix theta(k, docs);
    for (std::size_t m = 0; m < docs; ++m) {
      double s = 0;
      for (std::size_t t = 0; t < k; ++t) s += theta(t, m) = u(rng);
      for (std::size_t t = 0; t < k; ++t) theta(t, m) /= s;
    }
    auto all = threshold_topics(std::vector<double>(k, 1.0), 0.25);
    if (filter_documents(theta, all, k).size() != docs) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations over 500 score vectors"};
}

Corpus two_vocab_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Document> docs;
  for (std::size_t d = 0; d < 200; ++d) {
    Document doc;
    doc.id = "d" + std::to_string(d);
    const char prefix = d % 2 ? 'a' : 'b';
    for (int i = 0; i < 50; ++i) doc.tokens.push_back(std::string(1, prefix) + std::to_string(rng() % 25));
    docs.push_back(std::move(doc));
  }
  return Corpus("D0", std::move(docs));
}

Outcome lda_recovery() {
  const auto t0 = Clock::now();
  double purity_sum = 0.0, worst_norm = 0.0;
  int topics = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto corpus = two_vocab_corpus(100 + seed);
    LdaConfig cfg;
    cfg.k = 2;
    cfg.iterations = 1000;
    cfg.seed = seed;
    const auto m = fit(corpus, cfg);
    for (const auto& words : m.top_words) {
      std::size_t a = 0;
      for (const auto& w : words) a += w.token[0] == 'a';
      purity_sum += double(std::max(a, words.size() - a)) / double(words.size());
      ++topics;
    }
    for (std::size_t c = 0; c < m.theta.cols(); ++c) {
      double s = 0;
      for (std::size_t t = 0; t < m.theta.rows(); ++t) s += m.theta(t, c);
      worst_norm = std::max(worst_norm, std::abs(s - 1.0));
    }
    for (std::size_t t = 0; t < m.phi.rows(); ++t) {
      double s = 0;
      for (double v : m.phi.row(t)) s += v;
      worst_norm = std::max(worst_norm, std::abs(s - 1.0));
    }
  }
  const double purity = purity_sum / topics;
  const double secs = seconds_since(t0);
  return {purity >= 0.9 && worst_norm <= 1e-9 && secs < 30.0,
          "mean purity " + fmt(purity) + ", normalization error " + fmt(worst_norm) + ", " + fmt(secs, 3) + " s"};
}

Outcome umass_oracle() {
  std::mt19937_64 rng(66);
  std::vector<Document> docs;
  for (int d = 0; d < 50; ++d) {
    Document doc;
    doc.id = "u" + std::to_string(d);
    const std::size_t len = 3 + rng() % 12;
    for (std::size_t i = 0; i < len; ++i) doc.tokens.push_back("w" + std::to_string(rng() % 30));
    docs.push_back(std::move(doc));
  }
  const Corpus corpus("D0", std::move(docs));
  LdaConfig cfg;
  cfg.k = 4;
  cfg.iterations = 100;
  const auto model = fit(corpus, cfg);
  std::vector<std::vector<std::string>> top;
  for (const auto& t : model.top_words) {
    top.emplace_back();
    for (const auto& w : t) top.back().push_back(w.token);
  }
  const auto got = umass_coherence(model, corpus, 10).scores;
  const auto want = reference::umass_coherence(top, corpus, 10);
  return {got == want, std::to_string(got.size()) + " topics compared for exact equality"};
}

Preprocessor demo_preprocessor() {
  const fs::path data = CLINFILTER_DATA_DIR;
  PreprocessOptions o;
  o.stopwords = load_word_list(data / "stopwords_en.txt");
  o.query_terms = default_query_terms();
  return Preprocessor(o, Lemmatizer::load(data / "lemmas.tsv"));
}

bool nested(const std::vector<IterationRecord>& records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!records[i].applied) continue;
    std::set<std::string> outer(records[i - 1].retained_ids.begin(), records[i - 1].retained_ids.end());
    for (const auto& id : records[i].retained_ids)
      if (!outer.contains(id)) return false;
  }
  return true;
}

Outcome planted_run() {
  const auto t0 = Clock::now();
  SyntheticSpec spec;
  spec.seed = 7;
  const auto truth = make_planted_corpus(spec);
  const auto d0 = preprocess_corpus(records_corpus(truth.records), demo_preprocessor());
  PipelineConfig cfg;
  cfg.k = 20;
  cfg.tau = 0.25;
  cfg.max_iterations = 3;
  cfg.lda.seed = 1;
  const auto res = run(d0, cfg, synthetic_lexicon());
  std::size_t rel = 0, irr = 0;
  for (const auto& d : res.final_corpus) (truth.relevant.contains(d.id) ? rel : irr)++;
  const double rel_frac = double(rel) / double(truth.relevant.size());
  const double irr_frac = double(irr) / double(truth.irrelevant.size());
  const bool is_nested = nested(res.records);
  const double secs = seconds_since(t0);
  std::string r;
  for (const auto& rec : res.records) r += (r.empty() ? "" : ",") + std::to_string(rec.topics.r());
  return {rel_frac >= 0.7 && irr_frac <= 0.1 && is_nested && secs < 120.0,
          std::to_string(d0.size()) + " docs, relevant kept " + fmt(rel_frac) + ", irrelevant kept " +
              fmt(irr_frac) + ", r " + r + ", nested " + (is_nested ? "yes" : "no") + ", " + fmt(secs, 3) +
              " s"};
}

Outcome ablation_degenerate() {
  SyntheticSpec spec;
  spec.relevant = 60;
  spec.irrelevant_hcp = 240;
  spec.irrelevant_public = 100;
  spec.decorate = false;
  spec.seed = 5;
  const auto d0 = preprocess_corpus(records_corpus(make_planted_corpus(spec).records), demo_preprocessor());
  std::set<std::string> vocab;
  std::size_t shortest = SIZE_MAX;
  for (const auto& d : d0) {
    vocab.insert(d.tokens.begin(), d.tokens.end());
    shortest = std::min(shortest, d.tokens.size());
  }
  Lexicon lexicon;
  for (const auto& w : vocab) {
    LexiconEntry e;
    e.trigger = {w};
    e.cui = "T" + w;
    lexicon.push_back(std::move(e));
  }
  PipelineConfig cfg;
  cfg.k = 8;
  cfg.lda.iterations = 200;
  const auto with = run(d0, cfg, lexicon);
  cfg.use_concepts = false;
  const auto without = run(d0, cfg, lexicon);
  bool same = with.records.size() == without.records.size() && with.halt == without.halt;
  for (std::size_t i = 0; same && i < with.records.size(); ++i) {
    same = with.records[i].retained_ids == without.records[i].retained_ids &&
           with.records[i].topics.relevant == without.records[i].topics.relevant;
  }
  return {same && shortest >= 4 && !with.records.empty(),
          std::to_string(vocab.size()) + "-token lexicon, shortest document " + std::to_string(shortest) +
              " tokens, " + std::to_string(with.records.size()) + " iterations, " + std::to_string(d0.size()) + " -> " +
              std::to_string(with.final_corpus.size()) + " documents, retained sets " +
              (same ? "identical" : "differ")};
}

Outcome window_slicing() {
  const auto t0 = Clock::now();
  SyntheticSpec spec;  // 10 weeks from 2020-03-01
  spec.seed = 7;
  auto truth = make_planted_corpus(spec);
  BurstSpec burst;
  burst.keywords = {"anosmia", "dysgeusia", "ageusia"};
  burst.start = parse_date("2020-04-19");
  burst.documents = 60;
  burst.public_documents = 60;
  add_burst(truth, burst, spec);
  const auto pp = demo_preprocessor();
  const auto d0 = preprocess_corpus(records_corpus(truth.records), pp);

  WindowSpec ws = WindowSpec::parse("14:7:2");
  const auto bounds = make_windows(d0, ws);
  bool exact = bounds.size() == 9;
  for (std::size_t i = 0; exact && i < bounds.size(); ++i) {
    const Day start = parse_date("2020-03-01") + std::chrono::days{7 * i};
    exact = bounds[i].start == start && bounds[i].end == start + std::chrono::days{14};
  }

  PipelineConfig cfg;
  cfg.k = 20;
  cfg.lda.seed = 1;
  const auto results = run_windows(d0, ws, cfg, synthetic_lexicon());
  std::set<std::string> keywords;
  for (const auto& k : burst.keywords)
    for (const auto& t : pp.tokenize(k)) keywords.insert(t);

  const Day burst_end = burst.start + std::chrono::days{burst.days};
  std::string found;
  for (const auto& w : results) {
    if (!(w.bounds.start <= burst.start && burst_end <= w.bounds.end) || !w.result) continue;
    const auto& records = w.result->records;
    auto last = std::find_if(records.rbegin(), records.rend(), [](const auto& r) { return r.applied; });
    if (last == records.rend()) continue;
    for (const auto& topic : last->model.top_words) {
      for (std::size_t j = 0; j < topic.size() && j < 10; ++j) {
        if (keywords.contains(topic[j].token) && found.empty())
          found = topic[j].token + " in window " + format_date(w.bounds.start);
      }
    }
  }
  const double secs = seconds_since(t0);
  return {exact && !found.empty(), std::to_string(bounds.size()) + " windows, boundaries " +
                                       (exact ? "exact" : "wrong") + ", burst keyword " +
                                       (found.empty() ? "absent" : found) + ", " + fmt(secs, 3) + " s"};
}

Outcome demo_determinism() {
  const fs::path data = CLINFILTER_DATA_DIR;
  const fs::path out = fs::temp_directory_path() / "clinfilter_acceptance";
  fs::remove_all(out);
  std::ostringstream sink;
  cli::RunArgs a;
  a.cfg.config = data / "demo" / "demo.conf";
  a.output_dir = out;
  a.run_name = "first";
  a.windows = "14:7:2";
  a.quiet = true;
  if (int code = cli::cmd_run(a, sink, sink); code != cli::kOk) return {false, "first run exited " + std::to_string(code)};
  cli::RunArgs replay;
  replay.manifest = out / "first" / "manifest.json";
  replay.output_dir = out;
  replay.run_name = "second";
  replay.quiet = true;
  if (int code = cli::cmd_run(replay, sink, sink); code != cli::kOk)
    return {false, "replay exited " + std::to_string(code)};

  auto tree = [](const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file() && e.path().filename() != "timings.json")
        files[fs::relative(e.path(), root).string()] = sha256_file(e.path());
    }
    return files;
  };
  const auto first = tree(out / "first"), second = tree(out / "second");
  std::size_t differing = 0;
  for (const auto& [name, digest] : first) differing += !second.contains(name) || second.at(name) != digest;
  differing += second.size() > first.size() ? second.size() - first.size() : 0;
  fs::remove_all(out);
  return {differing == 0 && !first.empty(),
          std::to_string(first.size()) + " files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"relevance score matches direct evaluation", relevance_oracle},
      {"iteration baseline case split", iteration_case_split},
      {"topic scores match brute force", score_oracle},
      {"threshold and document filter properties", threshold_properties},
      {"planted two-topic recovery", lda_recovery},
      {"umass coherence matches brute force", umass_oracle},
      {"planted-relevance end-to-end run", planted_run},
      {"concept ablation on an all-trigger corpus", ablation_degenerate},
      {"calendar windows and burst keyword", window_slicing},
      {"demo runs are byte-identical", demo_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
