#include "clinfilter/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <unordered_set>

#include "clinfilter/ngrams.hpp"

namespace clinfilter {
namespace {

std::uint64_t pick(const PhraseCount& c, CountMode mode) {
  return mode == CountMode::occurrences ? c.occurrences : c.documents;
}

// f_X(c) for every evidence phrase: concept triggers, or single tokens when
// concepts are disabled.
CorpusCounts evidence_counts(const Corpus& corpus, const PipelineConfig& config,
                             const Matcher& matcher, std::string label) {
  CorpusCounts out;
  out.label = std::move(label);
  out.size = corpus.size();
  auto counts = config.use_concepts ? count_triggers_by_phrase(corpus, matcher)
                                    : count_ngrams(corpus, 1, 1);
  out.counts.reserve(counts.size());
  for (const auto& [phrase, c] : counts) out.counts.emplace(phrase, pick(c, config.count_mode));
  return out;
}

// C(m) per document, with pre-filtered phrases removed.
std::vector<std::vector<std::string>> evidence_items(
    const Corpus& corpus, const PipelineConfig& config, const Matcher& matcher,
    const std::function<bool(const std::string&)>& keep) {
  std::vector<std::vector<std::string>> items(corpus.size());
  for (std::size_t m = 0; m < corpus.size(); ++m) {
    const Document& doc = corpus[m];
    if (config.use_concepts) {
      for (const auto& mention : doc.concepts) {
        const auto& phrase = matcher.phrase(mention.phrase);
        if (keep(phrase)) items[m].push_back(phrase);
      }
    } else {
      for (const auto& tok : doc.tokens) {
        if (keep(tok)) items[m].push_back(tok);
      }
    }
  }
  return items;
}

std::string stage_label(int i) { return "D" + std::to_string(i); }

}  // namespace

void PipelineConfig::validate() const {
  if (k < 2) throw ConfigError("k must be >= 2");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must be in [0, 1]");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(stop_growth_factor > 0.0)) throw ConfigError("stop_growth_factor must be positive");
  if (patterns.empty()) throw ConfigError("at least one credential pattern is required");
  LdaConfig l = lda;
  l.k = k;
  try {
    l.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string_view to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::completed: return "completed";
    case HaltReason::topic_growth: return "topic_growth";
    case HaltReason::corpus_too_small: return "corpus_too_small";
    case HaltReason::no_hcp_documents: return "no_hcp_documents";
  }
  return "unknown";
}

std::uint64_t iteration_seed(std::uint64_t base, std::uint64_t stream, int iteration) {
  if (stream == 0) return mix_seed(base, static_cast<std::uint64_t>(iteration));
  return mix_seed(mix_seed(base, 1000003ULL * stream), static_cast<std::uint64_t>(iteration));
}

RelevanceTable baseline_relevance(const Corpus& d0, const PipelineConfig& config,
                                  const Lexicon& lexicon) {
  config.validate();
  Matcher matcher = Matcher::build(lexicon);
  auto d1 = filter_hcp(d0, config.patterns, "D1").corpus;
  auto c0 = evidence_counts(d0, config, matcher, "D0");
  auto c1 = evidence_counts(d1, config, matcher, "D1");
  return iterative_relevance(1, &c0, c1, nullptr, config.epsilon);
}

PipelineResult run(const Corpus& d0, const PipelineConfig& config, const Lexicon& lexicon,
                   const RunOptions& options) {
  config.validate();
  if (d0.empty()) throw std::invalid_argument("run: D0 is empty");

  PipelineResult res;
  res.d0_size = d0.size();
  auto filtered = filter_hcp(d0, config.patterns, "D1");
  res.pattern_counts = std::move(filtered.pattern_counts);
  const Matcher matcher = Matcher::build(lexicon);
  res.d1 = annotate_corpus(std::move(filtered.corpus), matcher);

  if (res.d1.empty()) {
    res.halt = HaltReason::no_hcp_documents;
    res.notices.push_back("no document matched a credential pattern");
    res.final_corpus = res.d1;
    return res;
  }

  const CorpusCounts c1 = evidence_counts(res.d1, config, matcher, "D1");
  if (options.baseline) {
    res.baseline = *options.baseline;
  } else {
    const CorpusCounts c0 = evidence_counts(d0, config, matcher, "D0");
    if (c0.size == c1.size)
      res.notices.push_back("every D0 document is HCP-authored; baseline complement is empty");
    res.baseline = iterative_relevance(1, &c0, c1, nullptr, config.epsilon);
  }

  const RelevanceTable& baseline = res.baseline;
  auto keep = [&baseline](const std::string& phrase) { return !(baseline.get(phrase) < 1.0); };
  if (config.use_concepts) {
    res.evidence_kept = prefilter_concepts(lexicon, baseline).size();
    res.evidence_dropped = lexicon.size() - res.evidence_kept;
  } else {
    for (const auto& tok : res.d1.vocab().tokens()) ++(keep(tok) ? res.evidence_kept : res.evidence_dropped);
  }

  Corpus current = res.d1;
  std::size_t prev_r = 0;
  for (int i = 1; i <= config.max_iterations; ++i) {
    if (current.size() < static_cast<std::size_t>(config.k)) {
      res.halt = HaltReason::corpus_too_small;
      res.notices.push_back(stage_label(i) + " has " + std::to_string(current.size()) +
                            " documents, fewer than k=" + std::to_string(config.k) +
                            "; stopping early");
      break;
    }
    IterationRecord rec;
    rec.iteration = i;
    rec.corpus_size = current.size();
    rec.seed = iteration_seed(config.lda.seed, options.seed_stream, i);

    LdaConfig lda = config.lda;
    lda.k = config.k;
    lda.seed = rec.seed;
    rec.model = fit(current, lda);
    for (const auto& w : rec.model.warnings) res.notices.push_back("iteration " + std::to_string(i) + ": " + w);

    if (i == 1) {
      rec.relevance = baseline;
    } else {
      const CorpusCounts ci = evidence_counts(current, config, matcher, stage_label(i));
      rec.relevance = iterative_relevance(i, nullptr, c1, &ci, config.epsilon);
    }

    const auto items = evidence_items(current, config, matcher, keep);
    const auto weights = evidence_weights(items, rec.relevance);
    rec.topics = threshold_topics(score_topics(rec.model.theta, weights), config.tau);
    if (rec.topics.all_equal)
      res.notices.push_back("iteration " + std::to_string(i) + ": all topic scores equal; every topic kept");
    if (std::find(rec.topics.zero_mass.begin(), rec.topics.zero_mass.end(), true) != rec.topics.zero_mass.end())
      res.notices.push_back("iteration " + std::to_string(i) + ": topic with zero document mass scored 0");

    const auto retained = filter_documents(rec.model.theta, rec.topics, static_cast<std::size_t>(config.k));
    rec.retained_ids.reserve(retained.size());
    for (std::size_t m : retained) rec.retained_ids.push_back(current[m].id);

    const std::size_t r = rec.topics.r();
    if (i > 1 && static_cast<double>(r) > config.stop_growth_factor * static_cast<double>(prev_r)) {
      rec.applied = false;
      res.halt = HaltReason::topic_growth;
      res.notices.push_back("iteration " + std::to_string(i) + ": relevant topics grew from " +
                            std::to_string(prev_r) + " to " + std::to_string(r) +
                            "; keeping " + current.label());
      res.records.push_back(std::move(rec));
      break;
    }
    Corpus next = subset(current, retained, stage_label(i + 1));
    res.records.push_back(std::move(rec));
    current = std::move(next);
    prev_r = r;
  }
  res.final_corpus = std::move(current);
  return res;
}

void WindowSpec::validate() const {
  if (length_days < 1) throw ConfigError("window length must be >= 1 day");
  if (stride_days < 1) throw ConfigError("window stride must be >= 1 day");
  if (stride_days > length_days) throw ConfigError("window stride must not exceed its length");
  if (rounds < 1) throw ConfigError("window rounds must be >= 1");
}

WindowSpec WindowSpec::parse(std::string_view text) {
  WindowSpec spec;
  std::vector<int> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t colon = text.find(':', pos);
    if (colon == std::string_view::npos) colon = text.size();
    std::string item(text.substr(pos, colon - pos));
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("invalid window spec '" + std::string(text) + "', expected LENGTH:STRIDE[:ROUNDS]");
    }
    pos = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3)
    throw ConfigError("invalid window spec '" + std::string(text) + "', expected LENGTH:STRIDE[:ROUNDS]");
  spec.length_days = parts[0];
  spec.stride_days = parts[1];
  if (parts.size() == 3) spec.rounds = parts[2];
  spec.validate();
  return spec;
}

std::vector<WindowBounds> make_windows(const Corpus& corpus, const WindowSpec& spec) {
  spec.validate();
  if (corpus.empty()) return {};
  auto [lo, hi] = std::minmax_element(corpus.begin(), corpus.end(), [](const Document& a, const Document& b) {
    return a.created_at < b.created_at;
  });
  const Day start = spec.start.value_or(floor_day(lo->created_at));
  const Day last = floor_day(hi->created_at);
  const long span = (last - start).count() + 1;
  if (span <= 0) return {};
  const long extra = span - spec.length_days;
  const long count = 1 + (extra > 0 ? (extra + spec.stride_days - 1) / spec.stride_days : 0);
  std::vector<WindowBounds> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long w = 0; w < count; ++w) {
    const Day s = start + std::chrono::days{w * spec.stride_days};
    out.push_back({s, s + std::chrono::days{spec.length_days}});
  }
  return out;
}

std::vector<WindowResult> run_windows(const Corpus& d0, const WindowSpec& spec,
                                      const PipelineConfig& config, const Lexicon& lexicon) {
  config.validate();
  const auto bounds = make_windows(d0, spec);

  std::vector<Corpus> slices;
  slices.reserve(bounds.size());
  for (const auto& b : bounds) {
    std::vector<std::size_t> idx;
    for (std::size_t m = 0; m < d0.size(); ++m) {
      if (b.contains(d0[m].created_at)) idx.push_back(m);
    }
    slices.push_back(subset(d0, idx, "D0"));
  }

  std::optional<RelevanceTable> global;
  if (spec.global_baseline) global = baseline_relevance(d0, config, lexicon);

  PipelineConfig window_config = config;
  window_config.max_iterations = spec.rounds;

  std::vector<WindowResult> results(bounds.size());
  const auto n = static_cast<std::ptrdiff_t>(bounds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t wi = 0; wi < n; ++wi) {
    const auto w = static_cast<std::size_t>(wi);
    WindowResult& out = results[w];
    out.index = w;
    out.bounds = bounds[w];
    out.documents = slices[w].size();
    if (slices[w].empty()) {
      out.notice = "window " + format_date(bounds[w].start) + " has no documents; skipped";
      continue;
    }
    RunOptions opts;
    opts.seed_stream = w + 1;
    if (global) opts.baseline = &*global;
    try {
      out.result = run(slices[w], window_config, lexicon, opts);
    } catch (const std::exception& e) {
      out.notice = "window " + format_date(bounds[w].start) + " failed: " + e.what();
    }
  }
  return results;
}

}  // namespace clinfilter
