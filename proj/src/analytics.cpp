#include "clinfilter/analytics.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "clinfilter/ngrams.hpp"

namespace clinfilter {
namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.emplace_back(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string> split_phrase(const std::string& phrase) {
  std::vector<std::string> out;
  std::istringstream in(phrase);
  for (std::string tok; in >> tok;) out.push_back(std::move(tok));
  return out;
}

bool contains_run(const std::vector<std::string>& tokens, const std::vector<std::string>& run) {
  if (run.empty() || run.size() > tokens.size()) return false;
  return std::search(tokens.begin(), tokens.end(), run.begin(), run.end()) != tokens.end();
}

}  // namespace

double concept_fraction(const TopicModel& model, const Matcher& matcher, int top_n) {
  std::size_t total = 0;
  std::size_t hits = 0;
  for (const auto& words : model.top_words) {
    const std::size_t n = std::min(words.size(), static_cast<std::size_t>(std::max(top_n, 0)));
    for (std::size_t j = 0; j < n; ++j) {
      ++total;
      auto id = matcher.find_phrase(words[j].token);
      if (id && matcher.phrase_length(*id) == 1) ++hits;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

EnrichmentTable enrichment_table(const Corpus& filtered, const Corpus& reference,
                                 const EnrichmentOptions& options) {
  if (options.max_n < 1) throw std::invalid_argument("enrichment: max_n must be >= 1");
  for (const auto& doc : filtered) {
    if (!reference.contains(doc.id))
      throw std::invalid_argument("enrichment: document '" + doc.id + "' is not in the reference corpus");
  }
  const auto fa = count_ngrams(filtered, 1, options.max_n);
  const auto fb = count_ngrams(reference, 1, options.max_n);

  EnrichmentTable table;
  for (const auto& [phrase, cb] : fb) {
    if (cb.occurrences < options.min_count) continue;
    EnrichmentRow row;
    row.phrase = phrase;
    row.n = static_cast<int>(std::count(phrase.begin(), phrase.end(), ' ')) + 1;
    row.f_reference = cb.occurrences;
    auto it = fa.find(phrase);
    row.f_filtered = it == fa.end() ? 0 : it->second.occurrences;
    row.rel = relevance_score(row.f_filtered, row.f_reference, filtered.size(), reference.size(),
                              options.epsilon);
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const auto& x, const auto& y) {
    if (x.rel != y.rel) return x.rel > y.rel;
    return x.phrase < y.phrase;
  });
  const std::size_t n = std::min(options.top_n, table.rows.size());
  table.top.assign(table.rows.begin(), table.rows.begin() + static_cast<std::ptrdiff_t>(n));
  table.bottom.assign(table.rows.rbegin(), table.rows.rbegin() + static_cast<std::ptrdiff_t>(n));
  return table;
}

std::string_view to_string(Expected expected) {
  return expected == Expected::relevant ? "relevant" : "irrelevant";
}

void CategorySpec::validate() const {
  if (name.empty()) throw ConfigError("category without a name");
  std::unordered_set<std::string> distinct(keywords.begin(), keywords.end());
  if (distinct.size() < 2)
    throw ConfigError("category '" + name + "' needs at least two distinct keywords");
}

std::vector<CategorySpec> parse_categories(std::string_view text, const Preprocessor* normalizer) {
  std::vector<CategorySpec> out;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw ConfigError("categories line " + std::to_string(lineno) + ": expected 3 tab-separated fields");
    CategorySpec spec;
    spec.name = trim(fields[0]);
    const std::string expected = trim(fields[1]);
    if (expected == "relevant") {
      spec.expected = Expected::relevant;
    } else if (expected == "irrelevant") {
      spec.expected = Expected::irrelevant;
    } else {
      throw ConfigError("categories line " + std::to_string(lineno) + ": unknown class '" + expected + "'");
    }
    for (const auto& kw : split(fields[2], ';')) {
      std::string phrase = trim(kw);
      if (phrase.empty()) continue;
      if (normalizer) phrase = join(normalizer->tokenize(phrase), " ");
      if (phrase.empty()) continue;
      if (std::find(spec.keywords.begin(), spec.keywords.end(), phrase) == spec.keywords.end())
        spec.keywords.push_back(std::move(phrase));
    }
    spec.validate();
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<CategorySpec> load_categories(const std::filesystem::path& path,
                                          const Preprocessor* normalizer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read categories file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_categories(ss.str(), normalizer);
}

bool in_category(const Document& doc, const CategorySpec& category) {
  int found = 0;
  for (const auto& kw : category.keywords) {
    if (contains_run(doc.tokens, split_phrase(kw)) && ++found >= 2) return true;
  }
  return false;
}

CategoryReport category_preservation(std::span<const IterationRecord> records, const Corpus& d1,
                                     std::span<const CategorySpec> categories) {
  CategoryReport report;
  std::vector<std::unordered_set<std::string>> retained;
  for (const auto& rec : records) {
    if (!rec.applied) continue;
    report.iterations.push_back(rec.iteration);
    retained.emplace_back(rec.retained_ids.begin(), rec.retained_ids.end());
  }
  const std::size_t cols = retained.size();

  // members[c] holds D1 document ids in category c.
  std::vector<std::vector<std::string>> members(categories.size());
  const auto nc = static_cast<std::ptrdiff_t>(categories.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < nc; ++c) {
    for (const auto& doc : d1) {
      if (in_category(doc, categories[static_cast<std::size_t>(c)])) members[static_cast<std::size_t>(c)].push_back(doc.id);
    }
  }

  std::vector<std::size_t> pool_total(2, 0);
  std::vector<std::vector<std::size_t>> pool_kept(2, std::vector<std::size_t>(cols, 0));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    CategoryRetention row;
    row.name = categories[c].name;
    row.expected = categories[c].expected;
    row.members = members[c].size();
    const std::size_t cls = row.expected == Expected::relevant ? 0 : 1;
    pool_total[cls] += row.members;
    for (std::size_t j = 0; j < cols; ++j) {
      std::size_t kept = 0;
      for (const auto& id : members[c]) kept += retained[j].count(id);
      pool_kept[cls][j] += kept;
      if (row.members == 0) {
        row.fractions.push_back(std::nullopt);
      } else {
        row.fractions.push_back(static_cast<double>(kept) / static_cast<double>(row.members));
      }
    }
    report.categories.push_back(std::move(row));
  }
  for (std::size_t cls = 0; cls < 2; ++cls) {
    auto& agg = cls == 0 ? report.relevant_aggregate : report.irrelevant_aggregate;
    for (std::size_t j = 0; j < cols; ++j) {
      if (pool_total[cls] == 0) {
        agg.push_back(std::nullopt);
      } else {
        agg.push_back(static_cast<double>(pool_kept[cls][j]) / static_cast<double>(pool_total[cls]));
      }
    }
  }
  return report;
}

KeywordPattern parse_keyword_pattern(std::string_view text) {
  KeywordPattern p;
  auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    p.regex = trim(text);
    p.name = p.regex;
  } else {
    p.name = trim(text.substr(0, eq));
    p.regex = trim(text.substr(eq + 1));
  }
  if (p.regex.empty()) throw ConfigError("empty keyword pattern");
  if (p.name.empty()) p.name = p.regex;
  return p;
}

KeywordTimeline keyword_timeline(const Corpus& corpus, std::span<const WindowResult> windows,
                                 const KeywordPattern& pattern) {
  std::regex re;
  try {
    re = std::regex(pattern.regex, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid keyword pattern '" + pattern.regex + "': " + e.what());
  }
  auto matches = [&re](const std::string& token) { return std::regex_match(token, re); };

  KeywordTimeline out;
  out.pattern = pattern;

  out.window_hits.assign(windows.size(), false);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& result = windows[w].result;
    if (!result || result->records.empty()) continue;
    const auto& rec = result->records.back();
    for (std::size_t t : rec.topics.relevant) {
      const auto& words = rec.model.top_words[t];
      const std::size_t n = std::min<std::size_t>(words.size(), kTimelineTopWords);
      for (std::size_t j = 0; j < n && !out.window_hits[w]; ++j) out.window_hits[w] = matches(words[j].token);
      if (out.window_hits[w]) break;
    }
    if (out.window_hits[w] && !out.first_hit_window) out.first_hit_window = w;
  }

  if (corpus.empty()) return out;
  const Vocabulary& vocab = corpus.vocab();
  std::vector<char> type_match(vocab.size());
  for (std::size_t v = 0; v < vocab.size(); ++v) type_match[v] = matches(vocab.token(static_cast<std::uint32_t>(v)));

  std::map<Day, std::size_t> daily;
  Day first_day = floor_day(corpus[0].created_at);
  Day last_day = first_day;
  for (std::size_t m = 0; m < corpus.size(); ++m) {
    const Day d = floor_day(corpus[m].created_at);
    first_day = std::min(first_day, d);
    last_day = std::max(last_day, d);
    const auto ids = corpus.word_ids(m);
    if (std::any_of(ids.begin(), ids.end(), [&](std::uint32_t v) { return type_match[v] != 0; })) {
      ++daily[d];
      ++out.total_matches;
    }
  }
  if (out.total_matches == 0) return out;
  out.first_mention = daily.begin()->first;

  std::deque<std::size_t> last_week;
  std::size_t running = 0;
  for (Day d = first_day; d <= last_day; d += std::chrono::days{1}) {
    TimelinePoint p;
    p.date = d;
    auto it = daily.find(d);
    p.tweet_count = it == daily.end() ? 0 : it->second;
    last_week.push_back(p.tweet_count);
    running += p.tweet_count;
    if (last_week.size() > static_cast<std::size_t>(kMovingAverageDays)) {
      running -= last_week.front();
      last_week.pop_front();
    }
    p.moving_avg = static_cast<double>(running) / kMovingAverageDays;
    for (std::size_t w = 0; w < windows.size(); ++w) {
      if (out.window_hits[w] && d >= windows[w].bounds.start && d < windows[w].bounds.end) {
        p.in_topic_model = true;
        break;
      }
    }
    out.points.push_back(p);
  }
  return out;
}

}  // namespace clinfilter
