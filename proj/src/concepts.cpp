#include "clinfilter/concepts.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace clinfilter {
namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    out.emplace_back(s.substr(pos, next == std::string_view::npos ? s.size() - pos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string strip(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string LexiconEntry::trigger_text() const { return join(trigger, " "); }

Lexicon parse_lexicon(std::string_view text, const Preprocessor* normalizer) {
  Lexicon lexicon;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() < 2)
      throw InputError("lexicon line " + std::to_string(lineno) + ": expected tab-separated columns");
    LexiconEntry e;
    if (normalizer) {
      e.trigger = normalizer->tokenize(cols[0]);
    } else {
      std::istringstream words(cols[0]);
      for (std::string w; words >> w;) e.trigger.push_back(w);
    }
    if (e.trigger.empty()) continue;
    e.cui = strip(cols[1]);
    if (e.cui.empty()) throw InputError("lexicon line " + std::to_string(lineno) + ": empty cui");
    if (cols.size() > 2) e.preferred_name = strip(cols[2]);
    if (cols.size() > 3) {
      for (auto& st : split(cols[3], ';')) {
        std::string s = strip(st);
        if (!s.empty()) e.semantic_types.push_back(std::move(s));
      }
    }
    lexicon.push_back(std::move(e));
  }
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path, const Preprocessor* normalizer) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read lexicon: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_lexicon(ss.str(), normalizer);
}

Matcher Matcher::build(Lexicon lexicon) {
  Matcher m;
  m.nodes_.emplace_back();
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    const auto& entry = lexicon[i];
    if (entry.trigger.empty()) throw std::invalid_argument("lexicon entry with empty trigger");
    std::string text = entry.trigger_text();
    if (!seen.emplace(text, entry.cui).second)
      throw std::invalid_argument("duplicate lexicon entry: '" + text + "' / " + entry.cui);

    std::uint32_t node = 0;
    for (const auto& tok : entry.trigger) {
      auto [tid_it, _] = m.token_ids_.try_emplace(tok, static_cast<std::uint32_t>(m.token_ids_.size()));
      const std::uint32_t tid = tid_it->second;
      auto child = m.nodes_[node].children.find(tid);
      if (child == m.nodes_[node].children.end()) {
        auto next = static_cast<std::uint32_t>(m.nodes_.size());
        m.nodes_[node].children.emplace(tid, next);
        m.nodes_.emplace_back();
        node = next;
      } else {
        node = child->second;
      }
    }
    if (m.nodes_[node].phrase < 0) {
      auto pid = static_cast<std::uint32_t>(m.phrases_.size());
      m.nodes_[node].phrase = pid;
      m.phrases_.push_back(text);
      m.phrase_lengths_.push_back(entry.trigger.size());
      m.phrase_entries_.emplace_back();
      m.phrase_index_.emplace(text, pid);
    }
    m.phrase_entries_[static_cast<std::size_t>(m.nodes_[node].phrase)].push_back(i);
  }
  m.lexicon_ = std::move(lexicon);
  return m;
}

std::vector<ConceptMention> Matcher::match(std::span<const std::string> tokens) const {
  std::vector<ConceptMention> out;
  if (phrases_.empty()) return out;
  std::vector<std::int64_t> ids(tokens.size(), -1);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (auto it = token_ids_.find(tokens[i]); it != token_ids_.end()) ids[i] = it->second;
  }
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::uint32_t node = 0;
    std::int64_t best_phrase = -1;
    std::size_t best_end = i;
    for (std::size_t j = i; j < tokens.size() && ids[j] >= 0; ++j) {
      auto child = nodes_[node].children.find(static_cast<std::uint32_t>(ids[j]));
      if (child == nodes_[node].children.end()) break;
      node = child->second;
      if (nodes_[node].phrase >= 0) {
        best_phrase = nodes_[node].phrase;
        best_end = j + 1;
      }
    }
    if (best_phrase >= 0) {
      out.push_back({static_cast<std::uint32_t>(best_phrase), static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>(best_end)});
      i = best_end;
    } else {
      ++i;
    }
  }
  return out;
}

std::optional<std::uint32_t> Matcher::find_phrase(std::string_view trigger) const {
  if (auto it = phrase_index_.find(std::string(trigger)); it != phrase_index_.end())
    return it->second;
  return std::nullopt;
}

std::vector<ConceptMention> annotate_tokens(std::span<const std::string> tokens,
                                            const Matcher& matcher) {
  if (tokens.size() < kMinAnnotatedTokens) return {};
  return matcher.match(tokens);
}

Document annotate(Document doc, const Matcher& matcher) {
  doc.concepts = annotate_tokens(doc.tokens, matcher);
  return doc;
}

Corpus annotate_corpus(Corpus corpus, const Matcher& matcher) {
  std::vector<std::vector<ConceptMention>> mentions(corpus.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(dynamic, 128)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto idx = static_cast<std::size_t>(i);
    mentions[idx] = annotate_tokens(corpus[idx].tokens, matcher);
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) corpus.set_concepts(i, std::move(mentions[i]));
  return corpus;
}

std::vector<PhraseCount> count_triggers(const Corpus& corpus, const Matcher& matcher) {
  const std::size_t p = matcher.phrase_count();
  std::vector<PhraseCount> total(p);
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel
  {
    std::vector<PhraseCount> local(p);
    std::vector<std::uint32_t> last_doc(p, 0);
#pragma omp for schedule(dynamic, 256) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto stamp = static_cast<std::uint32_t>(i) + 1;
      for (const auto& m : matcher.match(corpus[static_cast<std::size_t>(i)].tokens)) {
        auto& c = local[m.phrase];
        ++c.occurrences;
        if (last_doc[m.phrase] != stamp) {
          ++c.documents;
          last_doc[m.phrase] = stamp;
        }
      }
    }
#pragma omp critical(count_triggers_merge)
    for (std::size_t k = 0; k < p; ++k) {
      total[k].occurrences += local[k].occurrences;
      total[k].documents += local[k].documents;
    }
  }
  return total;
}

std::unordered_map<std::string, PhraseCount> count_triggers_by_phrase(const Corpus& corpus,
                                                                       const Matcher& matcher) {
  auto counts = count_triggers(corpus, matcher);
  std::unordered_map<std::string, PhraseCount> out;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k].occurrences > 0) out.emplace(matcher.phrase(static_cast<std::uint32_t>(k)), counts[k]);
  }
  return out;
}

}  // namespace clinfilter
