#include "clinfilter/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "json.hpp"

namespace clinfilter {
namespace {

constexpr std::size_t kMaxWarnings = 20;

std::optional<std::string> string_field(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  if (it->is_number_unsigned()) return std::to_string(it->get<unsigned long long>());
  return std::nullopt;
}

}  // namespace

std::uint32_t Vocabulary::add(std::string_view token) {
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(tokens_.size());
  tokens_.emplace_back(token);
  ids_.emplace(tokens_.back(), id);
  return id;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view token) const {
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  return std::nullopt;
}

Corpus::Corpus(std::string label, std::vector<Document> documents)
    : label_(std::move(label)), documents_(std::move(documents)) {
  index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const auto& doc = documents_[i];
    if (doc.id.empty()) throw std::invalid_argument("document with empty id");
    if (!index_.emplace(doc.id, i).second)
      throw std::invalid_argument("duplicate document id: " + doc.id);
    for (const auto& t : doc.tokens) vocab_.add(t);
  }
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  if (auto it = index_.find(std::string(id)); it != index_.end()) return it->second;
  return std::nullopt;
}

std::vector<std::uint32_t> Corpus::word_ids(std::size_t i) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(documents_[i].tokens.size());
  for (const auto& t : documents_[i].tokens) ids.push_back(*vocab_.find(t));
  return ids;
}

void Corpus::set_concepts(std::size_t i, std::vector<ConceptMention> concepts) {
  documents_.at(i).concepts = std::move(concepts);
}

std::vector<std::string> Corpus::ids() const {
  std::vector<std::string> out;
  out.reserve(documents_.size());
  for (const auto& d : documents_) out.push_back(d.id);
  return out;
}

std::optional<RawRecord> parse_record(std::string_view line, std::string* reason) {
  auto fail = [&](std::string why) -> std::optional<RawRecord> {
    if (reason) *reason = std::move(why);
    return std::nullopt;
  };
  nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
  if (obj.is_discarded()) return fail("not valid JSON");
  if (!obj.is_object()) return fail("not a JSON object");

  RawRecord rec;
  auto id = string_field(obj, "id");
  if (!id || id->empty()) return fail("missing id");
  rec.id = std::move(*id);

  auto text = obj.find("text");
  if (text == obj.end() || !(text->is_string() || text->is_null())) return fail("missing text");
  if (text->is_string()) rec.text = text->get<std::string>();

  auto created = string_field(obj, "created_at");
  if (!created) return fail("missing created_at");
  auto ts = try_parse_iso8601(*created);
  if (!ts) return fail("unparseable created_at '" + *created + "'");
  rec.created_at = *ts;

  rec.author.name = string_field(obj, "user_name").value_or("");
  rec.author.handle = string_field(obj, "user_handle").value_or("");
  rec.author.bio = string_field(obj, "user_bio").value_or("");
  if (auto thread = string_field(obj, "thread_id"); thread && !thread->empty())
    rec.thread_id = std::move(*thread);
  return rec;
}

Document to_document(RawRecord record) {
  Document doc;
  doc.id = std::move(record.id);
  doc.raw_text = std::move(record.text);
  doc.author = std::move(record.author);
  doc.created_at = record.created_at;
  doc.thread_id = std::move(record.thread_id);
  return doc;
}

IngestResult ingest_lines(std::span<const std::string> lines, std::string label) {
  const auto n = static_cast<std::ptrdiff_t>(lines.size());
  std::vector<std::optional<RawRecord>> parsed(lines.size());
  std::vector<std::string> reasons(lines.size());

#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& line = lines[static_cast<std::size_t>(i)];
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    parsed[static_cast<std::size_t>(i)] = parse_record(line, &reasons[static_cast<std::size_t>(i)]);
  }

  IngestResult result;
  result.lines = lines.size();
  std::vector<Document> docs;
  docs.reserve(lines.size());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!parsed[i]) {
      if (reasons[i].empty()) continue;  // blank line
      ++result.skipped;
      if (result.warnings.size() < kMaxWarnings)
        result.warnings.push_back("line " + std::to_string(i + 1) + ": " + reasons[i]);
      continue;
    }
    if (!seen.insert(parsed[i]->id).second) {
      ++result.skipped;
      if (result.warnings.size() < kMaxWarnings)
        result.warnings.push_back("line " + std::to_string(i + 1) + ": duplicate id " +
                                  parsed[i]->id);
      continue;
    }
    docs.push_back(to_document(std::move(*parsed[i])));
  }
  result.corpus = Corpus(std::move(label), std::move(docs));
  return result;
}

IngestResult ingest(const std::filesystem::path& path, std::string label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read input file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  if (in.bad()) throw InputError("read error on input file: " + path.string());
  return ingest_lines(lines, std::move(label));
}

Corpus group_threads(const Corpus& corpus) {
  std::map<std::string, std::vector<std::size_t>> threads;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].thread_id) threads[*corpus[i].thread_id].push_back(i);
  }
  std::vector<Document> out;
  std::unordered_set<std::string> emitted;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Document& doc = corpus[i];
    if (!doc.thread_id) {
      out.push_back(doc);
      continue;
    }
    if (!emitted.insert(*doc.thread_id).second) continue;
    auto members = threads[*doc.thread_id];
    std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return corpus[a].created_at < corpus[b].created_at;
    });
    Document merged = corpus[members.front()];
    merged.concepts.clear();
    for (std::size_t j = 1; j < members.size(); ++j) {
      const Document& next = corpus[members[j]];
      merged.raw_text += "\n";
      merged.raw_text += next.raw_text;
      merged.tokens.insert(merged.tokens.end(), next.tokens.begin(), next.tokens.end());
    }
    out.push_back(std::move(merged));
  }
  return Corpus(corpus.label(), std::move(out));
}

Document preprocess(const RawRecord& record, const Preprocessor& preprocessor) {
  Document doc = to_document(record);
  doc.tokens = preprocessor.tokenize(doc.raw_text);
  return doc;
}

Document preprocess(const RawRecord& record, const std::unordered_set<std::string>& stopwords,
                    const std::unordered_set<std::string>& query_terms,
                    const Lemmatizer& lemmatizer) {
  PreprocessOptions opts;
  opts.stopwords = stopwords;
  opts.query_terms = query_terms;
  return preprocess(record, Preprocessor(std::move(opts), lemmatizer));
}

Corpus preprocess_corpus(const Corpus& corpus, const Preprocessor& preprocessor) {
  std::vector<Document> docs(corpus.documents());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& doc = docs[static_cast<std::size_t>(i)];
    doc.tokens = preprocessor.tokenize(doc.raw_text);
    doc.concepts.clear();
  }
  return Corpus(corpus.label(), std::move(docs));
}

Corpus subset(const Corpus& corpus, const std::unordered_set<std::string>& ids,
              std::string label) {
  for (const auto& id : ids) {
    if (!corpus.contains(id))
      throw std::invalid_argument("subset: unknown document id '" + id + "' in " + corpus.label());
  }
  std::vector<Document> docs;
  docs.reserve(ids.size());
  for (const auto& doc : corpus) {
    if (ids.contains(doc.id)) docs.push_back(doc);
  }
  return Corpus(label.empty() ? corpus.label() : std::move(label), std::move(docs));
}

Corpus subset(const Corpus& corpus, std::span<const std::size_t> indices, std::string label) {
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Document> docs;
  docs.reserve(sorted.size());
  for (std::size_t i : sorted) {
    if (i >= corpus.size())
      throw std::invalid_argument("subset: document index out of range in " + corpus.label());
    docs.push_back(corpus[i]);
  }
  return Corpus(label.empty() ? corpus.label() : std::move(label), std::move(docs));
}

}  // namespace clinfilter
