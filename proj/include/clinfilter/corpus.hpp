#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "clinfilter/common.hpp"
#include "clinfilter/text.hpp"

namespace clinfilter {

struct AuthorInfo {
  std::string name;
  std::string handle;
  std::string bio;
};

struct RawRecord {
  std::string id;
  std::string text;
  AuthorInfo author;
  Timestamp created_at{};
  std::optional<std::string> thread_id;
};

// A matched trigger phrase; `phrase` indexes into the Matcher that produced
// it. Tokens [begin, end) of the document equal the phrase tokens.
struct ConceptMention {
  std::uint32_t phrase = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  bool operator==(const ConceptMention&) const = default;
};

struct Document {
  std::string id;
  std::vector<std::string> tokens;
  std::string raw_text;
  AuthorInfo author;
  Timestamp created_at{};
  std::optional<std::string> thread_id;
  std::vector<ConceptMention> concepts;
};

class Vocabulary {
 public:
  std::uint32_t add(std::string_view token);
  std::optional<std::uint32_t> find(std::string_view token) const;
  const std::string& token(std::uint32_t id) const { return tokens_[id]; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
  std::vector<std::string> tokens_;
};

// Ordered documents with unique ids. The vocabulary covers exactly the
// tokens present, with ids in first-appearance order.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::string label, std::vector<Document> documents);

  const std::string& label() const { return label_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  const Document& operator[](std::size_t i) const { return documents_[i]; }
  const std::vector<Document>& documents() const { return documents_; }
  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }

  const Vocabulary& vocab() const { return vocab_; }
  std::optional<std::size_t> index_of(std::string_view id) const;
  bool contains(std::string_view id) const { return index_of(id).has_value(); }

  // Token ids of document i under this corpus' vocabulary.
  std::vector<std::uint32_t> word_ids(std::size_t i) const;

  void set_concepts(std::size_t i, std::vector<ConceptMention> concepts);
  void set_label(std::string label) { label_ = std::move(label); }

  std::vector<std::string> ids() const;

 private:
  std::string label_;
  std::vector<Document> documents_;
  Vocabulary vocab_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct IngestResult {
  Corpus corpus;  // documents carry raw text only
  std::size_t lines = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;  // first few malformed-line reasons
};

// Line-delimited JSON records: id, text, user_name, user_handle, user_bio,
// created_at, thread_id (optional). Malformed lines and duplicate ids are
// skipped and counted. Throws InputError when the file cannot be read.
IngestResult ingest(const std::filesystem::path& path, std::string label = "D0");
IngestResult ingest_lines(std::span<const std::string> lines, std::string label = "D0");

// Parses one record line; returns nullopt and sets `reason` when malformed.
std::optional<RawRecord> parse_record(std::string_view line, std::string* reason = nullptr);

Document to_document(RawRecord record);

// Concatenates records sharing a thread id (chronological order) into one
// document placed at the thread's first appearance. Documents without a
// thread id pass through.
Corpus group_threads(const Corpus& corpus);

Document preprocess(const RawRecord& record, const Preprocessor& preprocessor);
Document preprocess(const RawRecord& record, const std::unordered_set<std::string>& stopwords,
                    const std::unordered_set<std::string>& query_terms,
                    const Lemmatizer& lemmatizer);

// Tokenizes every document (parallel, order preserved).
Corpus preprocess_corpus(const Corpus& corpus, const Preprocessor& preprocessor);

// Documents whose id is in `ids`, in original order. Unknown ids throw
// std::invalid_argument.
Corpus subset(const Corpus& corpus, const std::unordered_set<std::string>& ids,
              std::string label = {});
Corpus subset(const Corpus& corpus, std::span<const std::size_t> indices, std::string label = {});

}  // namespace clinfilter
