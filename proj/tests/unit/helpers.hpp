#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "clinfilter/concepts.hpp"
#include "clinfilter/corpus.hpp"
#include "clinfilter/io.hpp"

namespace testing {

using namespace clinfilter;

inline std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline Document doc(std::string id, std::string_view tokens, std::string bio = {},
                    std::string_view when = "2020-03-01T12:00:00Z") {
  Document d;
  d.id = std::move(id);
  d.tokens = words(tokens);
  d.raw_text = std::string(tokens);
  d.author.bio = std::move(bio);
  d.created_at = parse_iso8601(when);
  return d;
}

inline Corpus corpus_of(const std::vector<std::string>& texts, std::string label = "D0") {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back(doc("d" + std::to_string(i), texts[i]));
  return Corpus(std::move(label), std::move(docs));
}

inline Lexicon lexicon_of(const std::vector<std::string>& triggers) {
  Lexicon lex;
  for (std::size_t i = 0; i < triggers.size(); ++i) {
    LexiconEntry e;
    e.trigger = words(triggers[i]);
    e.cui = "C" + std::to_string(1000 + i);
    e.preferred_name = triggers[i];
    e.semantic_types = {"dsyn"};
    lex.push_back(std::move(e));
  }
  return lex;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("clinfilter_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string record_line(std::string_view id, std::string_view text, std::string_view bio,
                               std::string_view when = "2020-03-01T12:00:00Z",
                               std::string_view name = "A Person", std::string_view handle = "@someone") {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["text"] = text;
  j["user_name"] = name;
  j["user_handle"] = handle;
  j["user_bio"] = bio;
  j["created_at"] = when;
  return j.dump();
}

}  // namespace testing
