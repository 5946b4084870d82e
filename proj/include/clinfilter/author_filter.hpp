#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clinfilter/corpus.hpp"

namespace clinfilter {

enum class AuthorField : std::uint8_t { name = 1, handle = 2, bio = 4 };

inline constexpr std::uint8_t kAllFields = 7;

std::string_view field_name(AuthorField field);

// A credential keyword matched at a token boundary of the author's name,
// handle or bio. A trailing `*` turns it into a prefix match.
struct CredentialPattern {
  std::string pattern;  // without the trailing '*'
  bool case_sensitive = false;
  bool prefix = false;
  std::uint8_t scope = kAllFields;

  // Pattern-file syntax: `!` prefix marks case-sensitive, `*` suffix marks a
  // prefix match, trailing `@name` / `@handle` / `@bio` tags restrict scope.
  static CredentialPattern parse(std::string_view line);
  std::string to_string() const;
};

struct PatternHit {
  std::size_t pattern = 0;  // index into the pattern list
  AuthorField field = AuthorField::bio;
};

// Every (pattern, field) pair that matches.
std::vector<PatternHit> match_author(const AuthorInfo& author,
                                     std::span<const CredentialPattern> patterns);

// Throws std::invalid_argument on an empty pattern list.
bool is_hcp(const AuthorInfo& author, std::span<const CredentialPattern> patterns);
bool is_hcp(const RawRecord& record, std::span<const CredentialPattern> patterns);

struct AuthorFilterResult {
  Corpus corpus;
  std::vector<std::vector<PatternHit>> hits;  // parallel to corpus documents
  std::vector<std::size_t> pattern_counts;    // retained documents per pattern
};

AuthorFilterResult filter_hcp(const Corpus& corpus, std::span<const CredentialPattern> patterns,
                              std::string label = "D1");

std::vector<CredentialPattern> load_patterns(const std::filesystem::path& path);
std::vector<CredentialPattern> parse_patterns(std::string_view text);

// 27 default credentials. Only "MD", "Dr", "epidemiolog*" and "public health"
// are known from published usage; the rest is a curated default.
std::vector<CredentialPattern> default_patterns();

}  // namespace clinfilter
