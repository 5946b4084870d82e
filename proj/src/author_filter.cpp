#include "clinfilter/author_filter.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace clinfilter {
namespace {

constexpr std::string_view kDefaultPatterns = R"(# name, handle and bio are searched unless @-tags narrow the scope
!MD
Dr
epidemiolog*
public health
!RN
!DO
!MPH
nurs*
physician*
surgeon*
resident
attending
pediatric*
cardiolog*
virolog*
immunolog*
infectious disease*
!ICU
!EMT
paramedic*
pharmacist*
!PA-C
!NP
!PA
!DDS
!MBBS
intensivist*
)";

bool word_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

char fold(char c, bool case_sensitive) {
  return case_sensitive ? c : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

// Collapses whitespace runs so multi-word patterns match across line breaks.
std::string squeeze(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

bool matches(std::string_view text, const CredentialPattern& p) {
  const std::string_view pat = p.pattern;
  if (pat.empty() || text.size() < pat.size()) return false;
  for (std::size_t pos = 0; pos + pat.size() <= text.size(); ++pos) {
    if (pos > 0 && word_char(text[pos - 1])) continue;
    bool equal = true;
    for (std::size_t i = 0; i < pat.size() && equal; ++i) {
      equal = fold(text[pos + i], p.case_sensitive) == fold(pat[i], p.case_sensitive);
    }
    if (!equal) continue;
    std::size_t end = pos + pat.size();
    if (p.prefix || end == text.size() || !word_char(text[end])) return true;
  }
  return false;
}

std::string_view field_text(const AuthorInfo& a, AuthorField f) {
  switch (f) {
    case AuthorField::name: return a.name;
    case AuthorField::handle: return a.handle;
    case AuthorField::bio: return a.bio;
  }
  return {};
}

}  // namespace

std::string_view field_name(AuthorField field) {
  switch (field) {
    case AuthorField::name: return "name";
    case AuthorField::handle: return "handle";
    case AuthorField::bio: return "bio";
  }
  return "?";
}

CredentialPattern CredentialPattern::parse(std::string_view line) {
  std::string text = squeeze(line);
  CredentialPattern p;
  std::uint8_t scope = 0;
  // Peel trailing scope tags.
  for (;;) {
    auto sp = text.rfind(' ');
    std::string_view last = sp == std::string::npos ? std::string_view(text)
                                                    : std::string_view(text).substr(sp + 1);
    std::uint8_t bit = 0;
    if (last == "@name") bit = static_cast<std::uint8_t>(AuthorField::name);
    else if (last == "@handle") bit = static_cast<std::uint8_t>(AuthorField::handle);
    else if (last == "@bio") bit = static_cast<std::uint8_t>(AuthorField::bio);
    if (bit == 0 || sp == std::string::npos) break;
    scope |= bit;
    text.resize(sp);
  }
  p.scope = scope == 0 ? kAllFields : scope;
  if (!text.empty() && text.front() == '!') {
    p.case_sensitive = true;
    text.erase(text.begin());
  }
  if (!text.empty() && text.back() == '*') {
    p.prefix = true;
    text.pop_back();
  }
  if (text.empty()) throw std::invalid_argument("empty credential pattern: '" + std::string(line) + "'");
  if (text.find('*') != std::string::npos)
    throw std::invalid_argument("wildcard allowed only at end of pattern: '" + std::string(line) + "'");
  p.pattern = std::move(text);
  return p;
}

std::string CredentialPattern::to_string() const {
  std::string out = case_sensitive ? "!" : "";
  out += pattern;
  if (prefix) out += '*';
  if (scope != kAllFields) {
    for (auto f : {AuthorField::name, AuthorField::handle, AuthorField::bio}) {
      if (scope & static_cast<std::uint8_t>(f)) {
        out += " @";
        out += field_name(f);
      }
    }
  }
  return out;
}

std::vector<PatternHit> match_author(const AuthorInfo& author,
                                     std::span<const CredentialPattern> patterns) {
  std::vector<PatternHit> hits;
  const AuthorField fields[] = {AuthorField::name, AuthorField::handle, AuthorField::bio};
  std::string squeezed[3];
  for (int f = 0; f < 3; ++f) squeezed[f] = squeeze(field_text(author, fields[f]));
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    for (int f = 0; f < 3; ++f) {
      if (!(patterns[i].scope & static_cast<std::uint8_t>(fields[f]))) continue;
      if (matches(squeezed[f], patterns[i])) hits.push_back({i, fields[f]});
    }
  }
  return hits;
}

bool is_hcp(const AuthorInfo& author, std::span<const CredentialPattern> patterns) {
  if (patterns.empty()) throw std::invalid_argument("is_hcp: empty pattern list");
  const AuthorField fields[] = {AuthorField::name, AuthorField::handle, AuthorField::bio};
  for (const auto& p : patterns) {
    for (auto f : fields) {
      if ((p.scope & static_cast<std::uint8_t>(f)) && matches(squeeze(field_text(author, f)), p))
        return true;
    }
  }
  return false;
}

bool is_hcp(const RawRecord& record, std::span<const CredentialPattern> patterns) {
  return is_hcp(record.author, patterns);
}

AuthorFilterResult filter_hcp(const Corpus& corpus, std::span<const CredentialPattern> patterns,
                              std::string label) {
  if (patterns.empty()) throw std::invalid_argument("filter_hcp: empty pattern list");
  std::vector<std::vector<PatternHit>> hits(corpus.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    hits[static_cast<std::size_t>(i)] = match_author(corpus[static_cast<std::size_t>(i)].author, patterns);
  }

  AuthorFilterResult result;
  result.pattern_counts.assign(patterns.size(), 0);
  std::vector<Document> kept;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (hits[i].empty()) continue;
    kept.push_back(corpus[i]);
    std::vector<bool> counted(patterns.size(), false);
    for (const auto& h : hits[i]) {
      if (!counted[h.pattern]) ++result.pattern_counts[h.pattern];
      counted[h.pattern] = true;
    }
    result.hits.push_back(std::move(hits[i]));
  }
  result.corpus = Corpus(std::move(label), std::move(kept));
  return result;
}

std::vector<CredentialPattern> parse_patterns(std::string_view text) {
  std::vector<CredentialPattern> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(CredentialPattern::parse(line));
  }
  return out;
}

std::vector<CredentialPattern> load_patterns(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read pattern file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto patterns = parse_patterns(ss.str());
  if (patterns.empty()) throw InputError("pattern file has no patterns: " + path.string());
  return patterns;
}

std::vector<CredentialPattern> default_patterns() { return parse_patterns(kDefaultPatterns); }

}  // namespace clinfilter
