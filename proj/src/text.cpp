#include "clinfilter/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <string>

#include "clinfilter/common.hpp"

namespace clinfilter {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool istarts_with(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (text.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != prefix[i]) return false;
  }
  return true;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Regular English plurals only, mirroring a noun-only lemmatizer.
std::string strip_plural(std::string_view w) {
  const std::size_t n = w.size();
  if (n > 4 && ends_with(w, "ies")) return std::string(w.substr(0, n - 3)) + "y";
  if (n > 4 && ends_with(w, "sses")) return std::string(w.substr(0, n - 2));
  if (n > 3 && w.back() == 's' && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is"))
    return std::string(w.substr(0, n - 1));
  return std::string(w);
}

bool is_apostrophe(char32_t c) {
  return c == U'\'' || c == 0x2019 || c == 0x2018 || c == 0x02BC || c == U'`' || c == 0x00B4;
}

bool in_ranges(char32_t c, const std::vector<CodepointRange>& ranges) {
  for (const auto& r : ranges) {
    if (c >= r.first && c <= r.last) return true;
  }
  return false;
}

// Decodes a single entity starting at text[pos] == '&'. Returns consumed length.
std::size_t decode_entity(std::string_view text, std::size_t pos, std::string& out) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> named{{
      {"&amp;", "&"},
      {"&lt;", "<"},
      {"&gt;", ">"},
      {"&quot;", "\""},
      {"&apos;", "'"},
      {"&nbsp;", " "},
      {"&hellip;", "..."},
  }};
  for (const auto& [entity, value] : named) {
    if (istarts_with(text, pos, entity)) {
      out += value;
      return entity.size();
    }
  }
  if (pos + 3 < text.size() && text[pos + 1] == '#') {
    std::size_t p = pos + 2;
    int base = 10;
    if (text[p] == 'x' || text[p] == 'X') {
      base = 16;
      ++p;
    }
    std::size_t semi = text.find(';', p);
    if (semi != std::string_view::npos && semi > p && semi - p <= 8) {
      std::uint32_t code = 0;
      auto [ptr, ec] = std::from_chars(text.data() + p, text.data() + semi, code, base);
      if (ec == std::errc{} && ptr == text.data() + semi && code > 0 && code <= 0x10FFFF) {
        append_utf8(out, static_cast<char32_t>(code));
        return semi + 1 - pos;
      }
    }
  }
  out += '&';
  return 1;
}

}  // namespace

std::vector<CodepointRange> parse_codepoint_ranges(std::string_view text) {
  std::vector<CodepointRange> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string item = trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) continue;
    auto parse_hex = [&](std::string_view h) {
      std::uint32_t v = 0;
      auto [ptr, ec] = std::from_chars(h.data(), h.data() + h.size(), v, 16);
      if (ec != std::errc{} || ptr != h.data() + h.size() || v > 0x10FFFF)
        throw ConfigError("invalid codepoint range item: '" + item + "'");
      return static_cast<char32_t>(v);
    };
    std::size_t dash = item.find('-');
    CodepointRange r{};
    if (dash == std::string::npos) {
      r.first = r.last = parse_hex(item);
    } else {
      r.first = parse_hex(std::string_view(item).substr(0, dash));
      r.last = parse_hex(std::string_view(item).substr(dash + 1));
    }
    if (r.last < r.first) throw ConfigError("empty codepoint range: '" + item + "'");
    out.push_back(r);
  }
  return out;
}

std::vector<CodepointRange> default_strip_ranges() {
  return parse_codepoint_ranges(kDefaultStripRanges);
}

Lemmatizer Lemmatizer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read lemma table: " + path.string());
  Lemmatizer lem;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t sep = t.find_first_of(" \t");
    if (sep == std::string::npos)
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected 'word<TAB>lemma'");
    lem.table_.insert_or_assign(ascii_lower(t.substr(0, sep)), ascii_lower(trim(t.substr(sep))));
  }
  lem.close();
  return lem;
}

void Lemmatizer::add(std::string word, std::string lemma) {
  table_.insert_or_assign(std::move(word), std::move(lemma));
  close();
}

void Lemmatizer::close() {
  for (const auto& [word, lemma] : table_) {
    if (lemma.empty() || !std::all_of(lemma.begin(), lemma.end(), [](char c) {
          return is_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
        }))
      throw InputError("lemma for '" + word + "' must be a single alphanumeric word");
  }
  std::unordered_map<std::string, std::string> resolved;
  for (const auto& [word, lemma] : table_) {
    std::string cur = lemma;
    std::size_t steps = 0;
    for (auto it = table_.find(cur); it != table_.end() && it->second != cur; it = table_.find(cur)) {
      cur = it->second;
      if (++steps > table_.size()) throw InputError("lemma table contains a cycle at '" + word + "'");
    }
    resolved.emplace(word, cur);
  }
  std::vector<std::string> lemmas;
  for (const auto& [word, lemma] : resolved) lemmas.push_back(lemma);
  for (auto& l : lemmas) resolved.try_emplace(l, l);
  table_ = std::move(resolved);
}

std::string Lemmatizer::lemmatize(std::string_view word) const {
  std::string cur(word);
  for (;;) {
    if (auto it = table_.find(cur); it != table_.end()) return it->second;
    std::string next = strip_plural(cur);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

std::unordered_set<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read word list: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    words.insert(ascii_lower(t));
  }
  return words;
}

std::unordered_set<std::string> default_query_terms() {
  return {"coronavirus", "covid", "covid19", "2019ncov"};
}

std::string strip_urls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool boundary = i == 0 || !is_alnum(text[i - 1]);
    if (boundary && (istarts_with(text, i, "http://") || istarts_with(text, i, "https://") ||
                     istarts_with(text, i, "www."))) {
      while (i < text.size() && !is_space(text[i])) ++i;
      out += ' ';
      continue;
    }
    out += text[i++];
  }
  return out;
}

std::string strip_html(std::string_view text) {
  std::string no_tags;
  no_tags.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '<' && i + 1 < text.size()) {
      std::size_t p = i + 1;
      if (text[p] == '/' || text[p] == '!') ++p;
      if (p < text.size() && std::isalpha(static_cast<unsigned char>(text[p]))) {
        std::size_t close = text.find_first_of("<>", p);
        if (close != std::string_view::npos && text[close] == '>') {
          no_tags += ' ';
          i = close + 1;
          continue;
        }
      }
    }
    no_tags += text[i++];
  }
  std::string out;
  out.reserve(no_tags.size());
  for (std::size_t j = 0; j < no_tags.size();) {
    if (no_tags[j] == '&') {
      j += decode_entity(no_tags, j, out);
    } else {
      out += no_tags[j++];
    }
  }
  return out;
}

std::vector<std::string> expand_contraction(std::string_view word) {
  std::string w(word);
  while (!w.empty() && w.front() == '\'') w.erase(w.begin());
  while (!w.empty() && w.back() == '\'') w.pop_back();
  if (w.find('\'') == std::string::npos) {
    if (w.empty()) return {};
    return {w};
  }

  static const std::unordered_map<std::string, std::vector<std::string>> whole{
      {"can't", {"can", "not"}},   {"won't", {"will", "not"}}, {"shan't", {"shall", "not"}},
      {"ain't", {"am", "not"}},    {"let's", {"let", "us"}},   {"y'all", {"you", "all"}},
      {"ma'am", {"madam"}},        {"o'clock", {"oclock"}},
  };
  if (auto it = whole.find(w); it != whole.end()) return it->second;

  static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> suffixes{{
      {"n't", "not"},
      {"'re", "are"},
      {"'ve", "have"},
      {"'ll", "will"},
      {"'d", "would"},
      {"'m", "am"},
      {"'s", ""},
  }};
  for (const auto& [suffix, expansion] : suffixes) {
    if (w.size() > suffix.size() && ends_with(w, suffix)) {
      auto out = expand_contraction(std::string_view(w).substr(0, w.size() - suffix.size()));
      if (!expansion.empty()) out.emplace_back(expansion);
      return out;
    }
  }
  std::erase(w, '\'');
  if (w.empty()) return {};
  return {w};
}

std::vector<std::string> normalize_words(std::string_view text,
                                         const std::vector<CodepointRange>& strip) {
  const std::string cleaned = strip_html(strip_urls(text));

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(cleaned);
  icu::UnicodeString normalized = U_SUCCESS(status) ? nfc->normalize(source, status) : source;
  if (U_FAILURE(status)) normalized = source;

  std::string buf;
  buf.reserve(cleaned.size());
  bool in_word = false;
  for (int32_t i = 0; i < normalized.length();) {
    const UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    const auto cp = static_cast<char32_t>(c);
    if (is_apostrophe(cp)) {
      buf += '\'';
      in_word = true;
    } else if (cp > 0xFFFF || in_ranges(cp, strip)) {
      buf += ' ';
      in_word = false;
    } else if (u_isalnum(c)) {
      append_utf8(buf, static_cast<char32_t>(u_tolower(c)));
      in_word = true;
    } else if (in_word && u_charType(c) == U_NON_SPACING_MARK) {
      append_utf8(buf, cp);
    } else {
      buf += ' ';
      in_word = false;
    }
  }

  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < buf.size()) {
    while (pos < buf.size() && buf[pos] == ' ') ++pos;
    std::size_t end = buf.find(' ', pos);
    if (end == std::string::npos) end = buf.size();
    if (end > pos) {
      for (auto& w : expand_contraction(std::string_view(buf).substr(pos, end - pos)))
        words.push_back(std::move(w));
    }
    pos = end;
  }
  return words;
}

bool Preprocessor::dropped(const std::string& word) const {
  return options_.stopwords.contains(word) || options_.query_terms.contains(word);
}

std::vector<std::string> Preprocessor::tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  for (auto& word : normalize_words(text, options_.strip_ranges)) {
    if (dropped(word)) continue;
    std::string lemma = lemmatizer_.lemmatize(word);
    if (dropped(lemma)) continue;
    tokens.push_back(std::move(lemma));
  }
  return tokens;
}

}  // namespace clinfilter
