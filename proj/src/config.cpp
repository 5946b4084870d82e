#include "clinfilter/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace clinfilter {
namespace {

namespace fs = std::filesystem;

enum class Kind { path, text, boolean, integer, real, count_mode, date, keywords, list };

struct KeyInfo {
  std::string_view key;
  Kind kind;
};

constexpr KeyInfo kKeys[] = {
    {"input", Kind::path},
    {"output_dir", Kind::path},
    {"stopwords", Kind::path},
    {"lemmas", Kind::path},
    {"patterns", Kind::path},
    {"lexicon", Kind::path},
    {"categories", Kind::path},
    {"query_terms", Kind::list},
    {"emoji_ranges", Kind::text},
    {"group_threads", Kind::boolean},
    {"k", Kind::integer},
    {"tau", Kind::real},
    {"max_iterations", Kind::integer},
    {"epsilon", Kind::real},
    {"use_concepts", Kind::boolean},
    {"stop_growth_factor", Kind::real},
    {"count_mode", Kind::count_mode},
    {"lda.alpha", Kind::real},
    {"lda.beta", Kind::real},
    {"lda.iterations", Kind::integer},
    {"seed", Kind::integer},
    {"top_words", Kind::integer},
    {"enrich.max_n", Kind::integer},
    {"enrich.top_n", Kind::integer},
    {"enrich.min_count", Kind::integer},
    {"windows", Kind::boolean},
    {"window.length_days", Kind::integer},
    {"window.stride_days", Kind::integer},
    {"window.rounds", Kind::integer},
    {"window.start", Kind::date},
    {"window.global_baseline", Kind::boolean},
    {"timeline_keywords", Kind::keywords},
};

const KeyInfo* find_key(std::string_view key) {
  for (const auto& k : kKeys) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto next = s.find(sep, pos);
    if (next == std::string_view::npos) next = s.size();
    std::string item = trim(s.substr(pos, next - pos));
    if (!item.empty()) out.push_back(std::move(item));
    pos = next + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expect) {
  throw ConfigError("config key '" + std::string(key) + "': invalid value '" + std::string(value) +
                    "', expected " + std::string(expect));
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  bad_value(key, v, "true or false");
}

long long parse_int(std::string_view key, std::string_view v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

std::string canonical(const KeyInfo& info, std::string_view value, const fs::path& base_dir) {
  const std::string v = trim(value);
  switch (info.kind) {
    case Kind::path:
      if (v.empty()) return {};
      return fs::weakly_canonical(fs::absolute(base_dir / fs::path(v))).string();
    case Kind::text:
      return v;
    case Kind::boolean:
      return parse_bool(info.key, v) ? "true" : "false";
    case Kind::integer:
      return std::to_string(parse_int(info.key, v));
    case Kind::real:
      return format_double(parse_real(info.key, v));
    case Kind::count_mode:
      if (v != "occurrences" && v != "documents") bad_value(info.key, v, "occurrences or documents");
      return v;
    case Kind::date:
      if (v.empty()) return {};
      try {
        return format_date(parse_date(v));
      } catch (const std::exception&) {
        bad_value(info.key, v, "a YYYY-MM-DD date");
      }
    case Kind::keywords: {
      std::vector<std::string> parts;
      for (const auto& item : split_list(v, ';')) {
        auto p = parse_keyword_pattern(item);
        parts.push_back(p.name + "=" + p.regex);
      }
      return join(parts, ";");
    }
    case Kind::list:
      return join(split_list(v, ','), ",");
  }
  return v;
}

const std::string* get(const ConfigMap& map, std::string_view key) {
  auto it = map.find(std::string(key));
  return it == map.end() ? nullptr : &it->second;
}

}  // namespace

std::vector<std::string_view> config_keys() {
  std::vector<std::string_view> out;
  for (const auto& k : kKeys) out.push_back(k.key);
  return out;
}

void set_config_value(ConfigMap& map, std::string_view key, std::string_view value,
                      const fs::path& base_dir) {
  const std::string k = trim(key);
  const KeyInfo* info = find_key(k);
  if (!info) throw ConfigError("unknown config key '" + k + "'");
  map[k] = canonical(*info, value, base_dir);
}

ConfigMap parse_config_text(std::string_view text, const fs::path& base_dir) {
  ConfigMap map;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find('\n', pos);
    if (next == std::string_view::npos) next = text.size();
    std::string line = trim(text.substr(pos, next - pos));
    pos = next + 1;
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    set_config_value(map, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1),
                     base_dir);
  }
  return map;
}

ConfigMap load_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), fs::absolute(path).parent_path());
}

RunConfig build_config(const ConfigMap& map) {
  RunConfig c;
  auto path = [&](std::string_view key, fs::path& out) {
    if (auto* v = get(map, key)) out = *v;
  };
  path("input", c.input);
  path("output_dir", c.output_dir);
  path("stopwords", c.stopwords);
  path("lemmas", c.lemmas);
  path("patterns", c.patterns);
  path("lexicon", c.lexicon);
  path("categories", c.categories);

  if (auto* v = get(map, "query_terms")) {
    c.query_terms = split_list(*v, ',');
  } else {
    auto defaults = default_query_terms();
    c.query_terms.assign(defaults.begin(), defaults.end());
    std::sort(c.query_terms.begin(), c.query_terms.end());
  }
  if (auto* v = get(map, "emoji_ranges")) {
    c.emoji_ranges = *v;
    if (!c.emoji_ranges.empty()) parse_codepoint_ranges(c.emoji_ranges);
  }
  if (auto* v = get(map, "group_threads")) c.group_threads = *v == "true";

  auto integer = [&](std::string_view key, auto& out) {
    if (auto* v = get(map, key)) out = static_cast<std::remove_reference_t<decltype(out)>>(std::stoll(*v));
  };
  auto real = [&](std::string_view key, double& out) {
    if (auto* v = get(map, key)) out = parse_real(key, *v);
  };
  auto boolean = [&](std::string_view key, bool& out) {
    if (auto* v = get(map, key)) out = *v == "true";
  };

  PipelineConfig& p = c.pipeline;
  integer("k", p.k);
  real("tau", p.tau);
  integer("max_iterations", p.max_iterations);
  real("epsilon", p.epsilon);
  boolean("use_concepts", p.use_concepts);
  real("stop_growth_factor", p.stop_growth_factor);
  if (auto* v = get(map, "count_mode"))
    p.count_mode = *v == "documents" ? CountMode::documents : CountMode::occurrences;
  real("lda.alpha", p.lda.alpha);
  real("lda.beta", p.lda.beta);
  integer("lda.iterations", p.lda.iterations);
  integer("seed", p.lda.seed);
  integer("top_words", p.lda.top_words);
  p.lda.k = p.k;
  if (!c.patterns.empty()) {
    try {
      p.patterns = load_patterns(c.patterns);
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
  }
  p.validate();

  c.enrichment.epsilon = p.epsilon;
  integer("enrich.max_n", c.enrichment.max_n);
  integer("enrich.top_n", c.enrichment.top_n);
  integer("enrich.min_count", c.enrichment.min_count);
  if (c.enrichment.max_n < 1) throw ConfigError("enrich.max_n must be >= 1");

  boolean("windows", c.windows);
  integer("window.length_days", c.window.length_days);
  integer("window.stride_days", c.window.stride_days);
  integer("window.rounds", c.window.rounds);
  if (auto* v = get(map, "window.start"); v && !v->empty()) c.window.start = parse_date(*v);
  boolean("window.global_baseline", c.window.global_baseline);
  c.window.validate();

  if (auto* v = get(map, "timeline_keywords")) {
    for (const auto& item : split_list(*v, ';')) c.timeline_keywords.push_back(parse_keyword_pattern(item));
  }
  return c;
}

ConfigMap snapshot(const RunConfig& c) {
  ConfigMap m;
  auto path = [](const fs::path& p) { return p.empty() ? std::string() : p.string(); };
  auto boolean = [](bool b) { return std::string(b ? "true" : "false"); };
  m["input"] = path(c.input);
  m["stopwords"] = path(c.stopwords);
  m["lemmas"] = path(c.lemmas);
  m["patterns"] = path(c.patterns);
  m["lexicon"] = path(c.lexicon);
  m["categories"] = path(c.categories);
  m["query_terms"] = join(c.query_terms, ",");
  m["emoji_ranges"] = c.emoji_ranges;
  m["group_threads"] = boolean(c.group_threads);
  const PipelineConfig& p = c.pipeline;
  m["k"] = std::to_string(p.k);
  m["tau"] = format_double(p.tau);
  m["max_iterations"] = std::to_string(p.max_iterations);
  m["epsilon"] = format_double(p.epsilon);
  m["use_concepts"] = boolean(p.use_concepts);
  m["stop_growth_factor"] = format_double(p.stop_growth_factor);
  m["count_mode"] = p.count_mode == CountMode::documents ? "documents" : "occurrences";
  m["lda.alpha"] = format_double(p.lda.alpha);  // 0 keeps the 5/k default
  m["lda.beta"] = format_double(p.lda.beta);
  m["lda.iterations"] = std::to_string(p.lda.iterations);
  m["seed"] = std::to_string(p.lda.seed);
  m["top_words"] = std::to_string(p.lda.top_words);
  m["enrich.max_n"] = std::to_string(c.enrichment.max_n);
  m["enrich.top_n"] = std::to_string(c.enrichment.top_n);
  m["enrich.min_count"] = std::to_string(c.enrichment.min_count);
  m["windows"] = boolean(c.windows);
  m["window.length_days"] = std::to_string(c.window.length_days);
  m["window.stride_days"] = std::to_string(c.window.stride_days);
  m["window.rounds"] = std::to_string(c.window.rounds);
  m["window.start"] = c.window.start ? format_date(*c.window.start) : std::string();
  m["window.global_baseline"] = boolean(c.window.global_baseline);
  std::vector<std::string> kws;
  for (const auto& kw : c.timeline_keywords) kws.push_back(kw.name + "=" + kw.regex);
  m["timeline_keywords"] = join(kws, ";");
  return m;
}

Preprocessor make_preprocessor(const RunConfig& config) {
  PreprocessOptions opts;
  if (!config.stopwords.empty()) opts.stopwords = load_word_list(config.stopwords);
  opts.query_terms.insert(config.query_terms.begin(), config.query_terms.end());
  if (!config.emoji_ranges.empty()) opts.strip_ranges = parse_codepoint_ranges(config.emoji_ranges);
  Lemmatizer lem;
  if (!config.lemmas.empty()) lem = Lemmatizer::load(config.lemmas);
  return Preprocessor(std::move(opts), std::move(lem));
}

Lexicon load_run_lexicon(const RunConfig& config, const Preprocessor& normalizer) {
  if (config.lexicon.empty()) throw ConfigError("config key 'lexicon' is required");
  return load_lexicon(config.lexicon, &normalizer);
}

LoadedCorpus load_corpus(const fs::path& input, const RunConfig& config,
                         const Preprocessor& preprocessor) {
  auto ingested = ingest(input);
  LoadedCorpus out;
  out.lines = ingested.lines;
  out.skipped = ingested.skipped;
  out.warnings = std::move(ingested.warnings);
  Corpus raw = config.group_threads ? group_threads(ingested.corpus) : std::move(ingested.corpus);
  out.corpus = preprocess_corpus(raw, preprocessor);
  return out;
}

}  // namespace clinfilter
