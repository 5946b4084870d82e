#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinfilter/analytics.hpp"
#include "clinfilter/pipeline.hpp"
#include "clinfilter/text.hpp"

namespace clinfilter {

// Canonical key -> value text. Path values are absolute.
using ConfigMap = std::map<std::string, std::string>;

// Everything a run needs. Built from a ConfigMap so that a manifest snapshot
// replays to the same configuration.
struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = "runs";
  std::filesystem::path stopwords;  // empty: no stopwords
  std::filesystem::path lemmas;     // empty: suffix fallback only
  std::filesystem::path patterns;   // empty: built-in credential list
  std::filesystem::path lexicon;
  std::filesystem::path categories;  // empty: no category audit
  std::vector<std::string> query_terms;
  std::string emoji_ranges;  // empty: built-in ranges
  bool group_threads = false;

  PipelineConfig pipeline;
  EnrichmentOptions enrichment;
  bool windows = false;
  WindowSpec window;
  std::vector<KeywordPattern> timeline_keywords;
};

// `key = value` lines; `#` starts a comment line. Unknown keys and bad values
// throw ConfigError. Relative paths resolve against `base_dir`.
ConfigMap parse_config_text(std::string_view text, const std::filesystem::path& base_dir);
ConfigMap load_config_file(const std::filesystem::path& path);

// Sets one key (same validation as the file). Relative paths resolve
// against `base_dir`.
void set_config_value(ConfigMap& map, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir);

RunConfig build_config(const ConfigMap& map);

// Every key with its effective value, defaults included. output_dir is
// left out: it does not affect results.
ConfigMap snapshot(const RunConfig& config);

std::vector<std::string_view> config_keys();

// Loads stopwords, lemma table and strip ranges named by the config.
Preprocessor make_preprocessor(const RunConfig& config);

// Lexicon normalized through `normalizer`; throws ConfigError when the
// config names none.
Lexicon load_run_lexicon(const RunConfig& config, const Preprocessor& normalizer);

// Raw records from `input`, preprocessed (and thread-grouped when enabled).
struct LoadedCorpus {
  Corpus corpus;
  std::size_t lines = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};
LoadedCorpus load_corpus(const std::filesystem::path& input, const RunConfig& config,
                         const Preprocessor& preprocessor);

}  // namespace clinfilter
