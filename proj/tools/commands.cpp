#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "clinfilter/analytics.hpp"
#include "clinfilter/author_filter.hpp"
#include "clinfilter/concepts.hpp"
#include "clinfilter/config.hpp"
#include "clinfilter/corpus.hpp"
#include "clinfilter/io.hpp"
#include "clinfilter/parallel.hpp"
#include "clinfilter/pipeline.hpp"
#include "clinfilter/topic_model.hpp"

namespace clinfilter::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class RunExists : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const RunExists& e) {
    err << "error: " << e.what() << "\n";
    return kRunExists;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string utc_now() {
  return format_iso8601(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

std::string timestamp_name() {
  std::string s = utc_now();  // 2020-03-15T08:30:00Z
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '-' || c == ':'; }), s.end());
  return s;
}

void apply_overrides(ConfigMap& map, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + o + "'");
    set_config_value(map, o.substr(0, eq), o.substr(eq + 1), fs::current_path());
  }
}

ConfigMap resolve_map(const ConfigArgs& args) {
  fs::path path = args.config;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  }
  ConfigMap map;
  if (!path.empty()) {
    if (!fs::exists(path)) throw UsageError("config file not found: " + path.string());
    map = load_config_file(path);
  }
  apply_overrides(map, args.overrides);
  return map;
}

RunConfig resolve_config(const ConfigArgs& args) {
  if (args.jobs > 0) set_jobs(args.jobs);
  return build_config(resolve_map(args));
}

ConfigMap map_from_json(const nlohmann::json& j) {
  ConfigMap map;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw InputError("manifest config value for '" + k + "' is not a string");
    map[k] = v.get<std::string>();
  }
  // Re-validate through the same parser; paths are already absolute.
  ConfigMap checked;
  for (const auto& [k, v] : map) set_config_value(checked, k, v, fs::current_path());
  return checked;
}

std::string safe_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "keyword" : out;
}

std::string lines_of(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    out += s;
    out += '\n';
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// --- artifacts -------------------------------------------------------------

std::string relevance_csv(const RelevanceTable& table) {
  std::string out = "phrase,rel\n";
  for (const auto& [phrase, rel] : table.ranked()) out += csv_field(phrase) + "," + format_double(rel) + "\n";
  return out;
}

std::string topic_scores_csv(const TopicScoreSet& topics) {
  std::string out = "topic_id,score,relevant\n";
  for (std::size_t t = 0; t < topics.scores.size(); ++t) {
    const bool rel = std::binary_search(topics.relevant.begin(), topics.relevant.end(), t);
    out += std::to_string(t) + "," + format_double(topics.scores[t]) + "," + (rel ? "1" : "0") + "\n";
  }
  return out;
}

void write_iteration(const fs::path& dir, const IterationRecord& rec) {
  fs::create_directories(dir);
  save_model(rec.model, dir / "model.json");
  write_file(dir / "topic_scores.csv", topic_scores_csv(rec.topics));
  write_file(dir / "retained_ids.txt", lines_of(rec.retained_ids));
  write_file(dir / "relevance.csv", relevance_csv(rec.relevance));
  write_file(dir / "topics.json", dump_json(topics_digest(rec)));
}

ojson iteration_summary(const IterationRecord& rec, const Matcher& matcher) {
  ojson j;
  j["iteration"] = rec.iteration;
  j["documents"] = rec.corpus_size;
  j["seed"] = rec.seed;
  j["r"] = rec.topics.r();
  j["cutoff"] = rec.topics.cutoff;
  j["retained"] = rec.retained_ids.size();
  j["applied"] = rec.applied;
  j["concept_fraction"] = concept_fraction(rec.model, matcher);
  return j;
}

ojson result_summary(const PipelineResult& res, const Matcher& matcher) {
  ojson j;
  j["d0"] = res.d0_size;
  j["d1"] = res.d1.size();
  j["evidence_kept"] = res.evidence_kept;
  j["evidence_dropped"] = res.evidence_dropped;
  ojson iters = ojson::array();
  for (const auto& rec : res.records) iters.push_back(iteration_summary(rec, matcher));
  j["iterations"] = std::move(iters);
  j["final"] = res.final_corpus.size();
  j["halt"] = std::string(to_string(res.halt));
  j["notices"] = res.notices;
  return j;
}

void write_result(const fs::path& dir, const PipelineResult& res, const Matcher& matcher) {
  for (const auto& rec : res.records) write_iteration(dir / ("iter" + std::to_string(rec.iteration)), rec);
  write_file(dir / "baseline_relevance.csv", relevance_csv(res.baseline));
  write_file(dir / "result.json", dump_json(result_summary(res, matcher)));
}

std::string enrichment_csv(const EnrichmentTable& table) {
  std::string out = "section,rank,phrase,n,f_filtered,f_reference,rel\n";
  auto emit = [&](std::string_view section, const std::vector<EnrichmentRow>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out += std::string(section) + "," + std::to_string(i + 1) + "," + csv_field(r.phrase) + "," +
             std::to_string(r.n) + "," + std::to_string(r.f_filtered) + "," + std::to_string(r.f_reference) +
             "," + format_double(r.rel) + "\n";
    }
  };
  emit("top", table.top);
  emit("bottom", table.bottom);
  return out;
}

std::string fraction_text(const std::optional<double>& f) { return f ? format_double(*f) : "null"; }

std::string categories_csv(const CategoryReport& report) {
  std::string out = "category,expected,members";
  for (int i : report.iterations) out += ",iter" + std::to_string(i);
  out += "\n";
  for (const auto& c : report.categories) {
    out += csv_field(c.name) + "," + std::string(to_string(c.expected)) + "," + std::to_string(c.members);
    for (const auto& f : c.fractions) out += "," + fraction_text(f);
    out += "\n";
  }
  auto aggregate = [&](std::string_view name, std::string_view cls, const auto& values) {
    std::size_t members = 0;
    for (const auto& c : report.categories) {
      if (to_string(c.expected) == cls) members += c.members;
    }
    out += std::string(name) + "," + std::string(cls) + "," + std::to_string(members);
    for (const auto& f : values) out += "," + fraction_text(f);
    out += "\n";
  };
  aggregate("(all relevant)", "relevant", report.relevant_aggregate);
  aggregate("(all irrelevant)", "irrelevant", report.irrelevant_aggregate);
  return out;
}

std::string timeline_csv(const KeywordTimeline& tl) {
  std::string out = "date,tweet_count,moving_avg,in_topic_model\n";
  for (const auto& p : tl.points) {
    out += format_date(p.date) + "," + std::to_string(p.tweet_count) + "," + format_double(p.moving_avg) +
           "," + (p.in_topic_model ? "1" : "0") + "\n";
  }
  return out;
}

ojson timeline_summary(const KeywordTimeline& tl, std::span<const WindowResult> windows) {
  ojson j;
  j["name"] = tl.pattern.name;
  j["regex"] = tl.pattern.regex;
  j["matches"] = tl.total_matches;
  j["first_mention"] = tl.first_mention ? ojson(format_date(*tl.first_mention)) : ojson(nullptr);
  if (tl.first_hit_window && *tl.first_hit_window < windows.size()) {
    j["first_topic_window"] = format_date(windows[*tl.first_hit_window].bounds.start);
  } else {
    j["first_topic_window"] = nullptr;
  }
  return j;
}

// Windows for the timeline: the windowed runs when present, otherwise the
// main run as one window covering the whole corpus.
std::vector<WindowResult> timeline_windows(const Corpus& corpus, const std::optional<PipelineResult>& main,
                                           const std::vector<WindowResult>& windows) {
  if (!windows.empty() || !main || corpus.empty()) return windows;
  auto [lo, hi] = std::minmax_element(corpus.begin(), corpus.end(), [](const Document& a, const Document& b) {
    return a.created_at < b.created_at;
  });
  WindowResult w;
  w.bounds = {floor_day(lo->created_at), floor_day(hi->created_at) + std::chrono::days{1}};
  w.documents = corpus.size();
  w.result = main;
  return {std::move(w)};
}

std::string window_dir_name(const WindowResult& w) {
  std::ostringstream name;
  name << "w" << std::setw(2) << std::setfill('0') << w.index << "_" << format_date(w.bounds.start) << "_"
       << format_date(w.bounds.end);
  return name.str();
}

ojson input_digests(const ConfigMap& snap) {
  ojson j = ojson::object();
  for (const auto* key : {"input", "stopwords", "lemmas", "patterns", "lexicon", "categories"}) {
    auto it = snap.find(key);
    if (it == snap.end() || it->second.empty()) continue;
    j[key] = {{"path", it->second}, {"sha256", sha256_file(it->second)}};
  }
  return j;
}

// --- run directory reading --------------------------------------------------

nlohmann::json read_json(const fs::path& path) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw InputError(path.string() + " is not valid JSON");
  return j;
}

std::string missing_stage(const fs::path& run_dir) {
  int last = 0;
  while (fs::exists(run_dir / ("iter" + std::to_string(last + 1)) / "topics.json")) ++last;
  std::string msg = "manifest.json is missing from " + run_dir.string() + "; the run did not finish";
  if (!fs::exists(run_dir / "d1_documents.jsonl")) return msg + " (author filter output absent)";
  if (last == 0) return msg + " (no iteration completed)";
  return msg + " (last complete stage: iteration " + std::to_string(last) + ")";
}

struct RunDir {
  fs::path dir;
  nlohmann::json manifest;
  RunConfig config;
};

RunDir open_run(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("run directory not found: " + dir.string());
  if (!fs::exists(dir / "manifest.json")) throw InputError(missing_stage(dir));
  RunDir r;
  r.dir = dir;
  r.manifest = read_json(dir / "manifest.json");
  r.config = build_config(map_from_json(r.manifest.at("config")));
  return r;
}

Corpus load_jsonl_corpus(const fs::path& path, const RunConfig& config, const Preprocessor& pp) {
  return load_corpus(path, config, pp).corpus;
}

// Minimal record carrying what the timeline needs from a topics digest.
IterationRecord record_from_digest(const nlohmann::json& digest) {
  IterationRecord rec;
  rec.iteration = digest.at("iteration").get<int>();
  for (const auto& t : digest.at("topics")) {
    std::vector<TopWord> words;
    for (const auto& w : t.at("top_words")) words.push_back({w.at("word").get<std::string>(), w.at("weight").get<double>()});
    rec.model.top_words.push_back(std::move(words));
    rec.topics.scores.push_back(t.at("score").get<double>());
    if (t.at("relevant").get<bool>()) rec.topics.relevant.push_back(t.at("topic").get<std::size_t>());
  }
  return rec;
}

std::optional<PipelineResult> load_main_tail(const fs::path& dir, const nlohmann::json& stages) {
  if (!stages.contains("iterations") || stages["iterations"].empty()) return std::nullopt;
  const int last = stages["iterations"].back().at("iteration").get<int>();
  PipelineResult res;
  res.records.push_back(record_from_digest(read_json(dir / ("iter" + std::to_string(last)) / "topics.json")));
  return res;
}

std::vector<WindowResult> load_windows(const fs::path& run_dir) {
  std::vector<WindowResult> out;
  const auto index_path = run_dir / "windows" / "index.json";
  if (!fs::exists(index_path)) return out;
  const auto index = read_json(index_path);
  for (const auto& w : index.at("windows")) {
    WindowResult r;
    r.index = w.at("index").get<std::size_t>();
    r.bounds = {parse_date(w.at("start").get<std::string>()), parse_date(w.at("end").get<std::string>())};
    r.documents = w.at("documents").get<std::size_t>();
    if (w.contains("last_iteration") && !w["last_iteration"].is_null()) {
      const auto dir = run_dir / "windows" / w.at("dir").get<std::string>();
      PipelineResult res;
      res.records.push_back(record_from_digest(
          read_json(dir / ("iter" + std::to_string(w["last_iteration"].get<int>())) / "topics.json")));
      r.result = std::move(res);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<IterationRecord> load_records(const RunDir& run) {
  std::vector<IterationRecord> out;
  const auto& stages = run.manifest.at("stages");
  if (!stages.contains("iterations")) return out;
  for (const auto& it : stages["iterations"]) {
    IterationRecord rec;
    rec.iteration = it.at("iteration").get<int>();
    rec.applied = it.at("applied").get<bool>();
    const auto path = run.dir / ("iter" + std::to_string(rec.iteration)) / "retained_ids.txt";
    if (!fs::exists(path)) throw InputError(path.string() + " is missing");
    rec.retained_ids = read_lines(path);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

// --- commands ----------------------------------------------------------------

int cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.cfg.jobs > 0) set_jobs(args.cfg.jobs);
    auto res = ingest(args.input);
    for (const auto& w : res.warnings) err << "warning: " << w << "\n";
    if (!args.output.empty()) write_file(args.output, documents_jsonl(res.corpus));
    out << "lines " << res.lines << ", records " << res.corpus.size() << ", skipped " << res.skipped << "\n";
    return kOk;
  });
}

int cmd_filter_authors(const FilterAuthorsArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<CredentialPattern> patterns;
    if (args.patterns.empty()) {
      patterns = default_patterns();
    } else {
      if (!fs::exists(args.patterns)) throw UsageError("pattern file not found: " + args.patterns.string());
      patterns = load_patterns(args.patterns);
    }
    auto in = ingest(args.input);
    for (const auto& w : in.warnings) err << "warning: " << w << "\n";
    auto filtered = filter_hcp(in.corpus, patterns, "D1");

    fs::create_directories(args.output_dir);
    write_file(args.output_dir / "d1_documents.jsonl", documents_jsonl(filtered.corpus));
    ojson stats;
    stats["input_documents"] = in.corpus.size();
    stats["skipped_lines"] = in.skipped;
    stats["retained"] = filtered.corpus.size();
    ojson per = ojson::array();
    for (std::size_t i = 0; i < patterns.size(); ++i)
      per.push_back({{"pattern", patterns[i].to_string()}, {"documents", filtered.pattern_counts[i]}});
    stats["patterns"] = std::move(per);
    write_file(args.output_dir / "author_filter_stats.json", dump_json(stats));
    out << "retained " << filtered.corpus.size() << " of " << in.corpus.size() << " documents\n";
    return kOk;
  });
}

int cmd_annotate(const AnnotateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = resolve_config(args.cfg);
    const fs::path input = args.input.empty() ? cfg.input : args.input;
    if (input.empty()) throw UsageError("no input given (--input or config key 'input')");
    Preprocessor pp = make_preprocessor(cfg);
    Matcher matcher = Matcher::build(load_run_lexicon(cfg, pp));
    auto loaded = load_corpus(input, cfg, pp);
    for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
    Corpus corpus = annotate_corpus(std::move(loaded.corpus), matcher);

    std::string text;
    std::size_t annotated = 0;
    std::size_t mentions = 0;
    for (const auto& doc : corpus) {
      ojson j;
      j["id"] = doc.id;
      j["tokens"] = doc.tokens;
      ojson cs = ojson::array();
      for (const auto& m : doc.concepts) {
        std::vector<std::string> cuis;
        for (std::size_t e : matcher.entries(m.phrase)) cuis.push_back(matcher.lexicon()[e].cui);
        cs.push_back({{"trigger", matcher.phrase(m.phrase)}, {"cuis", cuis}, {"begin", m.begin}, {"end", m.end}});
      }
      j["concepts"] = std::move(cs);
      text += j.dump() + "\n";
      annotated += doc.concepts.empty() ? 0 : 1;
      mentions += doc.concepts.size();
    }
    if (args.output.empty()) {
      out << text;
    } else {
      write_file(args.output, text);
      out << "documents " << corpus.size() << ", annotated " << annotated << ", mentions " << mentions << "\n";
    }
    return kOk;
  });
}

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto started = utc_now();
    const auto t_start = Clock::now();
    ConfigMap map;
    std::vector<std::string> overrides = args.cfg.overrides;
    if (!args.manifest.empty()) {
      if (!args.cfg.config.empty()) throw UsageError("--manifest and --config are mutually exclusive");
      const auto source = read_json(args.manifest);
      map = map_from_json(source.at("config"));
      // The snapshot already includes the earlier overrides; keep their record.
      overrides = source.value("overrides", std::vector<std::string>{});
      overrides.insert(overrides.end(), args.cfg.overrides.begin(), args.cfg.overrides.end());
      apply_overrides(map, args.cfg.overrides);
    } else {
      map = resolve_map(args.cfg);
    }
    if (args.no_concepts) {
      set_config_value(map, "use_concepts", "false", fs::current_path());
      overrides.push_back("use_concepts=false");
    }
    if (!args.windows.empty()) {
      WindowSpec spec = WindowSpec::parse(args.windows);
      set_config_value(map, "windows", "true", fs::current_path());
      set_config_value(map, "window.length_days", std::to_string(spec.length_days), fs::current_path());
      set_config_value(map, "window.stride_days", std::to_string(spec.stride_days), fs::current_path());
      set_config_value(map, "window.rounds", std::to_string(spec.rounds), fs::current_path());
      overrides.push_back("windows=" + args.windows);
    }
    if (args.window_runs) set_config_value(map, "windows", "true", fs::current_path());
    RunConfig cfg = build_config(map);
    if (args.cfg.jobs > 0) set_jobs(args.cfg.jobs);
    if (cfg.input.empty()) throw ConfigError("config key 'input' is required");
    if (!fs::exists(cfg.input)) throw InputError("input not found: " + cfg.input.string());

    fs::path output_dir = !args.output_dir.empty() ? args.output_dir : cfg.output_dir;
    const fs::path dir = output_dir / (args.run_name.empty() ? timestamp_name() : args.run_name);
    if (fs::exists(dir)) {
      if (!args.force) throw RunExists("run directory " + dir.string() + " exists; use --force to overwrite");
      fs::remove_all(dir);
    }

    ojson timings;
    auto t0 = Clock::now();
    Preprocessor pp = make_preprocessor(cfg);
    Lexicon lexicon = load_run_lexicon(cfg, pp);
    const Matcher matcher = Matcher::build(lexicon);
    auto loaded = load_corpus(cfg.input, cfg, pp);
    for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
    const Corpus& d0 = loaded.corpus;
    if (d0.empty()) throw InputError("input has no valid records: " + cfg.input.string());
    timings["load"] = seconds_since(t0);

    fs::create_directories(dir);
    const ConfigMap snap = snapshot(cfg);
    ojson manifest;
    manifest["tool"] = "clinfilter";
    manifest["version"] = kVersion;
    manifest["format"] = 1;
    manifest["config"] = snap;
    manifest["overrides"] = overrides;
    manifest["inputs"] = input_digests(snap);
    manifest["seed"] = cfg.pipeline.lda.seed;
    ojson stages;
    stages["ingest"] = {{"lines", loaded.lines}, {"skipped", loaded.skipped}, {"documents", d0.size()}};

    std::optional<PipelineResult> main;
    if (args.main_run) {
      t0 = Clock::now();
      main = run(d0, cfg.pipeline, lexicon);
      timings["pipeline"] = seconds_since(t0);
      for (const auto& n : main->notices) err << "notice: " << n << "\n";

      write_file(dir / "d1_documents.jsonl", documents_jsonl(main->d1));
      ojson stats;
      stats["input_documents"] = d0.size();
      stats["retained"] = main->d1.size();
      ojson per = ojson::array();
      for (std::size_t i = 0; i < cfg.pipeline.patterns.size(); ++i)
        per.push_back({{"pattern", cfg.pipeline.patterns[i].to_string()}, {"documents", main->pattern_counts[i]}});
      stats["patterns"] = std::move(per);
      write_file(dir / "author_filter_stats.json", dump_json(stats));
      write_file(dir / "baseline_relevance.csv", relevance_csv(main->baseline));
      for (const auto& rec : main->records) write_iteration(dir / ("iter" + std::to_string(rec.iteration)), rec);
      write_file(dir / "final_corpus.jsonl", documents_jsonl(main->final_corpus));

      ojson summary = result_summary(*main, matcher);
      for (auto it = summary.begin(); it != summary.end(); ++it) stages[it.key()] = it.value();
      if (!main->records.empty()) {
        const IterationRecord* last = &main->records.back();
        for (const auto& rec : main->records) {
          if (rec.applied) last = &rec;
        }
        write_file(dir / "topics.json", dump_json(topics_digest(*last)));
      }
    }

    std::vector<WindowResult> windows;
    if (cfg.windows) {
      t0 = Clock::now();
      windows = run_windows(d0, cfg.window, cfg.pipeline, lexicon);
      timings["windows"] = seconds_since(t0);
      ojson index = ojson::array();
      for (const auto& w : windows) {
        ojson e;
        e["index"] = w.index;
        e["start"] = format_date(w.bounds.start);
        e["end"] = format_date(w.bounds.end);
        e["documents"] = w.documents;
        e["dir"] = window_dir_name(w);
        e["notice"] = w.notice;
        if (w.result) {
          write_result(dir / "windows" / window_dir_name(w), *w.result, matcher);
          e["halt"] = std::string(to_string(w.result->halt));
          e["d1"] = w.result->d1.size();
          e["final"] = w.result->final_corpus.size();
          e["last_iteration"] = w.result->records.empty() ? ojson(nullptr) : ojson(w.result->records.back().iteration);
        } else {
          e["last_iteration"] = nullptr;
          err << "notice: " << w.notice << "\n";
        }
        index.push_back(std::move(e));
      }
      fs::create_directories(dir / "windows");
      ojson idx;
      idx["length_days"] = cfg.window.length_days;
      idx["stride_days"] = cfg.window.stride_days;
      idx["rounds"] = cfg.window.rounds;
      idx["global_baseline"] = cfg.window.global_baseline;
      idx["windows"] = std::move(index);
      write_file(dir / "windows" / "index.json", dump_json(idx));
      stages["windows"] = windows.size();
    }

    t0 = Clock::now();
    ojson analytics;
    if (main && !main->d1.empty()) {
      EnrichmentOptions eo = cfg.enrichment;
      write_file(dir / "enrichment.csv", enrichment_csv(enrichment_table(main->final_corpus, main->d1, eo)));
      if (!cfg.categories.empty()) {
        auto cats = load_categories(cfg.categories, &pp);
        write_file(dir / "categories.csv", categories_csv(category_preservation(main->records, main->d1, cats)));
      }
    }
    if (!cfg.timeline_keywords.empty()) {
      const Corpus& base = main ? main->d1 : d0;
      auto tw = timeline_windows(base, main, windows);
      ojson tls = ojson::array();
      for (const auto& kw : cfg.timeline_keywords) {
        auto tl = keyword_timeline(base, tw, kw);
        write_file(dir / ("timeline_" + safe_name(kw.name) + ".csv"), timeline_csv(tl));
        tls.push_back(timeline_summary(tl, tw));
      }
      analytics["timelines"] = std::move(tls);
    }
    timings["analytics"] = seconds_since(t0);

    manifest["stages"] = std::move(stages);
    manifest["analytics"] = std::move(analytics);
    manifest["timings_file"] = "timings.json";
    manifest["complete"] = true;

    ojson tj;
    tj["started_at"] = started;
    tj["finished_at"] = utc_now();
    tj["jobs"] = jobs();
    tj["seconds"] = std::move(timings);
    tj["total_seconds"] = seconds_since(t_start);
    write_file(dir / "timings.json", dump_json(tj));
    write_file(dir / "manifest.json", dump_json(manifest));

    if (!args.quiet) {
      out << "run directory: " << dir.string() << "\n";
      if (main) {
        out << "D0 " << d0.size() << " -> D1 " << main->d1.size();
        for (const auto& rec : main->records) {
          if (rec.applied) out << " -> D" << rec.iteration + 1 << " " << rec.retained_ids.size();
        }
        out << " (" << to_string(main->halt) << ")\n";
      }
      if (cfg.windows) out << "windows: " << windows.size() << "\n";
    }
    return kOk;
  });
}

ojson report_digest(const fs::path& run_dir) {
  RunDir run = open_run(run_dir);
  const auto& m = run.manifest;
  const auto& stages = m.at("stages");
  ojson d;
  d["run"] = fs::absolute(run_dir).lexically_normal().filename().string();
  d["version"] = m.at("version");
  d["halt"] = stages.value("halt", std::string("windows_only"));
  d["d0"] = stages.at("ingest").at("documents");
  d["d1"] = stages.contains("d1") ? ojson(stages["d1"]) : ojson(nullptr);
  d["final"] = stages.contains("final") ? ojson(stages["final"]) : ojson(nullptr);

  ojson iters = ojson::array();
  ojson trajectory = ojson::array();
  int shown = 0;
  if (stages.contains("iterations")) {
    for (const auto& it : stages["iterations"]) {
      iters.push_back({{"iteration", it.at("iteration")},
                       {"documents", it.at("documents")},
                       {"r", it.at("r")},
                       {"cutoff", it.at("cutoff")},
                       {"retained", it.at("retained")},
                       {"applied", it.at("applied")}});
      trajectory.push_back(ojson(it.at("r")));
      shown = it.at("iteration").get<int>();
    }
  }
  d["iterations"] = std::move(iters);
  d["r_trajectory"] = std::move(trajectory);

  ojson topics = ojson::array();
  if (shown > 0) {
    const auto path = run_dir / ("iter" + std::to_string(shown)) / "topics.json";
    if (!fs::exists(path)) throw InputError(path.string() + " is missing; iteration " + std::to_string(shown) + " output incomplete");
    auto digest = read_json(path);
    std::vector<nlohmann::json> rows(digest.at("topics").begin(), digest.at("topics").end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.at("rank") < b.at("rank"); });
    for (const auto& t : rows) {
      std::vector<std::string> words;
      for (const auto& w : t.at("top_words")) words.push_back(w.at("word").get<std::string>());
      topics.push_back({{"rank", t.at("rank")},
                        {"topic", t.at("topic")},
                        {"score", t.at("score")},
                        {"relevant", t.at("relevant")},
                        {"top_words", words}});
    }
  }
  d["topics_iteration"] = shown;
  d["topics"] = std::move(topics);
  d["notices"] = stages.contains("notices") ? ojson(stages["notices"]) : ojson::array();
  d["windows"] = stages.contains("windows") ? ojson(stages["windows"]) : ojson(0);
  return d;
}

namespace {

// Left-aligned columns, two spaces apart; the last column is not padded.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) out.append(width[c] - row[c].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string render_report(const ojson& d) {
  std::ostringstream o;
  auto num = [](const ojson& v) {
    if (v.is_null()) return std::string("-");
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
  };
  o << "Run " << d.at("run").get<std::string>() << " (clinfilter " << d.at("version").get<std::string>() << ")\n";
  o << "Halt reason: " << d.at("halt").get<std::string>() << "\n";
  o << "Documents: D0 " << num(d.at("d0")) << ", D1 " << num(d.at("d1")) << ", final " << num(d.at("final")) << "\n";
  if (d.at("windows").get<std::size_t>() > 0) o << "Windows: " << d.at("windows").get<std::size_t>() << "\n";

  std::vector<std::vector<std::string>> rows{{"Iteration", "Documents", "r", "Cutoff", "Retained", "Applied"}};
  for (const auto& it : d.at("iterations")) {
    rows.push_back({num(it.at("iteration")), num(it.at("documents")), num(it.at("r")), num(it.at("cutoff")),
                    num(it.at("retained")), it.at("applied").get<bool>() ? "yes" : "no"});
  }
  o << "\n" << render_table(rows);
  std::vector<std::string> traj;
  for (const auto& r : d.at("r_trajectory")) traj.push_back(num(r));
  o << "r trajectory: " << (traj.empty() ? "-" : join(traj, " -> ")) << "\n";

  if (d.at("topics_iteration").get<int>() > 0) {
    o << "\nTopics of iteration " << d.at("topics_iteration").get<int>() << " ranked by score\n";
    rows = {{"Rank", "Topic", "Score", "Relevant", "Top words"}};
    for (const auto& t : d.at("topics")) {
      std::vector<std::string> words = t.at("top_words").get<std::vector<std::string>>();
      rows.push_back({num(t.at("rank")), num(t.at("topic")), num(t.at("score")),
                      t.at("relevant").get<bool>() ? "yes" : "no", join(words, " ")});
    }
    o << render_table(rows);
  }
  const auto& notices = d.at("notices");
  if (!notices.empty()) {
    o << "\nNotices\n";
    for (const auto& n : notices) o << "  " << n.get<std::string>() << "\n";
  }
  return o.str();
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.format != "text" && args.format != "json") throw UsageError("--format must be text or json");
    auto digest = report_digest(args.run_dir);
    out << (args.format == "json" ? dump_json(digest) : render_report(digest));
    return kOk;
  });
}

int cmd_enrich(const EnrichArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = resolve_config(args.cfg);
    Preprocessor pp = make_preprocessor(cfg);
    Corpus filtered = load_jsonl_corpus(args.filtered, cfg, pp);
    Corpus reference = load_jsonl_corpus(args.reference, cfg, pp);
    auto table = enrichment_table(filtered, reference, cfg.enrichment);
    const auto csv = enrichment_csv(table);
    if (args.output.empty()) {
      out << csv;
    } else {
      write_file(args.output, csv);
      out << "scored " << table.rows.size() << " phrases\n";
    }
    return kOk;
  });
}

int cmd_categories(const CategoriesArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunDir run = open_run(args.run_dir);
    const fs::path path = args.categories.empty() ? run.config.categories : args.categories;
    if (path.empty()) throw UsageError("no categories file (--categories or config key 'categories')");
    Preprocessor pp = make_preprocessor(run.config);
    auto cats = load_categories(path, &pp);
    Corpus d1 = load_jsonl_corpus(run.dir / "d1_documents.jsonl", run.config, pp);
    auto records = load_records(run);
    const auto csv = categories_csv(category_preservation(records, d1, cats));
    if (args.output.empty()) {
      out << csv;
    } else {
      write_file(args.output, csv);
    }
    return kOk;
  });
}

int cmd_timeline(const TimelineArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunDir run = open_run(args.run_dir);
    std::vector<KeywordPattern> keywords;
    for (const auto& k : args.keywords) keywords.push_back(parse_keyword_pattern(k));
    if (keywords.empty()) keywords = run.config.timeline_keywords;
    if (keywords.empty()) throw UsageError("no keywords (--keyword or config key 'timeline_keywords')");
    Preprocessor pp = make_preprocessor(run.config);
    const bool has_main = fs::exists(run.dir / "d1_documents.jsonl");
    Corpus base = has_main ? load_jsonl_corpus(run.dir / "d1_documents.jsonl", run.config, pp)
                           : load_jsonl_corpus(run.config.input, run.config, pp);
    auto main = has_main ? load_main_tail(run.dir, run.manifest.at("stages")) : std::nullopt;
    auto tw = timeline_windows(base, main, load_windows(run.dir));
    const fs::path out_dir = args.output_dir.empty() ? run.dir : args.output_dir;
    fs::create_directories(out_dir);
    for (const auto& kw : keywords) {
      auto tl = keyword_timeline(base, tw, kw);
      const auto path = out_dir / ("timeline_" + safe_name(kw.name) + ".csv");
      write_file(path, timeline_csv(tl));
      out << kw.name << ": " << tl.total_matches << " matching documents, first mention "
          << (tl.first_mention ? format_date(*tl.first_mention) : std::string("none")) << ", first topic window "
          << (tl.first_hit_window ? format_date(tw[*tl.first_hit_window].bounds.start) : std::string("none"))
          << " -> " << path.string() << "\n";
    }
    return kOk;
  });
}

}  // namespace clinfilter::cli
