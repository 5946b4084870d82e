#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace clinfilter::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntime = 1,
  kUsage = 2,
  kConfig = 3,
  kInput = 4,
  kRunExists = 5,
};

inline constexpr const char* kConfigEnv = "CLINFILTER_CONFIG";
inline constexpr const char* kVersion = "0.4.0";

// Options shared by every command that reads a config file.
struct ConfigArgs {
  std::filesystem::path config;      // empty: $CLINFILTER_CONFIG, then built-in defaults
  std::vector<std::string> overrides;  // key=value
  int jobs = 0;
};

struct IngestArgs {
  ConfigArgs cfg;
  std::filesystem::path input;
  std::filesystem::path output;  // optional: valid records re-emitted as JSONL
};

struct FilterAuthorsArgs {
  std::filesystem::path input;
  std::filesystem::path patterns;  // empty: built-in list
  std::filesystem::path output_dir;
};

struct AnnotateArgs {
  ConfigArgs cfg;
  std::filesystem::path input;  // empty: config input
  std::filesystem::path output;
};

struct RunArgs {
  ConfigArgs cfg;
  std::filesystem::path manifest;  // replay: config snapshot from a previous run
  std::filesystem::path output_dir;
  std::string run_name;
  bool force = false;
  bool no_concepts = false;
  std::string windows;  // LENGTH:STRIDE[:ROUNDS]
  bool main_run = true;
  bool window_runs = false;
  bool quiet = false;
};

struct ReportArgs {
  std::filesystem::path run_dir;
  std::string format = "text";
};

struct EnrichArgs {
  ConfigArgs cfg;
  std::filesystem::path filtered;
  std::filesystem::path reference;
  std::filesystem::path output;  // empty: stdout
};

struct CategoriesArgs {
  std::filesystem::path run_dir;
  std::filesystem::path categories;  // empty: the run's config
  std::filesystem::path output;      // empty: stdout
};

struct TimelineArgs {
  std::filesystem::path run_dir;
  std::vector<std::string> keywords;  // name=regex; empty: the run's config
  std::filesystem::path output_dir;   // empty: the run directory
};

int cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err);
int cmd_filter_authors(const FilterAuthorsArgs& args, std::ostream& out, std::ostream& err);
int cmd_annotate(const AnnotateArgs& args, std::ostream& out, std::ostream& err);
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);
int cmd_enrich(const EnrichArgs& args, std::ostream& out, std::ostream& err);
int cmd_categories(const CategoriesArgs& args, std::ostream& out, std::ostream& err);
int cmd_timeline(const TimelineArgs& args, std::ostream& out, std::ostream& err);

// Report content of a finished (or partial) run directory. Throws
// InputError naming the missing stage.
nlohmann::ordered_json report_digest(const std::filesystem::path& run_dir);
std::string render_report(const nlohmann::ordered_json& digest);

}  // namespace clinfilter::cli
