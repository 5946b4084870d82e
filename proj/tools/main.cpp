#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace cli = clinfilter::cli;

namespace {

void add_config_options(CLI::App* app, cli::ConfigArgs& cfg) {
  app->add_option("-c,--config", cfg.config, "Config file (default: $CLINFILTER_CONFIG)");
  app->add_option("-s,--set", cfg.overrides, "Override a config key (key=value, repeatable)");
  app->add_option("-j,--jobs", cfg.jobs, "Worker threads (default: available cores)")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative relevance filtering of clinical social media posts"};
  app.set_version_flag("--version", std::string(cli::kVersion));
  app.require_subcommand(1);

  cli::IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate a JSONL corpus and report malformed lines");
  add_config_options(c_ingest, ingest.cfg);
  c_ingest->add_option("input", ingest.input, "Input JSONL")->required();
  c_ingest->add_option("-o,--output", ingest.output, "Write the valid records here");

  cli::FilterAuthorsArgs filter;
  auto* c_filter = app.add_subcommand("filter-authors", "Keep documents written by credentialed authors");
  c_filter->add_option("input", filter.input, "Input JSONL")->required();
  c_filter->add_option("-p,--patterns", filter.patterns, "Credential pattern file (default: built-in list)");
  c_filter->add_option("-o,--output-dir", filter.output_dir, "Output directory")->required();

  cli::AnnotateArgs annotate;
  auto* c_annotate = app.add_subcommand("annotate", "Tag clinical concept mentions");
  add_config_options(c_annotate, annotate.cfg);
  c_annotate->add_option("input", annotate.input, "Input JSONL (default: config input)");
  c_annotate->add_option("-o,--output", annotate.output, "Output JSONL (default: stdout)");

  cli::RunArgs run;
  auto* c_run = app.add_subcommand("run", "Run the full filtering pipeline");
  add_config_options(c_run, run.cfg);
  auto* manifest_opt = c_run->add_option("--manifest", run.manifest, "Replay the config of an earlier run");
  manifest_opt->excludes(c_run->get_option("--config"));
  c_run->add_option("-o,--output-dir", run.output_dir, "Parent of the run directory (default: config output_dir)");
  c_run->add_option("-n,--name", run.run_name, "Run directory name (default: UTC timestamp)");
  c_run->add_flag("-f,--force", run.force, "Overwrite an existing run directory");
  c_run->add_flag("--no-concepts", run.no_concepts, "Score topics with all words instead of concepts");
  c_run->add_option("--windows", run.windows, "Also run windowed filtering, LENGTH:STRIDE[:ROUNDS]");
  c_run->add_flag("-q,--quiet", run.quiet, "Print nothing on success");

  cli::RunArgs win;
  win.main_run = false;
  win.window_runs = true;
  auto* c_windows = app.add_subcommand("windows", "Run filtering independently per time window");
  add_config_options(c_windows, win.cfg);
  c_windows->add_option("spec", win.windows, "LENGTH:STRIDE[:ROUNDS] (default: config window.*)");
  c_windows->add_option("-o,--output-dir", win.output_dir, "Parent of the run directory");
  c_windows->add_option("-n,--name", win.run_name, "Run directory name");
  c_windows->add_flag("-f,--force", win.force, "Overwrite an existing run directory");
  c_windows->add_flag("--no-concepts", win.no_concepts, "Score topics with all words");
  c_windows->add_flag("-q,--quiet", win.quiet, "Print nothing on success");

  cli::ReportArgs report;
  auto* c_report = app.add_subcommand("report", "Summarize a run directory");
  c_report->add_option("run_dir", report.run_dir, "Run directory")->required();
  c_report->add_option("--format", report.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  cli::EnrichArgs enrich;
  auto* c_enrich = app.add_subcommand("enrich", "Rank n-grams by enrichment of one corpus over another");
  add_config_options(c_enrich, enrich.cfg);
  c_enrich->add_option("filtered", enrich.filtered, "Filtered corpus JSONL")->required();
  c_enrich->add_option("reference", enrich.reference, "Reference corpus JSONL")->required();
  c_enrich->add_option("-o,--output", enrich.output, "Output CSV (default: stdout)");

  cli::CategoriesArgs categories;
  auto* c_categories = app.add_subcommand("categories", "Category retention across iterations");
  c_categories->add_option("run_dir", categories.run_dir, "Run directory")->required();
  c_categories->add_option("--categories", categories.categories, "Category file (default: run config)");
  c_categories->add_option("-o,--output", categories.output, "Output CSV (default: stdout)");

  cli::TimelineArgs timeline;
  auto* c_timeline = app.add_subcommand("timeline", "Daily keyword counts against window topic models");
  c_timeline->add_option("run_dir", timeline.run_dir, "Run directory")->required();
  c_timeline->add_option("-k,--keyword", timeline.keywords, "name=regex (repeatable; default: run config)");
  c_timeline->add_option("-o,--output-dir", timeline.output_dir, "Output directory (default: run directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  }

  auto& out = std::cout;
  auto& err = std::cerr;
  if (c_ingest->parsed()) return cli::cmd_ingest(ingest, out, err);
  if (c_filter->parsed()) return cli::cmd_filter_authors(filter, out, err);
  if (c_annotate->parsed()) return cli::cmd_annotate(annotate, out, err);
  if (c_run->parsed()) return cli::cmd_run(run, out, err);
  if (c_windows->parsed()) return cli::cmd_run(win, out, err);
  if (c_report->parsed()) return cli::cmd_report(report, out, err);
  if (c_enrich->parsed()) return cli::cmd_enrich(enrich, out, err);
  if (c_categories->parsed()) return cli::cmd_categories(categories, out, err);
  if (c_timeline->parsed()) return cli::cmd_timeline(timeline, out, err);
  return cli::kUsage;
}
