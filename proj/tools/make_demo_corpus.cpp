// Writes the demo fixture: a planted corpus with a one-week keyword burst,
// a matching lexicon and a category file.

#include <iostream>

#include "CLI11.hpp"
#include "clinfilter/common.hpp"
#include "clinfilter/io.hpp"
#include "clinfilter/synthetic.hpp"

using namespace clinfilter;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Generate the demo corpus, lexicon and categories"};
  fs::path out_dir = "data/demo";
  std::uint64_t seed = 7;
  std::string burst_start = "2020-04-19";
  app.add_option("-o,--output-dir", out_dir, "Output directory");
  app.add_option("--seed", seed, "Corpus seed");
  app.add_option("--burst-start", burst_start, "First day of the anosmia burst");
  CLI11_PARSE(app, argc, argv);

  try {
    SyntheticSpec spec;
    spec.seed = seed;
    auto corpus = make_planted_corpus(spec);
    BurstSpec burst;
    burst.keywords = {"anosmia", "dysgeusia", "ageusia"};
    burst.start = parse_date(burst_start);
    burst.documents = 60;
    burst.public_documents = 60;
    add_burst(corpus, burst, spec);

    fs::create_directories(out_dir);
    write_file(out_dir / "corpus.jsonl", records_jsonl(corpus.records));

    std::string lex = "# trigger\tcui\tpreferred_name\tsemantic_types\n";
    for (const auto& e : synthetic_lexicon()) {
      lex += e.trigger_text() + "\t" + e.cui + "\t" + e.preferred_name + "\t" + join(e.semantic_types, ";") + "\n";
    }
    write_file(out_dir / "lexicon.tsv", lex);

    std::string cats = "# name\texpected\tkeywords\n";
    for (const auto& t : clinical_themes()) cats += t.name + "\trelevant\t" + join(t.words, ";") + "\n";
    for (const auto& t : chatter_themes()) cats += t.name + "\tirrelevant\t" + join(t.words, ";") + "\n";
    write_file(out_dir / "categories.tsv", cats);

    std::cout << "wrote " << corpus.records.size() << " records (" << corpus.relevant.size() << " relevant) to "
              << out_dir.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
