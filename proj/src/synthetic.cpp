#include "clinfilter/synthetic.hpp"

#include <algorithm>
#include <random>

#include "json.hpp"

namespace clinfilter {
namespace {

using Rng = std::mt19937_64;

std::size_t below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
double unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[below(rng, v.size())];
}

const std::vector<std::string> kStopwords = {"the", "and", "of", "is", "to", "in", "we", "our",
                                             "this", "that", "with", "for", "are", "it"};
const std::vector<std::string> kQueryTerms = {"COVID19", "coronavirus", "#covid", "Covid"};
const std::vector<std::string> kEmoji = {"\xF0\x9F\x98\xB7", "\xF0\x9F\x99\x8F", "\xE2\x9D\xA4\xEF\xB8\x8F",
                                         "\xF0\x9F\x98\xA9"};
const std::vector<std::string> kBurstWords = {"anosmia", "dysgeusia", "ageusia", "parosmia", "hyposmia"};

const std::vector<std::string> kFirst = {"Alex", "Sam", "Jordan", "Taylor", "Morgan", "Casey", "Riley",
                                         "Jamie", "Avery", "Quinn", "Priya", "Wei", "Omar", "Lena",
                                         "Mateo", "Aisha", "Kofi", "Yuki", "Elena", "Noah"};
const std::vector<std::string> kLast = {"Smith", "Chen", "Garcia", "Okafor", "Patel", "Kim", "Novak",
                                        "Rossi", "Haddad", "Silva", "Berg", "Mensah", "Ito", "Walsh"};
const std::vector<std::string> kHcpBios = {
    "ICU nurse. Night shift forever.", "Emergency physician | views my own",
    "Cardiologist, runner, dad", "Epidemiologist studying respiratory viruses",
    "Pediatric resident in Boston", "Public health researcher", "Infectious disease fellow",
    "Critical care RN", "Pharmacist and coffee snob", "Paramedic, 10 years on the road",
    "Attending surgeon", "Immunologist. Lab rat.", "Family medicine MD", "Virologist"};
const std::vector<std::string> kPublicBios = {
    "Coffee, dogs and hiking", "Dad of three. Soccer coach.", "Software engineer",
    "Love to bake", "Teacher and gardener", "Sports fan", "Amateur photographer",
    "Small business owner", "Music lover", "Student", ""};

Theme theme(std::string name, bool clinical, std::vector<std::string> words) {
  return Theme{std::move(name), clinical, std::move(words)};
}

AuthorInfo make_author(Rng& rng, bool hcp) {
  AuthorInfo a;
  const auto& first = pick(rng, kFirst);
  const auto& last = pick(rng, kLast);
  std::string handle = first.substr(0, 1) + last + std::to_string(below(rng, 90) + 10);
  std::transform(handle.begin(), handle.end(), handle.begin(), [](unsigned char c) { return std::tolower(c); });
  if (hcp) {
    switch (below(rng, 3)) {
      case 0: a.name = "Dr. " + first + " " + last; break;
      case 1: a.name = first + " " + last + ", MD"; break;
      default: a.name = first + " " + last; break;
    }
    a.bio = pick(rng, kHcpBios);
  } else {
    a.name = first + " " + last;
    a.bio = pick(rng, kPublicBios);
  }
  a.handle = "@" + handle;
  return a;
}

std::string render(Rng& rng, const std::vector<std::string>& words, bool decorate) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string w = words[i];
    if (decorate) {
      const double u = unit(rng);
      if (u < 0.05) {
        w = "#" + w;
      } else if (u < 0.12 && !w.empty()) {
        w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      }
      if (unit(rng) < 0.25) {
        out += pick(rng, kStopwords);
        out += ' ';
      }
    }
    out += w;
    if (decorate && unit(rng) < 0.06) out += i + 1 == words.size() ? "!" : ",";
    out += ' ';
  }
  if (decorate) {
    if (unit(rng) < 0.3) out += pick(rng, kQueryTerms) + " ";
    if (unit(rng) < 0.15) out += pick(rng, kEmoji) + " ";
    if (unit(rng) < 0.1) out += "https://t.co/x" + std::to_string(below(rng, 100000)) + " ";
  }
  out.pop_back();
  return out;
}

std::vector<std::string> draw_words(Rng& rng, const Theme& main, const SyntheticSpec& spec,
                                    const Theme* aside = nullptr, double aside_share = 0.0) {
  const int lo = main.clinical ? spec.relevant_min_words : spec.min_words;
  const int hi = main.clinical ? spec.relevant_max_words : spec.max_words;
  const int n = lo + static_cast<int>(below(rng, static_cast<std::size_t>(hi - lo + 1)));
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double u = unit(rng);
    if (aside && u < aside_share) {
      words.push_back(pick(rng, aside->words));
      continue;
    }
    if (aside) u = unit(rng);
    if (main.clinical && u < spec.core_share) {
      words.push_back(pick(rng, clinical_core_words()));
      continue;
    }
    if (main.clinical) u = unit(rng);
    if (u < spec.theme_share) {
      words.push_back(pick(rng, main.words));
    } else if (u < spec.theme_share + spec.shared_share) {
      words.push_back(pick(rng, shared_concept_words()));
    } else {
      words.push_back(pick(rng, filler_words()));
    }
  }
  return words;
}

Timestamp random_time(Rng& rng, Day start, int days) {
  const auto secs = static_cast<long>(below(rng, static_cast<std::size_t>(days) * 86400));
  return Timestamp{start} + std::chrono::seconds{secs};
}

void finalize(SyntheticCorpus& c) {
  std::stable_sort(c.records.begin(), c.records.end(),
                   [](const RawRecord& a, const RawRecord& b) { return a.created_at < b.created_at; });
}

}  // namespace

const std::vector<Theme>& clinical_themes() {
  static const std::vector<Theme> themes = {
      theme("ventilation", true,
            {"ventilator", "intubation", "intubated", "sedation", "extubation", "tracheostomy", "peep",
             "airway", "proning", "paralytic", "tidal", "volume", "plateau", "pressure"}),
      theme("oxygenation", true,
            {"oxygen", "saturation", "hypoxia", "hypoxemia", "ards", "bipap", "cpap", "nasal",
             "cannula", "ecmo", "tachypnea", "dyspnea", "pulse", "oximeter"}),
      theme("pneumonia", true,
            {"pneumonia", "infiltrate", "ct", "opacity", "ground", "glass", "bilateral", "xray",
             "consolidation", "effusion", "radiograph", "lobe", "fibrosis", "pleural"}),
      theme("cardiac", true,
            {"troponin", "myocarditis", "arrhythmia", "infarction", "ischemia", "ecg", "echocardiogram",
             "pericarditis", "cardiomyopathy", "tachycardia", "bradycardia", "qtc", "ejection",
             "fraction"}),
      theme("coagulation", true,
            {"thrombosis", "clot", "anticoagulation", "heparin", "embolism", "stroke", "dimer",
             "coagulopathy", "thrombus", "enoxaparin", "bleeding", "platelet", "fibrinogen", "dvt"}),
      theme("antivirals", true,
            {"remdesivir", "hydroxychloroquine", "azithromycin", "antiviral", "favipiravir", "lopinavir",
             "ritonavir", "ivermectin", "interferon", "oseltamivir", "nitazoxanide", "camostat",
             "molnupiravir", "umifenovir"}),
      theme("immunology", true,
            {"dexamethasone", "steroid", "tocilizumab", "interleukin", "cytokine", "storm", "baricitinib",
             "anakinra", "sarilumab", "monoclonal", "convalescent", "plasma", "antibody", "methylprednisolone"}),
      theme("trials", true,
            {"trial", "randomized", "placebo", "cohort", "mortality", "endpoint", "efficacy", "dose",
             "preprint", "arm", "controlled", "hazard", "ratio", "enrollment"}),
      theme("diagnostics", true,
            {"swab", "pcr", "antigen", "serology", "nasopharyngeal", "sensitivity", "specificity",
             "viral", "load", "igg", "igm", "assay", "seroconversion", "specimen"}),
      theme("laboratory", true,
            {"lymphopenia", "ferritin", "crp", "procalcitonin", "lactate", "biomarker", "creatinine",
             "aki", "dialysis", "bilirubin", "transaminase", "leukocytosis", "neutrophil", "ldh"}),
  };
  return themes;
}

const std::vector<Theme>& chatter_themes() {
  static const std::vector<Theme> themes = {
      theme("politics", false,
            {"president", "election", "governor", "senate", "vote", "congress", "policy", "campaign",
             "press", "briefing", "mayor", "party", "debate", "ballot", "poll", "federal", "state",
             "law", "court", "senator"}),
      theme("sport", false,
            {"game", "season", "team", "league", "player", "score", "basketball", "football",
             "stadium", "fan", "coach", "playoff", "baseball", "soccer", "match", "win", "draft",
             "trade", "championship", "golf"}),
      theme("kitchen", false,
            {"recipe", "bread", "baking", "dinner", "kitchen", "sourdough", "coffee", "cheese", "pasta",
             "garlic", "cake", "cookie", "flour", "oven", "soup", "pizza", "wine", "breakfast",
             "lunch", "salad"}),
      theme("money", false,
            {"market", "stock", "job", "unemployment", "business", "economy", "loan", "rent", "bank",
             "stimulus", "check", "tax", "salary", "layoff", "investor", "price", "oil", "retail",
             "debt", "inflation"}),
      theme("school", false,
            {"school", "kid", "teacher", "homeschool", "classroom", "zoom", "parent", "homework",
             "graduation", "student", "college", "exam", "semester", "campus", "lesson", "grade",
             "tuition", "professor", "lecture", "prom"}),
      theme("screen", false,
            {"movie", "netflix", "episode", "music", "album", "concert", "book", "podcast", "song",
             "actor", "tiger", "king", "binge", "trailer", "novel", "guitar", "stream", "comedy",
             "drama", "documentary"}),
      theme("travel", false,
            {"flight", "airport", "travel", "vacation", "beach", "hotel", "cruise", "border", "trip",
             "passport", "airline", "ticket", "refund", "visa", "tourist", "road", "camping", "island",
             "train", "luggage"}),
      theme("home", false,
            {"grocery", "store", "toilet", "paper", "shopping", "walk", "dog", "garden", "house",
             "cat", "puzzle", "haircut", "sanitizer", "delivery", "neighbor", "balcony", "yoga",
             "workout", "bike", "laundry"}),
  };
  return themes;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "today", "people", "think", "time", "week", "day", "really", "good", "need", "know",
      "still", "going", "great", "new", "way", "thing", "feel", "world", "right", "year",
      "work", "life", "help", "hope", "thank", "everyone", "long", "morning", "night", "stay"};
  return words;
}

const std::vector<std::string>& clinical_core_words() {
  static const std::vector<std::string> words = {
      "patient", "icu", "clinical", "admission", "treatment", "ward", "bedside", "discharge",
      "comorbidity", "severe", "acute", "chronic", "management", "protocol", "guideline",
      "presentation", "outcome", "diagnosis", "therapy", "inpatient"};
  return words;
}

const std::vector<std::string>& shared_concept_words() {
  static const std::vector<std::string> words = {"mask", "test", "hospital", "fever", "cough",
                                                 "vaccine", "virus", "symptom", "doctor", "nurse",
                                                 "sick", "health"};
  return words;
}

SyntheticCorpus make_planted_corpus(const SyntheticSpec& spec) {
  if (spec.min_words < 1 || spec.max_words < spec.min_words || spec.relevant_min_words < 1 ||
      spec.relevant_max_words < spec.relevant_min_words)
    throw std::invalid_argument("synthetic: bad word count range");
  Rng rng(spec.seed);
  SyntheticCorpus out;
  std::size_t serial = 0;
  auto emit = [&](const Theme& t, bool hcp) {
    RawRecord r;
    r.id = "tmp" + std::to_string(serial++);
    r.author = make_author(rng, hcp);
    const Theme* aside = nullptr;
    double share = 0.0;
    if (!t.clinical && unit(rng) < spec.mixed_fraction) {
      aside = &pick(rng, clinical_themes());
      share = spec.mixed_clinical_share * unit(rng);
    }
    r.text = render(rng, draw_words(rng, t, spec, aside, share), spec.decorate);
    r.created_at = random_time(rng, spec.start, spec.days);
    out.records.push_back(std::move(r));
    return out.records.back().id;
  };
  std::vector<Theme> chatter = chatter_themes();
  if (spec.chatter_themes > 0 && spec.chatter_themes < chatter.size()) chatter.resize(spec.chatter_themes);
  std::vector<std::pair<std::string, int>> labels;  // 0 relevant, 1 hcp chatter, 2 public chatter
  for (std::size_t i = 0; i < spec.relevant; ++i) labels.emplace_back(emit(pick(rng, clinical_themes()), true), 0);
  for (std::size_t i = 0; i < spec.irrelevant_hcp; ++i) labels.emplace_back(emit(pick(rng, chatter), true), 1);
  for (std::size_t i = 0; i < spec.irrelevant_public; ++i) labels.emplace_back(emit(pick(rng, chatter), false), 2);

  std::unordered_map<std::string, int> label_of(labels.begin(), labels.end());
  finalize(out);
  std::size_t n = 0;
  for (auto& r : out.records) {
    const int label = label_of.at(r.id);
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%06zu", ++n);
    r.id = buf;
    (label == 0 ? out.relevant : out.irrelevant).insert(r.id);
    if (label != 2) out.hcp.insert(r.id);
  }
  return out;
}

void add_burst(SyntheticCorpus& corpus, const BurstSpec& burst, const SyntheticSpec& base) {
  if (burst.keywords.size() < 2) throw std::invalid_argument("burst: needs at least two keywords");
  Rng rng(burst.seed);
  std::size_t n = corpus.records.size();
  for (std::size_t i = 0; i < burst.documents; ++i) {
    const Theme& host = pick(rng, clinical_themes());
    auto words = draw_words(rng, host, base);
    // The planted keywords carry the document.
    for (std::size_t j = 0; j < words.size(); j += 2) words[j] = burst.keywords[(i + j / 2) % burst.keywords.size()];
    RawRecord r;
    char buf[16];
    std::snprintf(buf, sizeof buf, "b%06zu", ++n);
    r.id = buf;
    r.author = make_author(rng, true);
    r.text = render(rng, words, base.decorate);
    r.created_at = random_time(rng, burst.start, burst.days);
    corpus.relevant.insert(r.id);
    corpus.hcp.insert(r.id);
    corpus.records.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < burst.public_documents; ++i) {
    auto words = draw_words(rng, pick(rng, chatter_themes()), base);
    words[below(rng, words.size())] = burst.keywords[i % burst.keywords.size()];
    RawRecord r;
    char buf[16];
    std::snprintf(buf, sizeof buf, "b%06zu", ++n);
    r.id = buf;
    const bool hcp = unit(rng) < 0.5;
    r.author = make_author(rng, hcp);
    r.text = render(rng, words, base.decorate);
    r.created_at = random_time(rng, burst.start, burst.days);
    corpus.irrelevant.insert(r.id);
    if (hcp) corpus.hcp.insert(r.id);
    corpus.records.push_back(std::move(r));
  }
  finalize(corpus);
}

Lexicon synthetic_lexicon() {
  Lexicon lex;
  std::size_t n = 0;
  auto add = [&](std::vector<std::string> trigger, const std::string& type) {
    char cui[16];
    std::snprintf(cui, sizeof cui, "SY%06zu", ++n);
    LexiconEntry e;
    e.preferred_name = join(trigger, " ");
    e.trigger = std::move(trigger);
    e.cui = cui;
    e.semantic_types = {type};
    lex.push_back(std::move(e));
  };
  std::unordered_set<std::string> seen;
  for (const auto& t : clinical_themes()) {
    for (const auto& w : t.words) {
      if (seen.insert(w).second) add({w}, "fndg");
    }
  }
  for (const auto& w : clinical_core_words()) {
    if (seen.insert(w).second) add({w}, "fndg");
  }
  for (const auto& w : shared_concept_words()) {
    if (seen.insert(w).second) add({w}, "fndg");
  }
  for (const auto& w : kBurstWords) {
    if (seen.insert(w).second) add({w}, "sosy");
  }
  add({"ground", "glass", "opacity"}, "fndg");
  add({"cytokine", "storm"}, "patf");
  add({"convalescent", "plasma"}, "topp");
  add({"viral", "load"}, "lbtr");
  return lex;
}

std::string records_jsonl(const std::vector<RawRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["text"] = r.text;
    j["user_name"] = r.author.name;
    j["user_handle"] = r.author.handle;
    j["user_bio"] = r.author.bio;
    j["created_at"] = format_iso8601(r.created_at);
    if (r.thread_id) j["thread_id"] = *r.thread_id;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Corpus records_corpus(const std::vector<RawRecord>& records, std::string label) {
  std::vector<Document> docs;
  docs.reserve(records.size());
  for (const auto& r : records) docs.push_back(to_document(r));
  return Corpus(std::move(label), std::move(docs));
}

}  // namespace clinfilter
