#include "clinfilter/topic_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

namespace clinfilter {
namespace {

constexpr int kModelFormatVersion = 1;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<TopWord> rank_words(std::span<const double> row, const std::vector<std::string>& vocab,
                                int n) {
  std::vector<std::uint32_t> order(row.size());
  std::iota(order.begin(), order.end(), 0u);
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(n), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      if (row[a] != row[b]) return row[a] > row[b];
                      return a < b;
                    });
  std::vector<TopWord> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({vocab[order[i]], row[order[i]]});
  return out;
}

// One Gibbs chain. Counts are dense: doc-topic M x K, word-topic V x K.
class GibbsSampler {
 public:
  GibbsSampler(std::vector<std::vector<std::uint32_t>> docs, std::size_t vocab_size,
               const LdaConfig& cfg)
      : docs_(std::move(docs)),
        k_(static_cast<std::size_t>(cfg.k)),
        v_(vocab_size),
        alpha_(cfg.alpha_per_topic()),
        beta_(cfg.beta),
        vbeta_(static_cast<double>(vocab_size) * cfg.beta),
        rng_(cfg.seed),
        doc_topic_(docs_.size() * k_, 0),
        word_topic_(v_ * k_, 0),
        topic_total_(k_, 0),
        denom_inv_(k_),
        cdf_(k_) {
    z_.resize(docs_.size());
    for (std::size_t m = 0; m < docs_.size(); ++m) {
      z_[m].resize(docs_[m].size());
      for (std::size_t i = 0; i < docs_[m].size(); ++i) {
        auto t = static_cast<std::uint16_t>(
            std::min<std::size_t>(k_ - 1, static_cast<std::size_t>(uniform01(rng_) * k_)));
        z_[m][i] = t;
        add(m, docs_[m][i], t, +1);
      }
    }
    for (std::size_t t = 0; t < k_; ++t) refresh(t);
  }

  void sweep() {
    for (std::size_t m = 0; m < docs_.size(); ++m) {
      const auto& words = docs_[m];
      std::uint32_t* dt = &doc_topic_[m * k_];
      for (std::size_t i = 0; i < words.size(); ++i) {
        const std::uint32_t w = words[i];
        const std::uint32_t* wt = &word_topic_[static_cast<std::size_t>(w) * k_];
        std::uint16_t t = z_[m][i];
        add(m, w, t, -1);
        refresh(t);

        double total = 0.0;
        for (std::size_t s = 0; s < k_; ++s) {
          total += (dt[s] + alpha_) * (wt[s] + beta_) * denom_inv_[s];
          cdf_[s] = total;
        }
        const double u = uniform01(rng_) * total;
        std::size_t s = 0;
        while (s + 1 < k_ && cdf_[s] <= u) ++s;
        t = static_cast<std::uint16_t>(s);

        z_[m][i] = t;
        add(m, w, t, +1);
        refresh(t);
      }
    }
  }

  void export_to(TopicModel& model) const {
    const std::size_t M = docs_.size();
    model.theta = Matrix(k_, M);
    const double kalpha = static_cast<double>(k_) * alpha_;
    for (std::size_t m = 0; m < M; ++m) {
      const double n = static_cast<double>(docs_[m].size());
      for (std::size_t t = 0; t < k_; ++t)
        model.theta(t, m) = (doc_topic_[m * k_ + t] + alpha_) / (n + kalpha);
    }
    model.phi = Matrix(k_, v_);
    for (std::size_t t = 0; t < k_; ++t) {
      const double denom = topic_total_[t] + vbeta_;
      for (std::size_t w = 0; w < v_; ++w) model.phi(t, w) = (word_topic_[w * k_ + t] + beta_) / denom;
    }
    model.assignments = z_;
  }

 private:
  void add(std::size_t m, std::uint32_t w, std::uint16_t t, int delta) {
    doc_topic_[m * k_ + t] += static_cast<std::uint32_t>(delta);
    word_topic_[static_cast<std::size_t>(w) * k_ + t] += static_cast<std::uint32_t>(delta);
    topic_total_[t] += static_cast<std::uint64_t>(static_cast<std::int64_t>(delta));
  }
  void refresh(std::size_t t) { denom_inv_[t] = 1.0 / (static_cast<double>(topic_total_[t]) + vbeta_); }

  std::vector<std::vector<std::uint32_t>> docs_;
  std::size_t k_, v_;
  double alpha_, beta_, vbeta_;
  std::mt19937_64 rng_;
  std::vector<std::uint32_t> doc_topic_;
  std::vector<std::uint32_t> word_topic_;
  std::vector<std::uint64_t> topic_total_;
  std::vector<double> denom_inv_;
  std::vector<double> cdf_;
  std::vector<std::vector<std::uint16_t>> z_;
};

}  // namespace

void LdaConfig::validate() const {
  if (k < 2) throw std::invalid_argument("lda: k must be >= 2");
  if (k > std::numeric_limits<std::uint16_t>::max()) throw std::invalid_argument("lda: k too large");
  if (iterations < 1) throw std::invalid_argument("lda: iterations must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("lda: beta must be positive");
  if (!(alpha_per_topic() > 0.0)) throw std::invalid_argument("lda: alpha must be positive");
  if (top_words < 1) throw std::invalid_argument("lda: top_words must be >= 1");
}

bool TopicModel::same_state(const TopicModel& o) const {
  return config == o.config && vocab == o.vocab && doc_ids == o.doc_ids && theta == o.theta &&
         phi == o.phi && assignments == o.assignments && top_words == o.top_words;
}

TopicModel fit(const Corpus& corpus, const LdaConfig& config) {
  config.validate();
  if (corpus.empty()) throw std::invalid_argument("fit: empty corpus");

  TopicModel model;
  model.config = config;
  model.vocab = corpus.vocab().tokens();
  model.doc_ids = corpus.ids();
  if (static_cast<std::size_t>(config.k) > model.vocab.size()) {
    model.warnings.push_back("k=" + std::to_string(config.k) + " exceeds vocabulary size " +
                             std::to_string(model.vocab.size()));
  }

  std::vector<std::vector<std::uint32_t>> docs(corpus.size());
  for (std::size_t m = 0; m < corpus.size(); ++m) docs[m] = corpus.word_ids(m);

  GibbsSampler sampler(std::move(docs), model.vocab.size(), config);
  for (int it = 0; it < config.iterations; ++it) sampler.sweep();
  sampler.export_to(model);

  model.top_words.resize(static_cast<std::size_t>(config.k));
  for (std::size_t t = 0; t < model.top_words.size(); ++t)
    model.top_words[t] = rank_words(model.phi.row(t), model.vocab, config.top_words);
  return model;
}

double doc_topic_mass(const TopicModel& model, std::size_t doc,
                      std::span<const std::size_t> topics) {
  if (doc >= model.num_docs()) throw std::out_of_range("doc_topic_mass: document index out of range");
  double mass = 0.0;
  for (std::size_t t : topics) {
    if (t >= model.num_topics()) throw std::out_of_range("doc_topic_mass: topic index out of range");
    mass += model.theta(t, doc);
  }
  return mass;
}

CoherenceResult umass_coherence(const TopicModel& model, const Corpus& corpus, int top_n) {
  if (top_n < 1 || top_n > model.config.top_words)
    throw std::invalid_argument("umass_coherence: top_n must be in [1, top_words]");
  const std::size_t K = model.top_words.size();

  // Postings (sorted document indices) for every word that is a top word.
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& words : model.top_words) {
    for (std::size_t i = 0; i < words.size() && i < static_cast<std::size_t>(top_n); ++i)
      slot.try_emplace(words[i].token, slot.size());
  }
  std::vector<std::vector<std::uint32_t>> postings(slot.size());
  for (std::size_t m = 0; m < corpus.size(); ++m) {
    for (const auto& tok : corpus[m].tokens) {
      auto it = slot.find(tok);
      if (it == slot.end()) continue;
      auto& list = postings[it->second];
      if (list.empty() || list.back() != m) list.push_back(static_cast<std::uint32_t>(m));
    }
  }

  CoherenceResult result;
  result.scores.assign(K, 0.0);
  std::vector<char> missing(K, 0);
  const auto nk = static_cast<std::ptrdiff_t>(K);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ti = 0; ti < nk; ++ti) {
    const auto t = static_cast<std::size_t>(ti);
    const auto& words = model.top_words[t];
    const std::size_t n = std::min(words.size(), static_cast<std::size_t>(top_n));
    double score = 0.0;
    for (std::size_t m = 1; m < n; ++m) {
      const auto& pm = postings[slot.at(words[m].token)];
      for (std::size_t l = 0; l < m; ++l) {
        const auto& pl = postings[slot.at(words[l].token)];
        std::size_t co = 0;
        for (std::size_t a = 0, b = 0; a < pm.size() && b < pl.size();) {
          if (pm[a] < pl[b]) ++a;
          else if (pl[b] < pm[a]) ++b;
          else { ++co; ++a; ++b; }
        }
        double dl = static_cast<double>(pl.size());
        if (pl.empty()) {
          dl = 1.0;
          missing[t] = 1;
        }
        score += std::log((static_cast<double>(co) + 1.0) / dl);
      }
    }
    result.scores[t] = score;
  }
  result.missing_word.assign(missing.begin(), missing.end());
  return result;
}

nlohmann::json model_to_json(const TopicModel& model) {
  using nlohmann::json;
  json j;
  j["format"] = "clinfilter-topic-model";
  j["version"] = kModelFormatVersion;
  j["config"] = {{"k", model.config.k},
                 {"alpha", model.config.alpha},
                 {"beta", model.config.beta},
                 {"iterations", model.config.iterations},
                 {"seed", model.config.seed},
                 {"top_words", model.config.top_words}};
  j["vocab"] = model.vocab;
  j["doc_ids"] = model.doc_ids;
  auto rows = [](const Matrix& mat) {
    json out = json::array();
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      auto row = mat.row(r);
      out.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return out;
  };
  j["theta"] = rows(model.theta);
  j["phi"] = rows(model.phi);
  j["assignments"] = model.assignments;
  json tops = json::array();
  for (const auto& words : model.top_words) {
    json list = json::array();
    for (const auto& w : words) list.push_back({{"token", w.token}, {"weight", w.weight}});
    tops.push_back(std::move(list));
  }
  j["top_words"] = std::move(tops);
  return j;
}

TopicModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "clinfilter-topic-model")
    throw InputError("not a topic model file");
  if (j.value("version", 0) != kModelFormatVersion)
    throw InputError("unsupported topic model version");
  TopicModel model;
  const auto& c = j.at("config");
  model.config.k = c.at("k").get<int>();
  model.config.alpha = c.at("alpha").get<double>();
  model.config.beta = c.at("beta").get<double>();
  model.config.iterations = c.at("iterations").get<int>();
  model.config.seed = c.at("seed").get<std::uint64_t>();
  model.config.top_words = c.at("top_words").get<int>();
  model.vocab = j.at("vocab").get<std::vector<std::string>>();
  model.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
  auto matrix = [](const nlohmann::json& rows, std::size_t cols) {
    Matrix mat(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != cols) throw InputError("topic model matrix has ragged rows");
      for (std::size_t col = 0; col < cols; ++col) mat(r, col) = row[col].get<double>();
    }
    return mat;
  };
  model.theta = matrix(j.at("theta"), model.doc_ids.size());
  model.phi = matrix(j.at("phi"), model.vocab.size());
  model.assignments = j.at("assignments").get<std::vector<std::vector<std::uint16_t>>>();
  for (const auto& list : j.at("top_words")) {
    std::vector<TopWord> words;
    for (const auto& w : list) words.push_back({w.at("token").get<std::string>(), w.at("weight").get<double>()});
    model.top_words.push_back(std::move(words));
  }
  return model;
}

void save_model(const TopicModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model: " + path.string());
  out << model_to_json(model).dump() << '\n';
}

TopicModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read model: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InputError("model file is not valid JSON: " + path.string());
  return model_from_json(j);
}

}  // namespace clinfilter
