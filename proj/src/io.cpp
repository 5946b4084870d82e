#include "clinfilter/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>

namespace clinfilter {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed: " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot write " + path.string() + ": " + ec.message());
}

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("sha256: init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 15];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

nlohmann::ordered_json document_record(const Document& doc) {
  nlohmann::ordered_json j;
  j["id"] = doc.id;
  j["text"] = doc.raw_text;
  j["user_name"] = doc.author.name;
  j["user_handle"] = doc.author.handle;
  j["user_bio"] = doc.author.bio;
  j["created_at"] = format_iso8601(doc.created_at);
  if (doc.thread_id) j["thread_id"] = *doc.thread_id;
  return j;
}

std::string documents_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus) {
    out += document_record(doc).dump();
    out += '\n';
  }
  return out;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

nlohmann::ordered_json topics_digest(const IterationRecord& record) {
  const auto& scores = record.topics.scores;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::size_t> rank(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;

  nlohmann::ordered_json topics = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < scores.size(); ++t) {
    nlohmann::ordered_json words = nlohmann::ordered_json::array();
    for (const auto& w : record.model.top_words[t]) words.push_back({{"word", w.token}, {"weight", w.weight}});
    const bool relevant = std::binary_search(record.topics.relevant.begin(), record.topics.relevant.end(), t);
    topics.push_back({{"topic", t}, {"score", scores[t]}, {"rank", rank[t]}, {"relevant", relevant},
                      {"top_words", std::move(words)}});
  }
  nlohmann::ordered_json j;
  j["iteration"] = record.iteration;
  j["documents"] = record.corpus_size;
  j["cutoff"] = record.topics.cutoff;
  j["r"] = record.topics.r();
  j["topics"] = std::move(topics);
  return j;
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace clinfilter
