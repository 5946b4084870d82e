#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "clinfilter/corpus.hpp"
#include "clinfilter/pipeline.hpp"

namespace clinfilter {

std::string read_file(const std::filesystem::path& path);  // throws InputError
// Writes through a temporary sibling and renames; throws InputError.
void write_file(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// One JSON object per line with the ingest schema, so outputs can be read
// back with ingest().
nlohmann::ordered_json document_record(const Document& doc);
std::string documents_jsonl(const Corpus& corpus);

std::string csv_field(std::string_view value);

// Topic digest of one iteration: id, score, rank by score, relevant flag,
// top words with weights.
nlohmann::ordered_json topics_digest(const IterationRecord& record);

// Key order preserved, 2-space indent, trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace clinfilter
