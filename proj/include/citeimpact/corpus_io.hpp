#pragma once

#include "citeimpact/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <vector>

namespace citeimpact {

// Bundle document:
//   {"paperId", "title", "abstract"?, "references": [{"paperId", "title", "abstract"?, "contexts": [..]}]}
nlohmann::ordered_json bundle_to_json(const CitingPaperBundle& bundle);
CitingPaperBundle bundle_from_json(const nlohmann::json& doc);

// A corpus file holds one bundle document per line.
std::vector<CitingPaperBundle> read_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, const std::vector<CitingPaperBundle>& bundles);

// Writes text to path through a temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// Rejects ids that cannot be used verbatim as a file-name stem.
void check_file_stem(const PaperId& id);

} // namespace citeimpact
