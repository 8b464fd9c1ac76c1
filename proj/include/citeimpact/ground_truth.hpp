#pragma once

#include "citeimpact/types.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace citeimpact {

// One line of the human-labeled input file.
struct GroundTruthRow {
    PaperId citing_id;
    PaperId cited_id;
    std::string context_text;
    BinaryLabel label;
    std::size_t line = 0;
};

struct IngestStats {
    std::size_t rows_read = 0;
    std::size_t duplicate_rows = 0;      // byte-identical repeats
    std::size_t repeated_contexts = 0;   // same (citing, cited, trimmed context), different label
    std::size_t merged_contexts = 0;     // extra contexts folded into an existing pair
    std::size_t label_conflicts = 0;     // merged contexts whose label disagreed with the kept one
    std::size_t no_reference_rows = 0;   // pairs of citing papers without API references
    std::size_t citing_papers = 0;
    std::size_t cited_pairs = 0;
};

struct GroundTruthSet {
    std::vector<GroundTruthRecord> records;
    std::vector<CitingPaperBundle> bundles;
    IngestStats stats;
};

// Supplies the reference bundle of a citing paper; nullopt means the API
// returned no references for it.
using BundleSource = std::function<std::optional<CitingPaperBundle>(const PaperId&)>;

// Reads JSON-lines (.jsonl/.json) or delimited (.csv/.tsv, header row) input
// with fields citing_id, cited_id, context_text, label. context_text may be
// absent. Malformed rows raise ParseError naming path and line.
std::vector<GroundTruthRow> read_ground_truth_rows(const std::filesystem::path& path);

// Applies the dataset filters: drops duplicate rows, repeated annotations of the
// same citation context, and citing papers whose reference list is empty; then
// keeps one record per (citing, cited) pair (first occurrence wins).
GroundTruthSet load_ground_truth(const std::filesystem::path& path, const BundleSource& source);
GroundTruthSet filter_ground_truth(const std::vector<GroundTruthRow>& rows, const BundleSource& source);

// Writes records as JSON lines readable by read_ground_truth_rows.
void write_ground_truth(const std::filesystem::path& path, const std::vector<GroundTruthRecord>& records);

} // namespace citeimpact
