#pragma once

#include "citeimpact/aggregate.hpp"
#include "citeimpact/judge.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace citeimpact {

// <dir>/<citing_id>.run<k>.json
std::filesystem::path run_file_path(const std::filesystem::path& dir, const PaperId& citing, int run_index);
// <dir>/<citing_id>.fused.json
std::filesystem::path fused_file_path(const std::filesystem::path& dir, const PaperId& citing);

void write_run_file(const std::filesystem::path& dir, const RankingRun& run);

// Reads every existing run file of bundle's citing paper (run1..run3),
// re-validating each against the bundle.
std::vector<RankingRun> read_run_files(const std::filesystem::path& dir, const CitingPaperBundle& bundle);

// Fused array: rank, paperId, title, rrf_score, num_rankings_found, predicted_impact.
std::string fused_to_json(const AggregatedRanking& ranking);
AggregatedRanking fused_from_json(const PaperId& citing, std::string_view text);

void write_fused_file(const std::filesystem::path& dir, const AggregatedRanking& ranking);
AggregatedRanking read_fused_file(const std::filesystem::path& dir, const PaperId& citing);

} // namespace citeimpact
