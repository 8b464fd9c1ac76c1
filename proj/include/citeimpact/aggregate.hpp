#pragma once

#include "citeimpact/judge.hpp"
#include "citeimpact/types.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace citeimpact {

inline constexpr int kDefaultRrfK = 60;

// A citing paper together with its parsed judge runs.
struct RankedPaper {
    CitingPaperBundle bundle;
    std::vector<RankingRun> runs;
};

// Most frequent label; ties go to the lower median of the multiset (three
// distinct labels give Medium, a 1-1 split gives the lower label).
ImpactCategory majority_vote(std::span<const ImpactCategory> labels);

struct AggregatedEntry {
    int rank = 1;
    PaperId paper_id;
    std::string title;
    double rrf_score = 0.0;
    int num_rankings_found = 0;
    std::optional<ImpactCategory> predicted_impact;
};

struct AggregatedRanking {
    PaperId citing_id;
    std::vector<AggregatedEntry> entries; // rrf_score descending, ties by paper id
    std::vector<PaperId> excluded;        // references ranked by no run
};

// Per-run ranks of every reference that at least one run ranked; slot i holds
// the rank from runs[i].
using RankSlots = std::array<std::optional<double>, kPscRuns>;
std::map<PaperId, RankSlots> collect_ranks(std::span<const RankingRun> runs);

// RRF score over the three run slots. Missing slots take the mean of the
// present ranks. Terms are summed in ascending rank order so the result depends
// only on the multiset of ranks.
double rrf_score(const RankSlots& ranks, int k = kDefaultRrfK);

// Fuses 1..3 runs of the same citing paper by Reciprocal Rank Fusion.
AggregatedRanking rrf_fuse(std::span<const RankingRun> runs, const CitingPaperBundle& bundle,
                           int k = kDefaultRrfK);

// Fills predicted_impact by majority vote over the categories of the runs that ranked each entry.
void assign_majority_labels(AggregatedRanking& ranking, std::span<const RankingRun> runs);

std::size_t count_missing(const RankingRun& run, const CitingPaperBundle& bundle);

} // namespace citeimpact
