#pragma once

#include "citeimpact/aggregate.hpp"
#include "citeimpact/eval.hpp"
#include "citeimpact/judge.hpp"
#include "citeimpact/ordreg.hpp"
#include "citeimpact/prompt.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace citeimpact {

enum class AggregationMode { Majority, OrdReg };

std::string_view to_string(AggregationMode mode);
std::optional<AggregationMode> parse_aggregation_mode(std::string_view text);

struct RankOptions {
    JudgeConfig judge;
    std::uint64_t master_seed = 0;
    unsigned jobs = 1;
};

struct RankSummary {
    std::size_t papers = 0;
    std::size_t run_files = 0;
    std::size_t failed_runs = 0;
    std::size_t failed_papers = 0; // no run succeeded or the prompt did not fit
    std::size_t provider_calls = 0;
};

// Runs PSC over every bundle and writes <id>.run<k>.json files plus
// rank_manifest.json and failures.json into out_dir. Output bytes do not depend
// on jobs.
RankSummary rank_corpus(const std::vector<CitingPaperBundle>& bundles, ProviderAdapter& provider,
                        const RankOptions& options, const PromptTemplate& tmpl, const std::filesystem::path& out_dir);

// Pairs each bundle with the run files found in runs_dir (possibly none).
std::vector<RankedPaper> load_ranked_corpus(const std::vector<CitingPaperBundle>& bundles,
                                            const std::filesystem::path& runs_dir);

struct AggregateSummary {
    std::size_t fused_files = 0;
    std::vector<PaperId> skipped; // no run files
};

// Writes <id>.fused.json for every paper with at least one run. Ordinal mode
// requires a model.
AggregateSummary aggregate_corpus(const std::vector<RankedPaper>& papers, AggregationMode mode,
                                  const OrdinalModel* model, int k, const std::filesystem::path& out_dir);

struct TrainResult {
    OrdinalModel model;
    std::size_t rows = 0;
    std::size_t excluded_pairs = 0;
};

TrainResult train_model(const std::vector<RankedPaper>& papers, const std::set<CitationPair>& held_out,
                        const FitOptions& options = {});

// Predicted category of every fused entry found in fused_dir for the given citing papers.
std::map<CitationPair, ImpactCategory> load_fused_predictions(const std::vector<PaperId>& citing_ids,
                                                             const std::filesystem::path& fused_dir);

struct Evaluation {
    EvalReport report;
    std::vector<CitationPair> unmatched; // truth pairs without a prediction
};

// Scores predictions against truth. Unmatched truth pairs raise Error listing
// them unless missing_as_other is set, in which case they count as "other".
Evaluation evaluate_predictions(const std::map<CitationPair, ImpactCategory>& predictions,
                                const std::vector<GroundTruthRecord>& truth, bool missing_as_other = false);

// Writes <stem>.json and <stem>.txt (table plus confusion grid).
void write_report(const std::filesystem::path& out_dir, const std::string& stem, const std::string& system,
                  const EvalReport& report);

} // namespace citeimpact
