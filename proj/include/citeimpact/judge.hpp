#pragma once

#include "citeimpact/prompt.hpp"
#include "citeimpact/types.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace citeimpact {

inline constexpr int kPscRuns = 3;

struct RankedEntry {
    int rank = 1;
    PaperId paper_id;
    std::string title;
    std::string contexts; // excerpts joined by " | "
    std::string reason;
    ImpactCategory category = ImpactCategory::Low;
};

// One parsed judge run. entries are sorted by rank, hold each paper at most
// once and only papers from the bundle.
struct RankingRun {
    PaperId citing_id;
    int run_index = 1; // 1-based
    std::uint64_t seed = 0;
    std::vector<RankedEntry> entries;
    std::vector<std::string> dropped_hallucinations; // ids (or titles) not in the bundle
    std::vector<PaperId> missing;                    // bundle references the run left out

    const RankedEntry* find(const PaperId& id) const;
};

struct JudgeConfig {
    std::string provider = "mock";
    std::string model;
    std::optional<double> temperature; // unset: provider default
    std::optional<double> top_p;
    std::size_t max_context_tokens = 200000;
    std::filesystem::path prompt_template; // empty: built-in template

    // Throws PreconditionError when temperature is outside [0, 2] or top_p outside [0, 1].
    void validate() const;
};

struct CompletionRequest {
    std::string_view prompt;
    const JudgeConfig& config;
    // Offline adapters may read the structured request; HTTP adapters only send the prompt.
    const CitingPaperBundle& bundle;
    std::span<const PaperId> order;
    std::uint64_t seed;
};

// (prompt, config) -> completion text. Implementations must tolerate
// concurrent calls. complete() counts every attempt.
class ProviderAdapter {
public:
    virtual ~ProviderAdapter() = default;

    std::string complete(const CompletionRequest& request) {
        ++calls_;
        return do_complete(request);
    }

    std::size_t calls() const noexcept { return calls_.load(); }

protected:
    virtual std::string do_complete(const CompletionRequest& request) = 0;

private:
    std::atomic<std::size_t> calls_{0};
};

// Fisher-Yates shuffle of the bundle's reference ids driven by seed.
std::vector<PaperId> permute_references(const CitingPaperBundle& bundle, std::uint64_t seed);

// Extracts the first JSON array in raw and validates it against bundle.
// Unknown papers are dropped as hallucinations; a paper ranked twice keeps its
// best rank. Throws ParseError when no array parses or a category is unknown.
RankingRun parse_ranking_response(std::string_view raw, const CitingPaperBundle& bundle,
                                  int run_index = 1, std::uint64_t seed = 0);

// Serializes entries as the per-run ranking array.
std::string ranking_entries_to_json(const std::vector<RankedEntry>& entries);

struct RunFailure {
    int run_index = 0;
    std::uint64_t seed = 0;
    std::string message;
};

struct PscResult {
    std::vector<RankingRun> runs;
    std::vector<RunFailure> failures;
};

// The three run seeds for a corpus: (1, 2, 3) xor master seed.
std::array<std::uint64_t, kPscRuns> default_seeds(std::uint64_t master_seed);

// Three judge runs over independently shuffled reference orders. One
// provider call per run. Failed runs are recorded; throws Error if every run
// failed and PromptTooLongError (before any call) if the prompt exceeds the
// configured budget.
PscResult run_psc(const CitingPaperBundle& bundle, const JudgeConfig& config,
                  const std::array<std::uint64_t, kPscRuns>& seeds, ProviderAdapter& provider,
                  const PromptTemplate& tmpl = PromptTemplate::builtin());

} // namespace citeimpact
