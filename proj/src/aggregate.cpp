#include "citeimpact/aggregate.hpp"

#include "citeimpact/errors.hpp"

#include <algorithm>

namespace citeimpact {

ImpactCategory majority_vote(std::span<const ImpactCategory> labels) {
    if (labels.empty()) {
        throw PreconditionError("majority vote needs at least one label");
    }
    std::array<std::size_t, 3> counts{};
    for (auto l : labels) ++counts[static_cast<int>(l)];
    const auto best = *std::max_element(counts.begin(), counts.end());
    if (std::count(counts.begin(), counts.end(), best) == 1) {
        return static_cast<ImpactCategory>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
    std::vector<ImpactCategory> sorted(labels.begin(), labels.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted[(sorted.size() - 1) / 2];
}

std::map<PaperId, RankSlots> collect_ranks(std::span<const RankingRun> runs) {
    if (runs.size() > static_cast<std::size_t>(kPscRuns)) {
        throw PreconditionError("at most " + std::to_string(kPscRuns) + " runs can be fused");
    }
    std::map<PaperId, RankSlots> out;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (const auto& e : runs[i].entries) {
            auto& slot = out[e.paper_id][i];
            const double r = e.rank;
            if (!slot || r < *slot) slot = r;
        }
    }
    return out;
}

double rrf_score(const RankSlots& ranks, int k) {
    if (k <= 0) throw PreconditionError("RRF constant k must be positive");
    double sum = 0.0;
    std::size_t present = 0;
    for (const auto& r : ranks) {
        if (r) {
            sum += *r;
            ++present;
        }
    }
    if (present == 0) throw PreconditionError("RRF score needs at least one rank");
    const double mean = sum / static_cast<double>(present);

    std::array<double, kPscRuns> filled{};
    for (std::size_t i = 0; i < ranks.size(); ++i) filled[i] = ranks[i].value_or(mean);
    std::sort(filled.begin(), filled.end());
    double score = 0.0;
    for (double r : filled) score += 1.0 / (static_cast<double>(k) + r);
    return score;
}

AggregatedRanking rrf_fuse(std::span<const RankingRun> runs, const CitingPaperBundle& bundle, int k) {
    if (k <= 0) throw PreconditionError("RRF constant k must be positive");
    if (runs.empty()) throw PreconditionError("RRF needs at least one run");
    for (const auto& run : runs) {
        if (run.citing_id != bundle.citing.id) {
            throw PreconditionError("run of " + run.citing_id.str() + " cannot be fused into " +
                                    bundle.citing.id.str());
        }
    }

    const auto ranks = collect_ranks(runs);
    AggregatedRanking out{bundle.citing.id, {}, {}};
    for (const auto& ref : bundle.references) {
        auto it = ranks.find(ref.cited.id);
        if (it == ranks.end()) {
            out.excluded.push_back(ref.cited.id);
            continue;
        }
        const auto found = std::count_if(it->second.begin(), it->second.end(), [](const auto& r) { return r.has_value(); });
        out.entries.push_back({0, ref.cited.id, ref.cited.title, rrf_score(it->second, k), static_cast<int>(found),
                               std::nullopt});
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const AggregatedEntry& a, const AggregatedEntry& b) {
        if (a.rrf_score != b.rrf_score) return a.rrf_score > b.rrf_score;
        return a.paper_id < b.paper_id;
    });
    for (std::size_t i = 0; i < out.entries.size(); ++i) out.entries[i].rank = static_cast<int>(i + 1);
    return out;
}

void assign_majority_labels(AggregatedRanking& ranking, std::span<const RankingRun> runs) {
    for (auto& entry : ranking.entries) {
        std::vector<ImpactCategory> votes;
        for (const auto& run : runs) {
            if (const auto* e = run.find(entry.paper_id)) votes.push_back(e->category);
        }
        entry.predicted_impact = votes.empty() ? std::nullopt : std::optional(majority_vote(votes));
    }
}

std::size_t count_missing(const RankingRun& run, const CitingPaperBundle& bundle) {
    return bundle.size() >= run.entries.size() ? bundle.size() - run.entries.size() : 0;
}

} // namespace citeimpact
