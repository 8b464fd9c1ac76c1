#pragma once

#include "citeimpact/types.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace citeimpact {

struct SyntheticCorpusOptions {
    std::size_t bundles = 50;
    std::size_t min_references = 5;
    std::size_t max_references = 60;
    std::size_t max_contexts = 3;
    std::uint64_t seed = 0;
};

// Random citing papers with 40-hex ids, titles and citation contexts.
std::vector<CitingPaperBundle> synthetic_corpus(const SyntheticCorpusOptions& options);

// Binary truth for every (citing, cited) pair: the noise-free mock judge's
// category, binarized. score_seed must match the mock judge's.
std::vector<GroundTruthRecord> planted_ground_truth(const std::vector<CitingPaperBundle>& bundles,
                                                    std::uint64_t score_seed);

} // namespace citeimpact
