#include "citeimpact/synthetic.hpp"

#include "citeimpact/errors.hpp"
#include "citeimpact/eval.hpp"
#include "citeimpact/mock_judge.hpp"
#include "citeimpact/random.hpp"

#include <array>
#include <cstdio>

namespace citeimpact {

namespace {

constexpr std::array<const char*, 12> kWords = {
    "gradient", "federated", "privacy", "graph", "retrieval", "attention",
    "sparse", "ranking", "citation", "inference", "robust", "learning",
};

std::string hex_id(Rng& rng) {
    char buf[49];
    for (int i = 0; i < 48; i += 16) {
        std::snprintf(buf + i, sizeof buf - i, "%016llx", static_cast<unsigned long long>(rng.next()));
    }
    return std::string(buf, 40);
}

std::string phrase(Rng& rng, std::size_t words) {
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        if (i > 0) out += ' ';
        out += kWords[rng.below(kWords.size())];
    }
    return out;
}

} // namespace

std::vector<CitingPaperBundle> synthetic_corpus(const SyntheticCorpusOptions& options) {
    if (options.min_references == 0 || options.max_references < options.min_references) {
        throw PreconditionError("synthetic corpus needs 1 <= min_references <= max_references");
    }
    Rng rng(splitmix64(options.seed));
    std::vector<CitingPaperBundle> out;
    out.reserve(options.bundles);
    for (std::size_t b = 0; b < options.bundles; ++b) {
        CitingPaperBundle bundle{{PaperId(hex_id(rng)), "On " + phrase(rng, 3), std::nullopt}, {}};
        const auto n = options.min_references + rng.below(options.max_references - options.min_references + 1);
        for (std::size_t r = 0; r < n; ++r) {
            ReferenceEntry ref{{PaperId(hex_id(rng)), "A study of " + phrase(rng, 2), std::nullopt}, {}};
            const auto contexts = options.max_contexts == 0 ? 0 : rng.below(options.max_contexts + 1);
            for (std::size_t c = 0; c < contexts; ++c) {
                ref.contexts.emplace_back("We follow [" + std::to_string(r + 1) + "] for " + phrase(rng, 4) + ".");
            }
            bundle.references.push_back(std::move(ref));
        }
        dedup_references(bundle);
        out.push_back(std::move(bundle));
    }
    return out;
}

std::vector<GroundTruthRecord> planted_ground_truth(const std::vector<CitingPaperBundle>& bundles,
                                                    std::uint64_t score_seed) {
    std::vector<GroundTruthRecord> out;
    for (const auto& bundle : bundles) {
        const auto planted = planted_categories(bundle, score_seed);
        for (const auto& ref : bundle.references) {
            out.push_back({bundle.citing.id, ref.cited.id, binarize(planted.at(ref.cited.id))});
        }
    }
    return out;
}

} // namespace citeimpact
