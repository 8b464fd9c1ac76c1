#include "citeimpact/mock_judge.hpp"

#include "citeimpact/random.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace citeimpact {

double hidden_score(const PaperId& id, std::uint64_t score_seed) {
    const auto h = splitmix64(fnv1a64(id.str()) ^ splitmix64(score_seed));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

ImpactCategory category_for_position(std::size_t position, std::size_t count) {
    const auto high = (count * 2 + 9) / 10; // ceil(0.2 * count)
    const auto low = (count * 3 + 9) / 10;  // ceil(0.3 * count)
    if (position < high) return ImpactCategory::High;
    if (position + low >= count) return ImpactCategory::Low;
    return ImpactCategory::Medium;
}

namespace {

struct Scored {
    const ReferenceEntry* ref;
    double score;
};

std::vector<const ReferenceEntry*> order_by_score(const CitingPaperBundle& bundle,
                                                  std::span<const PaperId> permutation,
                                                  const MockJudgeOptions& options) {
    std::vector<Scored> scored;
    scored.reserve(permutation.size());
    const auto n = static_cast<double>(permutation.size());
    for (std::size_t i = 0; i < permutation.size(); ++i) {
        const auto* ref = bundle.find(permutation[i]);
        if (ref == nullptr) continue;
        const double bias = options.position_bias * (1.0 - static_cast<double>(i) / n);
        scored.push_back({ref, hidden_score(ref->cited.id, options.score_seed) + bias});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.ref->cited.id < b.ref->cited.id;
    });
    std::vector<const ReferenceEntry*> out;
    out.reserve(scored.size());
    for (const auto& s : scored) out.push_back(s.ref);
    return out;
}

std::string fake_id(Rng& rng) {
    char buf[41];
    for (int i = 0; i < 40; i += 16) {
        std::snprintf(buf + i, sizeof buf - i, "%016llx", static_cast<unsigned long long>(rng.next()));
    }
    buf[40] = '\0';
    return buf;
}

} // namespace

std::map<PaperId, ImpactCategory> planted_categories(const CitingPaperBundle& bundle, std::uint64_t score_seed) {
    const auto ids = bundle.reference_ids();
    MockJudgeOptions clean;
    clean.score_seed = score_seed;
    const auto ordered = order_by_score(bundle, ids, clean);
    std::map<PaperId, ImpactCategory> out;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        out.emplace(ordered[i]->cited.id, category_for_position(i, ordered.size()));
    }
    return out;
}

std::string mock_judge(const CitingPaperBundle& bundle, std::span<const PaperId> permutation, std::uint64_t seed,
                       const MockJudgeOptions& options) {
    Rng rng(splitmix64(seed ^ fnv1a64(bundle.citing.id.str())));
    const auto ordered = order_by_score(bundle, permutation, options);
    const bool drops_apply = bundle.size() >= options.drop_min_references;

    struct Item {
        const ReferenceEntry* ref; // null for an invented paper
        std::string fake;
    };
    std::vector<Item> kept;
    std::vector<Item> extras;
    for (const auto* ref : ordered) {
        // three draws per reference regardless of rates, so outputs at
        // different noise levels share random numbers
        const double u_drop = rng.unit();
        const double u_dup = rng.unit();
        const double u_hall = rng.unit();
        if (drops_apply && u_drop < options.drop_rate) continue;
        kept.push_back({ref, {}});
        if (u_dup < options.duplicate_rate) extras.push_back({ref, {}});
        if (u_hall < options.hallucination_rate) extras.push_back({nullptr, fake_id(rng)});
    }
    for (auto& extra : extras) {
        const auto pos = static_cast<std::ptrdiff_t>(rng.below(kept.size() + 1));
        kept.insert(kept.begin() + pos, std::move(extra));
    }

    std::vector<RankedEntry> entries;
    entries.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto category = category_for_position(i, kept.size());
        if (kept[i].ref != nullptr) {
            const auto& ref = *kept[i].ref;
            entries.push_back({static_cast<int>(i + 1), ref.cited.id, ref.cited.title, join_contexts(ref.contexts),
                               "synthetic judgment", category});
        } else {
            entries.push_back({static_cast<int>(i + 1), PaperId(kept[i].fake), "Invented reference", "",
                               "synthetic judgment", category});
        }
    }
    return ranking_entries_to_json(entries);
}

} // namespace citeimpact
