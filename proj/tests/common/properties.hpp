#pragma once

// Randomized property checks shared by the unit tests and the acceptance runner.
// Each returns the number of violating instances.

#include "citeimpact/aggregate.hpp"
#include "citeimpact/ordreg.hpp"
#include "citeimpact/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace props {

using namespace citeimpact;

inline CitingPaperBundle bundle_of(std::size_t n) {
    CitingPaperBundle b{{PaperId("citing"), "citing", std::nullopt}, {}};
    for (std::size_t i = 0; i < n; ++i) b.references.push_back({{PaperId("p" + std::to_string(i)), "t", std::nullopt}, {}});
    return b;
}

// A run ranking a random subset of the bundle (each reference kept with
// probability keep), ranks 1..m in random order.
inline RankingRun random_run(Rng& rng, const CitingPaperBundle& b, int index, double keep) {
    RankingRun run{b.citing.id, index, 0, {}, {}, {}};
    std::vector<PaperId> ids = b.reference_ids();
    for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
    int rank = 1;
    for (const auto& id : ids) {
        if (!rng.bernoulli(keep)) continue;
        run.entries.push_back({rank++, id, "t", "", "", static_cast<ImpactCategory>(rng.below(3))});
    }
    return run;
}

inline std::vector<RankingRun> random_runs(Rng& rng, const CitingPaperBundle& b, std::size_t count, double keep) {
    std::vector<RankingRun> runs;
    for (std::size_t i = 0; i < count; ++i) runs.push_back(random_run(rng, b, static_cast<int>(i + 1), keep));
    return runs;
}

inline bool same_fused(const AggregatedRanking& a, const AggregatedRanking& b) {
    if (a.entries.size() != b.entries.size() || a.excluded != b.excluded) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        const auto& x = a.entries[i];
        const auto& y = b.entries[i];
        if (x.rank != y.rank || x.paper_id != y.paper_id || x.rrf_score != y.rrf_score ||
            x.num_rankings_found != y.num_rankings_found)
            return false;
    }
    return true;
}

// Fused output is identical for every order in which the runs are supplied.
inline std::size_t run_order_violations(std::size_t trials, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto b = bundle_of(1 + rng.below(40));
        auto runs = random_runs(rng, b, 3, 0.6 + 0.4 * rng.unit());
        if (runs[0].entries.empty() && runs[1].entries.empty() && runs[2].entries.empty()) runs[0] = random_run(rng, b, 1, 1.0);
        const auto base = rrf_fuse(runs, b);
        std::vector<int> perm{0, 1, 2};
        bool ok = true;
        while (std::next_permutation(perm.begin(), perm.end())) {
            std::vector<RankingRun> shuffled{runs[perm[0]], runs[perm[1]], runs[perm[2]]};
            ok = ok && same_fused(base, rrf_fuse(shuffled, b));
        }
        if (!ok) ++bad;
    }
    return bad;
}

inline double score_of(const AggregatedRanking& fused, const PaperId& id) {
    for (const auto& e : fused.entries)
        if (e.paper_id == id) return e.rrf_score;
    return -1.0;
}

// Lowering one present rank of a reference never lowers its score, both on
// raw slots and through the fused file.
inline std::size_t monotonicity_violations(std::size_t trials, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto b = bundle_of(2 + rng.below(40));
        auto runs = random_runs(rng, b, 3, 0.5 + 0.5 * rng.unit());
        auto r = rng.below(3);
        if (runs[r].entries.empty()) runs[r] = random_run(rng, b, static_cast<int>(r + 1), 1.0);
        auto& entry = runs[r].entries[rng.below(runs[r].entries.size())];
        const auto id = entry.paper_id;
        const double before = score_of(rrf_fuse(runs, b), id);
        entry.rank = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(entry.rank)));
        const double after = score_of(rrf_fuse(runs, b), id);

        RankSlots slots;
        for (auto& s : slots)
            if (rng.bernoulli(0.7)) s = 1.0 + static_cast<double>(rng.below(100));
        slots[rng.below(3)] = 1.0 + static_cast<double>(rng.below(100));
        const double s0 = rrf_score(slots);
        std::size_t which = rng.below(3);
        while (!slots[which]) which = (which + 1) % 3;
        slots[which] = 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(*slots[which])));
        if (after < before || rrf_score(slots) < s0) ++bad;
    }
    return bad;
}

// One complete run: fused order equals the run's order.
inline std::size_t single_run_violations(std::size_t trials, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto b = bundle_of(1 + rng.below(60));
        std::vector<RankingRun> runs{random_run(rng, b, 1, 1.0)};
        auto fused = rrf_fuse(runs, b);
        bool ok = fused.entries.size() == runs[0].entries.size() && fused.excluded.empty();
        for (std::size_t i = 0; ok && i < fused.entries.size(); ++i) ok = fused.entries[i].paper_id == runs[0].entries[i].paper_id;
        if (!ok) ++bad;
    }
    return bad;
}

// References no run ranked are excluded; everything else appears exactly once
// with a score in (0, 3/(k+1)].
inline std::size_t exclusion_violations(std::size_t trials, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto b = bundle_of(1 + rng.below(40));
        auto runs = random_runs(rng, b, 1 + rng.below(3), 0.2 + 0.6 * rng.unit());
        auto fused = rrf_fuse(runs, b);
        bool ok = fused.entries.size() + fused.excluded.size() == b.size();
        for (const auto& id : b.reference_ids()) {
            bool ranked = false;
            for (const auto& run : runs) ranked = ranked || run.find(id) != nullptr;
            const bool listed = std::any_of(fused.entries.begin(), fused.entries.end(), [&](const auto& e) { return e.paper_id == id; });
            const bool excluded = std::find(fused.excluded.begin(), fused.excluded.end(), id) != fused.excluded.end();
            ok = ok && ranked == listed && ranked != excluded;
        }
        for (const auto& e : fused.entries) ok = ok && e.rrf_score > 0.0 && e.rrf_score <= 3.0 / 61.0;
        if (!ok) ++bad;
    }
    return bad;
}

inline std::vector<TrainingRow> random_rows(Rng& rng, std::size_t count) {
    std::vector<TrainingRow> rows;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t n = 1 + rng.below(30);
        RankSlots slots;
        for (auto& s : slots)
            if (rng.bernoulli(0.8)) s = 1.0 + static_cast<double>(rng.below(n));
        if (!slots[0] && !slots[1] && !slots[2]) slots[0] = 1.0;
        rows.push_back({{PaperId("c"), PaperId("r" + std::to_string(i))}, build_features(slots, n),
                        static_cast<ImpactCategory>(rng.below(3))});
    }
    return rows;
}

inline OrdinalModel random_model(Rng& rng, double alpha) {
    OrdinalModel m;
    for (auto& w : m.weights) w = 0.4 * (rng.unit() - 0.5);
    m.theta0 = 4.0 * (rng.unit() - 0.5);
    m.theta1 = m.theta0 + 3.0 * rng.unit();
    m.alpha = alpha;
    return m;
}

inline double& param(OrdinalModel& m, std::size_t i) {
    if (i < kFeatureCount) return m.weights[i];
    return i == kFeatureCount ? m.theta0 : m.theta1;
}

// Largest |analytic - central difference| / max(1, |analytic|, |numeric|) over
// all parameters of trials random 20-row instances.
inline double max_gradient_error(std::size_t trials, std::uint64_t seed, double h = 1e-5) {
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto rows = random_rows(rng, 20);
        auto model = random_model(rng, rng.unit() * 2.0);
        const auto g = it_loss_and_gradient(model, rows).gradient;
        for (std::size_t i = 0; i < kParamCount; ++i) {
            auto plus = model;
            auto minus = model;
            param(plus, i) += h;
            param(minus, i) -= h;
            const double numeric =
                (it_loss_and_gradient(plus, rows).loss - it_loss_and_gradient(minus, rows).loss) / (2 * h);
            const double err = std::abs(g[i] - numeric) / std::max({1.0, std::abs(g[i]), std::abs(numeric)});
            worst = std::max(worst, err);
        }
    }
    return worst;
}

// Midpoint loss exceeding the endpoint average by more than 1e-9.
inline std::size_t convexity_violations(std::size_t trials, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto rows = random_rows(rng, 20);
        const double alpha = rng.unit() * 2.0;
        auto a = random_model(rng, alpha);
        auto b = random_model(rng, alpha);
        // thresholds may cross; the loss is convex in the raw parameters either way
        if (rng.bernoulli(0.5)) std::swap(b.theta0, b.theta1);
        OrdinalModel mid = a;
        for (std::size_t i = 0; i < kParamCount; ++i) param(mid, i) = 0.5 * (param(a, i) + param(b, i));
        const double la = it_loss_and_gradient(a, rows).loss;
        const double lb = it_loss_and_gradient(b, rows).loss;
        if (it_loss_and_gradient(mid, rows).loss > 0.5 * (la + lb) + 1e-9) ++bad;
    }
    return bad;
}

} // namespace props
