#pragma once

#include "citeimpact/aggregate.hpp"
#include "citeimpact/types.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace citeimpact {

inline constexpr std::size_t kFeatureCount = 8;
inline constexpr std::size_t kParamCount = kFeatureCount + 2;

// Rank-derived features of one reference:
//   [0..2] raw ranks r1..r3, [3..5] r_i / N, [6] population std of the ranks, [7] mean rank.
struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    double operator[](std::size_t i) const { return values[i]; }
};

// Missing ranks take the median of the present ones. N is the length of the
// full reference list. Throws PreconditionError when no rank is present, a
// rank is below 1 or N is zero.
FeatureVector build_features(const RankSlots& ranks, std::size_t n_references);

struct TrainingRow {
    CitationPair pair;
    FeatureVector x;
    ImpactCategory y = ImpactCategory::Low;
};

struct TrainingSet {
    std::vector<TrainingRow> rows;
    std::set<CitationPair> excluded_pairs;
};

// One row per (citing, cited) pair ranked by at least one run and absent from
// held_out; labels by majority vote over the runs, N from the full reference list.
TrainingSet build_training_set(std::span<const RankedPaper> papers, const std::set<CitationPair>& held_out);

// Immediate-threshold ordinal logistic model: score s = w.x, label = number of
// thresholds at or below s.
struct OrdinalModel {
    std::array<double, kFeatureCount> weights{};
    double theta0 = -1.0;
    double theta1 = 1.0;
    double alpha = 1.0;
    bool converged = false;
    double grad_norm = 0.0;
    std::size_t iterations = 0;

    double score(const FeatureVector& x) const;
};

struct LossGradient {
    double loss = 0.0;
    std::array<double, kParamCount> gradient{}; // d/dw (8), d/dtheta0, d/dtheta1
};

// Sum over rows of the immediate-threshold logistic loss plus (alpha/2)|w|^2.
// Thresholds are not penalized. Throws PreconditionError on an empty set or a
// non-finite feature.
LossGradient it_loss_and_gradient(const OrdinalModel& model, std::span<const TrainingRow> rows);
LossGradient it_loss_and_gradient(const OrdinalModel& model, const TrainingSet& set);

struct FitOptions {
    double alpha = 1.0;
    double tol = 1e-6;
    std::size_t max_iter = 1000;
};

// L-BFGS with backtracking line search over (w, theta0, delta), where
// theta1 = theta0 + exp(delta). Starts from w = 0, theta0 = -1, theta1 = 1.
// Stops when the gradient norm in that parametrization drops to tol; otherwise
// returns the last iterate with converged = false.
OrdinalModel fit(const TrainingSet& set, const FitOptions& options = {});

ImpactCategory predict(const OrdinalModel& model, const FeatureVector& x);

// Fills predicted_impact of every fused entry from its per-run ranks.
AggregatedRanking annotate_fused(const OrdinalModel& model, AggregatedRanking ranking,
                                 std::span<const RankingRun> runs, std::size_t n_references);

nlohmann::ordered_json model_to_json(const OrdinalModel& model);
OrdinalModel model_from_json(const nlohmann::json& doc);

} // namespace citeimpact
