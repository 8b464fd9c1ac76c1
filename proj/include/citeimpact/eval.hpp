#pragma once

#include "citeimpact/aggregate.hpp"
#include "citeimpact/types.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace citeimpact {

// High -> impact-revealing; Medium and Low -> other.
BinaryLabel binarize(ImpactCategory c);

// Rows are actual labels, columns predicted; index 0 = impact-revealing, 1 = other.
using ConfusionMatrix = std::array<std::array<std::size_t, 2>, 2>;

struct EvalReport {
    double accuracy = 0.0;
    double precision = 0.0; // impact-revealing class
    double recall = 0.0;
    double f1 = 0.0;        // 0 when precision + recall == 0
    double accuracy_se = 0.0; // sqrt(acc (1 - acc) / n)
    std::size_t n = 0;
    ConfusionMatrix confusion{};
};

EvalReport report_from_confusion(const ConfusionMatrix& confusion);
EvalReport metrics(std::span<const BinaryLabel> predicted, std::span<const BinaryLabel> truth);

// F1 from precision and recall, 0 when both vanish.
double f1_score(double precision, double recall);

// Uniform random predictions from seed, scored against truth.
EvalReport random_baseline(std::span<const BinaryLabel> truth, std::uint64_t seed);

struct MissingBin {
    std::size_t lower = 0; // inclusive reference-list size
    std::size_t upper = 0; // exclusive
    std::size_t papers = 0;
    double mean_missing = 0.0;
};

// Mean number of references a run leaves out, per reference-list-size bucket.
// Each paper contributes the mean of count_missing over its runs; papers
// without runs are skipped. Empty buckets are not reported.
std::vector<MissingBin> missing_reference_curve(std::span<const RankedPaper> papers, std::size_t bin_width = 20);

// Spearman correlation of two score vectors over the same items, computed as
// the Pearson correlation of their average ranks (ties share the mean rank).
double spearman(std::span<const double> a, std::span<const double> b);
// Spearman correlation of two orderings of the same item set.
double spearman(std::span<const PaperId> order_a, std::span<const PaperId> order_b);

nlohmann::ordered_json report_to_json(const EvalReport& report);

struct NamedReport {
    std::string system;
    EvalReport report;
};

// Aligned table with columns Acc, P, R, F1 in percent, one decimal.
std::string format_report_table(std::span<const NamedReport> rows);
std::string format_confusion(const ConfusionMatrix& confusion);

} // namespace citeimpact
