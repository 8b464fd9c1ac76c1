#include "citeimpact/eval.hpp"

#include "citeimpact/errors.hpp"
#include "citeimpact/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

namespace citeimpact {

BinaryLabel binarize(ImpactCategory c) {
    return c == ImpactCategory::High ? BinaryLabel::ImpactRevealing : BinaryLabel::Other;
}

namespace {

std::size_t index_of(BinaryLabel l) { return l == BinaryLabel::ImpactRevealing ? 0 : 1; }

} // namespace

double f1_score(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0 ? 2.0 * precision * recall / denom : 0.0;
}

EvalReport report_from_confusion(const ConfusionMatrix& c) {
    EvalReport r;
    r.confusion = c;
    r.n = c[0][0] + c[0][1] + c[1][0] + c[1][1];
    if (r.n == 0) return r;
    const double tp = static_cast<double>(c[0][0]);
    const double fn = static_cast<double>(c[0][1]);
    const double fp = static_cast<double>(c[1][0]);
    const double tn = static_cast<double>(c[1][1]);
    const double n = static_cast<double>(r.n);
    r.accuracy = (tp + tn) / n;
    r.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    r.f1 = f1_score(r.precision, r.recall);
    r.accuracy_se = std::sqrt(r.accuracy * (1.0 - r.accuracy) / n);
    return r;
}

EvalReport metrics(std::span<const BinaryLabel> predicted, std::span<const BinaryLabel> truth) {
    if (predicted.size() != truth.size()) {
        throw PreconditionError("prediction count " + std::to_string(predicted.size()) +
                                " differs from truth count " + std::to_string(truth.size()));
    }
    if (truth.empty()) throw PreconditionError("metrics need at least one item");
    ConfusionMatrix c{};
    for (std::size_t i = 0; i < truth.size(); ++i) ++c[index_of(truth[i])][index_of(predicted[i])];
    return report_from_confusion(c);
}

EvalReport random_baseline(std::span<const BinaryLabel> truth, std::uint64_t seed) {
    if (truth.empty()) throw PreconditionError("random baseline needs at least one item");
    Rng rng(seed);
    std::vector<BinaryLabel> predicted;
    predicted.reserve(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        predicted.push_back((rng.next() >> 63) != 0 ? BinaryLabel::ImpactRevealing : BinaryLabel::Other);
    }
    return metrics(predicted, truth);
}

std::vector<MissingBin> missing_reference_curve(std::span<const RankedPaper> papers, std::size_t bin_width) {
    if (bin_width == 0) throw PreconditionError("bin width must be positive");
    std::map<std::size_t, std::pair<std::size_t, double>> buckets; // bucket -> (papers, sum)
    for (const auto& paper : papers) {
        if (paper.runs.empty()) continue;
        double missing = 0.0;
        for (const auto& run : paper.runs) missing += static_cast<double>(count_missing(run, paper.bundle));
        missing /= static_cast<double>(paper.runs.size());
        auto& b = buckets[paper.bundle.size() / bin_width];
        ++b.first;
        b.second += missing;
    }
    std::vector<MissingBin> out;
    for (const auto& [bucket, acc] : buckets) {
        out.push_back({bucket * bin_width, (bucket + 1) * bin_width, acc.first,
                       acc.second / static_cast<double>(acc.first)});
    }
    return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw PreconditionError("spearman needs equally long inputs");
    if (a.size() < 2) throw PreconditionError("spearman needs at least two items");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0 || sbb == 0) throw PreconditionError("spearman is undefined for a constant ranking");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double spearman(std::span<const PaperId> order_a, std::span<const PaperId> order_b) {
    std::map<PaperId, double> pos_b;
    for (std::size_t i = 0; i < order_b.size(); ++i) {
        if (!pos_b.emplace(order_b[i], static_cast<double>(i + 1)).second) {
            throw PreconditionError("ordering repeats item " + order_b[i].str());
        }
    }
    std::vector<double> ra, rb;
    std::set<PaperId> seen;
    std::string unmatched;
    for (std::size_t i = 0; i < order_a.size(); ++i) {
        if (!seen.insert(order_a[i]).second) throw PreconditionError("ordering repeats item " + order_a[i].str());
        auto it = pos_b.find(order_a[i]);
        if (it == pos_b.end()) {
            unmatched += " " + order_a[i].str();
            continue;
        }
        ra.push_back(static_cast<double>(i + 1));
        rb.push_back(it->second);
    }
    for (const auto& [id, _] : pos_b) {
        if (!seen.count(id)) unmatched += " " + id.str();
    }
    if (!unmatched.empty()) throw PreconditionError("orderings cover different items:" + unmatched);
    return spearman(std::span<const double>(ra), std::span<const double>(rb));
}

nlohmann::ordered_json report_to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["accuracy"] = r.accuracy;
    j["accuracy_se"] = r.accuracy_se;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["confusion"] = {
        {"labels", {"impact-revealing", "other"}},
        {"rows", "actual"},
        {"columns", "predicted"},
        {"matrix", r.confusion},
    };
    return j;
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width, bool right) {
    if (s.size() >= width) return s;
    const std::string fill(width - s.size(), ' ');
    return right ? fill + s : s + fill;
}

} // namespace

std::string format_report_table(std::span<const NamedReport> rows) {
    std::size_t name_w = 6;
    for (const auto& r : rows) name_w = std::max(name_w, r.system.size());
    std::string out = pad("System", name_w, false) + "  " + pad("Acc.", 10, true) + "  " + pad("P", 5, true) + "  " +
                      pad("R", 5, true) + "  " + pad("F1", 5, true) + "\n";
    for (const auto& r : rows) {
        const auto acc = pct(r.report.accuracy) + "±" + pct(r.report.accuracy_se);
        // "±" is two bytes in UTF-8 but one column wide
        out += pad(r.system, name_w, false) + "  " + pad(acc, 11, true) + "  " + pad(pct(r.report.precision), 5, true) +
               "  " + pad(pct(r.report.recall), 5, true) + "  " + pad(pct(r.report.f1), 5, true) + "\n";
    }
    return out;
}

std::string format_confusion(const ConfusionMatrix& c) {
    const std::size_t w = std::max<std::size_t>(
        9, std::max({std::to_string(c[0][0]).size(), std::to_string(c[0][1]).size(),
                     std::to_string(c[1][0]).size(), std::to_string(c[1][1]).size()}));
    std::string out = pad("actual \\ predicted", 18, false) + "  " + pad("impact", w, true) + "  " + pad("other", w, true) + "\n";
    out += pad("impact-revealing", 18, false) + "  " + pad(std::to_string(c[0][0]), w, true) + "  " +
           pad(std::to_string(c[0][1]), w, true) + "\n";
    out += pad("other", 18, false) + "  " + pad(std::to_string(c[1][0]), w, true) + "  " +
           pad(std::to_string(c[1][1]), w, true) + "\n";
    return out;
}

} // namespace citeimpact
