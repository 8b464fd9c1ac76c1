#include "citeimpact/ordreg.hpp"

#include "citeimpact/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace citeimpact {

FeatureVector build_features(const RankSlots& ranks, std::size_t n_references) {
    if (n_references == 0) throw PreconditionError("reference count N must be positive");
    std::vector<double> present;
    for (const auto& r : ranks) {
        if (!r) continue;
        if (!(*r >= 1.0) || !std::isfinite(*r)) throw PreconditionError("ranks must be finite and >= 1");
        present.push_back(*r);
    }
    if (present.empty()) throw PreconditionError("at least one rank is required");

    std::sort(present.begin(), present.end());
    const auto m = present.size();
    const double median = m % 2 == 1 ? present[m / 2] : (present[m / 2 - 1] + present[m / 2]) / 2.0;

    std::array<double, kPscRuns> filled{};
    for (std::size_t i = 0; i < filled.size(); ++i) filled[i] = ranks[i].value_or(median);

    const double n = static_cast<double>(n_references);
    const double mean = (filled[0] + filled[1] + filled[2]) / 3.0;
    double var = 0.0;
    for (double r : filled) var += (r - mean) * (r - mean);
    var /= 3.0;

    return {{filled[0], filled[1], filled[2], filled[0] / n, filled[1] / n, filled[2] / n, std::sqrt(var), mean}};
}

TrainingSet build_training_set(std::span<const RankedPaper> papers, const std::set<CitationPair>& held_out) {
    TrainingSet set;
    for (const auto& paper : papers) {
        if (paper.runs.empty()) {
            throw PreconditionError("citing paper " + paper.bundle.citing.id.str() + " has no successful run");
        }
        const auto ranks = collect_ranks(paper.runs);
        for (const auto& ref : paper.bundle.references) {
            auto it = ranks.find(ref.cited.id);
            if (it == ranks.end()) continue;
            CitationPair pair{paper.bundle.citing.id, ref.cited.id};
            if (held_out.count(pair)) {
                set.excluded_pairs.insert(std::move(pair));
                continue;
            }
            std::vector<ImpactCategory> votes;
            for (const auto& run : paper.runs) {
                if (const auto* e = run.find(ref.cited.id)) votes.push_back(e->category);
            }
            set.rows.push_back({std::move(pair), build_features(it->second, paper.bundle.size()), majority_vote(votes)});
        }
    }
    return set;
}

double OrdinalModel::score(const FeatureVector& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) s += weights[i] * x[i];
    return s;
}

namespace {

// log(1 + exp(-z))
double surrogate(double z) {
    return z >= 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// d/dz log(1 + exp(-z)) = -1 / (1 + exp(z))
double surrogate_slope(double z) {
    if (z >= 0) {
        const double e = std::exp(-z);
        return -e / (1.0 + e);
    }
    return -1.0 / (1.0 + std::exp(z));
}

} // namespace

LossGradient it_loss_and_gradient(const OrdinalModel& model, std::span<const TrainingRow> rows) {
    if (rows.empty()) throw PreconditionError("loss needs a non-empty training set");
    LossGradient out;
    auto& g = out.gradient;
    const double t0 = model.theta0;
    const double t1 = model.theta1;

    for (const auto& row : rows) {
        for (double v : row.x.values) {
            if (!std::isfinite(v)) throw PreconditionError("non-finite feature in training row");
        }
        const double s = model.score(row.x);
        double ds = 0.0;
        switch (row.y) {
        case ImpactCategory::Low: {
            const double z = t0 - s;
            out.loss += surrogate(z);
            const double d = surrogate_slope(z);
            ds -= d;
            g[kFeatureCount] += d;
            break;
        }
        case ImpactCategory::Medium: {
            const double z0 = s - t0;
            const double z1 = t1 - s;
            out.loss += surrogate(z0) + surrogate(z1);
            const double d0 = surrogate_slope(z0);
            const double d1 = surrogate_slope(z1);
            ds += d0 - d1;
            g[kFeatureCount] -= d0;
            g[kFeatureCount + 1] += d1;
            break;
        }
        case ImpactCategory::High: {
            const double z = s - t1;
            out.loss += surrogate(z);
            const double d = surrogate_slope(z);
            ds += d;
            g[kFeatureCount + 1] -= d;
            break;
        }
        }
        for (std::size_t i = 0; i < kFeatureCount; ++i) g[i] += ds * row.x[i];
    }

    double penalty = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        penalty += model.weights[i] * model.weights[i];
        g[i] += model.alpha * model.weights[i];
    }
    out.loss += 0.5 * model.alpha * penalty;
    return out;
}

LossGradient it_loss_and_gradient(const OrdinalModel& model, const TrainingSet& set) {
    return it_loss_and_gradient(model, std::span<const TrainingRow>(set.rows));
}

namespace {

using Params = std::array<double, kParamCount>; // w, theta0, delta

OrdinalModel unpack(const Params& u, double alpha) {
    OrdinalModel m;
    std::copy_n(u.begin(), kFeatureCount, m.weights.begin());
    m.theta0 = u[kFeatureCount];
    m.theta1 = u[kFeatureCount] + std::exp(u[kFeatureCount + 1]);
    m.alpha = alpha;
    return m;
}

struct Eval {
    double loss;
    Params grad;
};

Eval evaluate(const Params& u, std::span<const TrainingRow> rows, double alpha) {
    const auto lg = it_loss_and_gradient(unpack(u, alpha), rows);
    Eval e{lg.loss, {}};
    std::copy_n(lg.gradient.begin(), kFeatureCount, e.grad.begin());
    const double d0 = lg.gradient[kFeatureCount];
    const double d1 = lg.gradient[kFeatureCount + 1];
    e.grad[kFeatureCount] = d0 + d1;
    e.grad[kFeatureCount + 1] = d1 * std::exp(u[kFeatureCount + 1]);
    return e;
}

double dot(const Params& a, const Params& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kParamCount; ++i) s += a[i] * b[i];
    return s;
}

double norm(const Params& a) { return std::sqrt(dot(a, a)); }

} // namespace

OrdinalModel fit(const TrainingSet& set, const FitOptions& options) {
    if (set.rows.empty()) throw PreconditionError("cannot fit an empty training set");
    std::set<ImpactCategory> labels;
    for (const auto& r : set.rows) labels.insert(r.y);
    if (labels.size() < 2) throw PreconditionError("fit needs at least two distinct labels");
    if (options.alpha < 0) throw PreconditionError("alpha must be non-negative");

    constexpr std::size_t kMemory = 10;
    constexpr double kArmijo = 1e-4;
    const std::span<const TrainingRow> rows(set.rows);

    Params u{};
    u[kFeatureCount] = -1.0;
    u[kFeatureCount + 1] = std::log(2.0);
    Eval cur = evaluate(u, rows, options.alpha);

    std::deque<std::pair<Params, Params>> history; // (s, y) pairs
    std::size_t iter = 0;
    bool converged = norm(cur.grad) <= options.tol;

    while (!converged && iter < options.max_iter) {
        // two-loop recursion
        Params q = cur.grad;
        std::vector<double> alphas(history.size());
        for (std::size_t i = history.size(); i-- > 0;) {
            const auto& [s, y] = history[i];
            alphas[i] = dot(s, q) / dot(y, s);
            for (std::size_t j = 0; j < kParamCount; ++j) q[j] -= alphas[i] * y[j];
        }
        double gamma = 1.0;
        if (!history.empty()) {
            const auto& [s, y] = history.back();
            gamma = dot(s, y) / dot(y, y);
        } else {
            gamma = 1.0 / std::max(1.0, norm(cur.grad));
        }
        for (auto& v : q) v *= gamma;
        for (std::size_t i = 0; i < history.size(); ++i) {
            const auto& [s, y] = history[i];
            const double beta = dot(y, q) / dot(y, s);
            for (std::size_t j = 0; j < kParamCount; ++j) q[j] += s[j] * (alphas[i] - beta);
        }
        Params dir{};
        for (std::size_t j = 0; j < kParamCount; ++j) dir[j] = -q[j];

        double slope = dot(cur.grad, dir);
        if (!(slope < 0)) {
            history.clear();
            const double scale = 1.0 / std::max(1.0, norm(cur.grad));
            for (std::size_t j = 0; j < kParamCount; ++j) dir[j] = -cur.grad[j] * scale;
            slope = dot(cur.grad, dir);
        }

        double step = 1.0;
        Params next{};
        Eval trial{};
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries) {
            for (std::size_t j = 0; j < kParamCount; ++j) next[j] = u[j] + step * dir[j];
            trial = evaluate(next, rows, options.alpha);
            if (std::isfinite(trial.loss) && trial.loss <= cur.loss + kArmijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++iter;
        if (!accepted) {
            if (history.empty()) break; // steepest descent made no progress
            history.clear();
            continue;
        }

        Params s{}, y{};
        for (std::size_t j = 0; j < kParamCount; ++j) {
            s[j] = next[j] - u[j];
            y[j] = trial.grad[j] - cur.grad[j];
        }
        if (dot(s, y) > 1e-12 * norm(s) * norm(y)) {
            history.emplace_back(s, y);
            if (history.size() > kMemory) history.pop_front();
        }
        u = next;
        cur = trial;
        converged = norm(cur.grad) <= options.tol;
    }

    auto model = unpack(u, options.alpha);
    model.converged = converged;
    model.grad_norm = norm(cur.grad);
    model.iterations = iter;
    return model;
}

ImpactCategory predict(const OrdinalModel& model, const FeatureVector& x) {
    const double s = model.score(x);
    int level = 0;
    if (s >= model.theta0) ++level;
    if (s >= model.theta1) ++level;
    return static_cast<ImpactCategory>(level);
}

AggregatedRanking annotate_fused(const OrdinalModel& model, AggregatedRanking ranking,
                                 std::span<const RankingRun> runs, std::size_t n_references) {
    const auto ranks = collect_ranks(runs);
    for (auto& entry : ranking.entries) {
        auto it = ranks.find(entry.paper_id);
        if (it == ranks.end()) {
            throw PreconditionError("fused entry " + entry.paper_id.str() + " has no rank in the supplied runs");
        }
        entry.predicted_impact = predict(model, build_features(it->second, n_references));
    }
    return ranking;
}

nlohmann::ordered_json model_to_json(const OrdinalModel& model) {
    nlohmann::ordered_json j;
    j["weights"] = model.weights;
    j["theta0"] = model.theta0;
    j["theta1"] = model.theta1;
    j["alpha"] = model.alpha;
    j["converged"] = model.converged;
    j["grad_norm"] = model.grad_norm;
    return j;
}

OrdinalModel model_from_json(const nlohmann::json& doc) {
    OrdinalModel m;
    try {
        const auto w = doc.at("weights").get<std::vector<double>>();
        if (w.size() != kFeatureCount) {
            throw ParseError("model needs " + std::to_string(kFeatureCount) + " weights, got " + std::to_string(w.size()));
        }
        std::copy(w.begin(), w.end(), m.weights.begin());
        m.theta0 = doc.at("theta0").get<double>();
        m.theta1 = doc.at("theta1").get<double>();
        m.alpha = doc.value("alpha", 1.0);
        m.converged = doc.value("converged", false);
        m.grad_norm = doc.value("grad_norm", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model document: ") + e.what(), doc.dump());
    }
    for (double v : m.weights) {
        if (!std::isfinite(v)) throw ParseError("model weights must be finite");
    }
    if (!std::isfinite(m.theta0) || !std::isfinite(m.theta1) || m.theta0 > m.theta1) {
        throw ParseError("model thresholds must be finite and ordered");
    }
    return m;
}

} // namespace citeimpact
