#include "citeimpact/pipeline.hpp"

#include "citeimpact/corpus_io.hpp"
#include "citeimpact/errors.hpp"
#include "citeimpact/ranking_io.hpp"

#include <json.hpp>

#include <atomic>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace citeimpact {

std::string_view to_string(AggregationMode mode) {
    return mode == AggregationMode::Majority ? "majority" : "ordreg";
}

std::optional<AggregationMode> parse_aggregation_mode(std::string_view text) {
    if (text == "majority") return AggregationMode::Majority;
    if (text == "ordreg") return AggregationMode::OrdReg;
    return std::nullopt;
}

namespace {

struct PaperOutcome {
    std::optional<PscResult> result;
    std::string error;
};

} // namespace

RankSummary rank_corpus(const std::vector<CitingPaperBundle>& bundles, ProviderAdapter& provider,
                        const RankOptions& options, const PromptTemplate& tmpl, const fs::path& out_dir) {
    options.judge.validate();
    for (const auto& b : bundles) check_file_stem(b.citing.id);
    fs::create_directories(out_dir);

    const auto seeds = default_seeds(options.master_seed);
    const auto calls_before = provider.calls();
    std::vector<PaperOutcome> outcomes(bundles.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < bundles.size(); i = next++) {
            try {
                outcomes[i].result = run_psc(bundles[i], options.judge, seeds, provider, tmpl);
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(bundles.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }

    RankSummary summary;
    summary.papers = bundles.size();
    ordered_json manifest;
    manifest["master_seed"] = options.master_seed;
    manifest["seeds"] = seeds;
    manifest["provider"] = options.judge.provider;
    manifest["model"] = options.judge.model;
    auto papers = ordered_json::array();
    auto failures = ordered_json::array();

    for (std::size_t i = 0; i < bundles.size(); ++i) {
        const auto& bundle = bundles[i];
        ordered_json paper;
        paper["citing_id"] = bundle.citing.id.str();
        paper["references"] = bundle.size();
        auto runs = ordered_json::array();
        const auto& outcome = outcomes[i];
        if (!outcome.result) {
            ++summary.failed_papers;
            failures.push_back({{"citing_id", bundle.citing.id.str()}, {"run", nullptr}, {"error", outcome.error}});
            paper["status"] = "failed";
            for (int k = 1; k <= kPscRuns; ++k) fs::remove(run_file_path(out_dir, bundle.citing.id, k));
        } else {
            paper["status"] = "ok";
            for (const auto& run : outcome.result->runs) {
                write_run_file(out_dir, run);
                ++summary.run_files;
                runs.push_back({{"run", run.run_index},
                                {"seed", run.seed},
                                {"entries", run.entries.size()},
                                {"missing", run.missing.size()},
                                {"hallucinations", run.dropped_hallucinations}});
            }
            for (const auto& f : outcome.result->failures) {
                ++summary.failed_runs;
                fs::remove(run_file_path(out_dir, bundle.citing.id, f.run_index)); // stale output of an earlier invocation
                failures.push_back({{"citing_id", bundle.citing.id.str()}, {"run", f.run_index}, {"error", f.message}});
            }
        }
        paper["runs"] = std::move(runs);
        papers.push_back(std::move(paper));
    }
    manifest["papers"] = std::move(papers);
    summary.provider_calls = provider.calls() - calls_before;
    manifest["provider_calls"] = summary.provider_calls;

    write_text_file(out_dir / "rank_manifest.json", manifest.dump(2) + "\n");
    write_text_file(out_dir / "failures.json", failures.dump(2) + "\n");
    return summary;
}

std::vector<RankedPaper> load_ranked_corpus(const std::vector<CitingPaperBundle>& bundles, const fs::path& runs_dir) {
    std::vector<RankedPaper> out;
    out.reserve(bundles.size());
    for (const auto& b : bundles) out.push_back({b, read_run_files(runs_dir, b)});
    return out;
}

AggregateSummary aggregate_corpus(const std::vector<RankedPaper>& papers, AggregationMode mode,
                                  const OrdinalModel* model, int k, const fs::path& out_dir) {
    if (mode == AggregationMode::OrdReg && model == nullptr) {
        throw PreconditionError("ordreg aggregation needs a trained model (run `train` first)");
    }
    fs::create_directories(out_dir);
    AggregateSummary summary;
    for (const auto& paper : papers) {
        if (paper.runs.empty()) {
            summary.skipped.push_back(paper.bundle.citing.id);
            continue;
        }
        auto fused = rrf_fuse(paper.runs, paper.bundle, k);
        if (mode == AggregationMode::Majority) {
            assign_majority_labels(fused, paper.runs);
        } else {
            fused = annotate_fused(*model, std::move(fused), paper.runs, paper.bundle.size());
        }
        write_fused_file(out_dir, fused);
        ++summary.fused_files;
    }
    return summary;
}

TrainResult train_model(const std::vector<RankedPaper>& papers, const std::set<CitationPair>& held_out,
                        const FitOptions& options) {
    std::vector<RankedPaper> usable;
    for (const auto& p : papers) {
        if (!p.runs.empty()) usable.push_back(p);
    }
    const auto set = build_training_set(usable, held_out);
    return {fit(set, options), set.rows.size(), set.excluded_pairs.size()};
}

std::map<CitationPair, ImpactCategory> load_fused_predictions(const std::vector<PaperId>& citing_ids,
                                                             const fs::path& fused_dir) {
    std::map<CitationPair, ImpactCategory> out;
    for (const auto& id : citing_ids) {
        if (!fs::exists(fused_file_path(fused_dir, id))) continue;
        for (const auto& e : read_fused_file(fused_dir, id).entries) {
            if (e.predicted_impact) out.emplace(CitationPair{id, e.paper_id}, *e.predicted_impact);
        }
    }
    return out;
}

Evaluation evaluate_predictions(const std::map<CitationPair, ImpactCategory>& predictions,
                                const std::vector<GroundTruthRecord>& truth, bool missing_as_other) {
    Evaluation out;
    std::vector<BinaryLabel> pred;
    std::vector<BinaryLabel> gold;
    for (const auto& rec : truth) {
        auto it = predictions.find(rec.pair());
        if (it == predictions.end()) {
            out.unmatched.push_back(rec.pair());
            if (!missing_as_other) continue;
            pred.push_back(BinaryLabel::Other);
        } else {
            pred.push_back(binarize(it->second));
        }
        gold.push_back(rec.label);
    }
    if (!out.unmatched.empty() && !missing_as_other) {
        std::string msg = std::to_string(out.unmatched.size()) + " ground-truth pairs have no prediction:";
        for (std::size_t i = 0; i < out.unmatched.size() && i < 20; ++i) {
            msg += " (" + out.unmatched[i].citing.str() + ", " + out.unmatched[i].cited.str() + ")";
        }
        if (out.unmatched.size() > 20) msg += " ...";
        throw Error(msg);
    }
    out.report = metrics(pred, gold);
    return out;
}

void write_report(const fs::path& out_dir, const std::string& stem, const std::string& system,
                  const EvalReport& report) {
    auto doc = report_to_json(report);
    ordered_json wrapped;
    wrapped["system"] = system;
    for (auto& [k, v] : doc.items()) wrapped[k] = v;
    write_text_file(out_dir / (stem + ".json"), wrapped.dump(2) + "\n");
    const NamedReport row{system, report};
    write_text_file(out_dir / (stem + ".txt"),
                    format_report_table(std::span<const NamedReport>(&row, 1)) + "\n" + format_confusion(report.confusion));
}

} // namespace citeimpact
