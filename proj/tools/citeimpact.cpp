#include "citeimpact/annotation.hpp"
#include "citeimpact/annotation_server.hpp"
#include "citeimpact/chat_provider.hpp"
#include "citeimpact/config.hpp"
#include "citeimpact/corpus_io.hpp"
#include "citeimpact/errors.hpp"
#include "citeimpact/ground_truth.hpp"
#include "citeimpact/pipeline.hpp"
#include "citeimpact/ranking_io.hpp"
#include "citeimpact/scholar.hpp"
#include "citeimpact/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace citeimpact;

namespace {

// Flags given on the command line; each one overrides the config document.
struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> cache_dir;
    std::optional<std::string> out;
    std::optional<std::string> provider;
    std::optional<std::string> model;
    std::optional<double> temperature;
    std::optional<double> top_p;
    std::optional<std::string> prompt;
    std::optional<std::string> provider_url;
    std::optional<unsigned> jobs;
    std::optional<std::string> mode;
    std::optional<int> k;
    std::optional<std::string> scholar_url;
    std::optional<double> rps;
    std::optional<std::uint64_t> score_seed;
    std::optional<double> drop_rate;
    std::optional<double> duplicate_rate;
    std::optional<double> hallucination_rate;
};

RunConfig resolve(const Overrides& o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    apply_env_overrides(c);
    if (o.seed) c.master_seed = *o.seed;
    if (o.cache_dir) c.cache_dir = *o.cache_dir;
    if (o.out) c.output_dir = *o.out;
    if (o.provider) c.judge.provider = *o.provider;
    if (o.model) c.judge.model = *o.model;
    if (o.temperature) c.judge.temperature = o.temperature;
    if (o.top_p) c.judge.top_p = o.top_p;
    if (o.prompt) c.judge.prompt_template = *o.prompt;
    if (o.provider_url) c.provider_base_url = *o.provider_url;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.mode) {
        auto m = parse_aggregation_mode(*o.mode);
        if (!m) throw PreconditionError("--mode must be majority or ordreg");
        c.mode = *m;
    }
    if (o.k) c.rrf_k = *o.k;
    if (o.scholar_url) c.scholar_base_url = *o.scholar_url;
    if (o.rps) c.scholar_requests_per_second = *o.rps;
    if (o.score_seed) c.mock.score_seed = *o.score_seed;
    if (o.drop_rate) c.mock.drop_rate = *o.drop_rate;
    if (o.duplicate_rate) c.mock.duplicate_rate = *o.duplicate_rate;
    if (o.hallucination_rate) c.mock.hallucination_rate = *o.hallucination_rate;
    c.validate();
    return c;
}

std::unique_ptr<HttpTransport> make_transport(const std::string& fixtures, const std::string& base_url) {
    if (!fixtures.empty()) return FixtureTransport::from_file(fixtures);
    return std::make_unique<HttplibTransport>(base_url);
}

std::map<PaperId, CitingPaperBundle> index_corpus(const std::vector<CitingPaperBundle>& bundles) {
    std::map<PaperId, CitingPaperBundle> out;
    for (const auto& b : bundles) out.emplace(b.citing.id, b);
    return out;
}

// Truth rows filtered against the corpus: a citing paper missing from it counts
// as having no references.
GroundTruthSet truth_for_corpus(const fs::path& path, const std::vector<CitingPaperBundle>& bundles) {
    auto index = index_corpus(bundles);
    return load_ground_truth(path, [&](const PaperId& id) -> std::optional<CitingPaperBundle> {
        auto it = index.find(id);
        if (it == index.end()) return std::nullopt;
        return it->second;
    });
}

void print_ingest(const IngestStats& s) {
    std::cout << "rows " << s.rows_read << ", duplicates " << s.duplicate_rows << ", repeated contexts "
              << s.repeated_contexts << ", merged contexts " << s.merged_contexts << ", label conflicts "
              << s.label_conflicts << ", dropped (no references) " << s.no_reference_rows << "\n"
              << "citing papers " << s.citing_papers << ", pairs " << s.cited_pairs << "\n";
}

fs::path or_default(const std::string& flag, const fs::path& fallback) {
    return flag.empty() ? fallback : fs::path(flag);
}

AnnotationServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Citation impact ranking pipeline"};
    app.require_subcommand(1);
    Overrides o;
    app.add_option("--config", o.config, "JSON config document")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--out", o.out, "output directory");

    // fetch
    auto* fetch = app.add_subcommand("fetch", "collect citing papers of a target and their references");
    std::string target;
    std::string fixtures;
    std::string corpus_out;
    std::string gt_in;
    std::string gt_out;
    fetch->add_option("target", target, "paper id of the cited target (or a title with --by-title)");
    bool by_title = false;
    fetch->add_flag("--by-title", by_title, "resolve target as a title first");
    fetch->add_option("--cache", o.cache_dir, "response cache directory");
    fetch->add_option("--fixtures", fixtures, "replay recorded responses instead of the network")
        ->check(CLI::ExistingFile);
    fetch->add_option("--base-url", o.scholar_url);
    fetch->add_option("--rps", o.rps, "requests per second (0 = unlimited)");
    fetch->add_option("--corpus", corpus_out, "corpus JSONL to write");
    fetch->add_option("--ground-truth", gt_in, "labeled rows; fetch the bundles of their citing papers instead")
        ->check(CLI::ExistingFile);
    fetch->add_option("--truth-out", gt_out, "filtered ground truth JSONL to write");

    // rank
    auto* rank = app.add_subcommand("rank", "three judge runs per citing paper");
    std::string corpus;
    std::string runs_dir;
    rank->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
    rank->add_option("--provider", o.provider, "mock | openai");
    rank->add_option("--model", o.model);
    rank->add_option("--temperature", o.temperature);
    rank->add_option("--top-p", o.top_p);
    rank->add_option("--prompt", o.prompt, "prompt template file")->check(CLI::ExistingFile);
    rank->add_option("--provider-url", o.provider_url);
    rank->add_option("--jobs", o.jobs);
    rank->add_option("--score-seed", o.score_seed, "mock: hidden score seed");
    rank->add_option("--drop-rate", o.drop_rate, "mock: reference drop rate");
    rank->add_option("--duplicate-rate", o.duplicate_rate, "mock: duplicate rate");
    rank->add_option("--hallucination-rate", o.hallucination_rate, "mock: hallucination rate");

    // aggregate
    auto* aggregate = app.add_subcommand("aggregate", "fuse runs and assign impact labels");
    std::string model_path;
    aggregate->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
    aggregate->add_option("--runs", runs_dir, "directory holding the run files (default: --out)");
    aggregate->add_option("--mode", o.mode, "majority | ordreg");
    aggregate->add_option("--model", model_path, "trained ordinal model (ordreg mode)");
    aggregate->add_option("-k,--rrf-k", o.k);

    // train
    auto* train = app.add_subcommand("train", "fit the ordinal regression model");
    double alpha = 1.0;
    train->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
    train->add_option("--runs", runs_dir);
    train->add_option("--ground-truth", gt_in, "labeled pairs held out of training")->check(CLI::ExistingFile);
    train->add_option("--alpha", alpha, "L2 penalty")->capture_default_str();
    train->add_option("--model-out", model_path, "where to write the model (default: <out>/model.json)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score fused labels against ground truth");
    std::string fused_dir;
    std::string system = "model";
    bool allow_missing = false;
    std::optional<std::uint64_t> baseline_seed;
    evaluate->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--ground-truth", gt_in)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--fused", fused_dir, "directory holding fused files (default: --out)");
    evaluate->add_option("--system", system, "name in the report table")->capture_default_str();
    evaluate->add_flag("--allow-missing", allow_missing, "count unmatched pairs as other");
    evaluate->add_option("--random-baseline", baseline_seed, "also report a seeded random baseline");

    // analyze-missing
    auto* missing = app.add_subcommand("analyze-missing", "references left out per run by list size");
    std::size_t bin_width = 20;
    missing->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
    missing->add_option("--runs", runs_dir);
    missing->add_option("--bin-width", bin_width)->capture_default_str();

    // serve
    auto* serve = app.add_subcommand("serve", "annotation HTTP API");
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string state_dir;
    std::string ui_dir;
    serve->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--state", state_dir, "journal directory (default: <out>/annotations)");
    serve->add_option("--ui", ui_dir, "built UI to serve at /")->check(CLI::ExistingDirectory);
    serve->add_option("--fused", fused_dir, "model rankings for agreement (default: --out)");

    // synth
    auto* synth = app.add_subcommand("synth", "synthetic corpus with planted labels");
    SyntheticCorpusOptions synth_opts;
    std::uint64_t planted_seed = 0;
    synth->add_option("--bundles", synth_opts.bundles)->capture_default_str();
    synth->add_option("--min-references", synth_opts.min_references)->capture_default_str();
    synth->add_option("--max-references", synth_opts.max_references)->capture_default_str();
    synth->add_option("--score-seed", planted_seed, "must match the mock judge's")->capture_default_str();
    synth->add_option("--corpus", corpus_out)->required();
    synth->add_option("--truth-out", gt_out);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = resolve(o);

        if (*fetch) {
            if (target.empty() && gt_in.empty()) throw PreconditionError("fetch needs a target or --ground-truth");
            ResponseCache cache(cfg.cache_dir);
            auto transport = make_transport(fixtures, cfg.scholar_base_url);
            ScholarOptions so;
            so.api_key = cfg.scholar_api_key;
            so.requests_per_second = fixtures.empty() ? cfg.scholar_requests_per_second : 0.0;
            ScholarClient client(*transport, &cache, so);
            std::vector<CitingPaperBundle> bundles;
            std::size_t discarded = 0;

            if (!gt_in.empty()) {
                auto set = load_ground_truth(gt_in, [&](const PaperId& id) {
                    return client.fetch_references_with_contexts(id);
                });
                print_ingest(set.stats);
                bundles = std::move(set.bundles);
                if (!gt_out.empty()) write_ground_truth(gt_out, set.records);
            } else {
                std::optional<PaperId> id;
                if (by_title) {
                    id = client.resolve_paper_by_title(target);
                    if (!id) throw NotFoundError("no paper matches title \"" + target + "\"");
                } else {
                    id = PaperId(target);
                }
                auto citers = client.fetch_citing_papers(*id);
                for (const auto& p : citers) {
                    if (auto b = client.fetch_references_with_contexts(p.id)) bundles.push_back(std::move(*b));
                    else ++discarded;
                }
                std::cout << "target " << id->str() << ": " << citers.size() << " citing papers, "
                          << bundles.size() << " with references, " << discarded << " discarded\n";
            }
            std::cout << "network calls " << transport->calls() << "\n";
            write_corpus(or_default(corpus_out, cfg.output_dir / "corpus.jsonl"), bundles);
            return 0;
        }

        if (*synth) {
            synth_opts.seed = cfg.master_seed;
            auto bundles = synthetic_corpus(synth_opts);
            write_corpus(corpus_out, bundles);
            auto truth = planted_ground_truth(bundles, planted_seed);
            if (!gt_out.empty()) write_ground_truth(gt_out, truth);
            std::cout << bundles.size() << " bundles, " << truth.size() << " labeled pairs\n";
            return 0;
        }

        auto bundles = read_corpus(corpus);

        if (*rank) {
            std::unique_ptr<HttpTransport> transport;
            std::unique_ptr<ProviderAdapter> provider;
            if (cfg.judge.provider == "mock") {
                provider = std::make_unique<MockProvider>(cfg.mock);
            } else if (cfg.judge.provider == "openai") {
                if (cfg.judge.model.empty()) throw PreconditionError("--model is required for provider openai");
                transport = std::make_unique<HttplibTransport>(cfg.provider_base_url, std::chrono::seconds(600));
                provider = std::make_unique<ChatCompletionProvider>(*transport, cfg.provider_api_key,
                                                                    cfg.provider_path);
            } else {
                throw PreconditionError("unknown provider \"" + cfg.judge.provider + "\" (mock | openai)");
            }
            auto tmpl = cfg.judge.prompt_template.empty() ? PromptTemplate::builtin()
                                                          : PromptTemplate::from_file(cfg.judge.prompt_template);
            RankOptions ro{cfg.judge, cfg.master_seed, cfg.jobs};
            auto s = rank_corpus(bundles, *provider, ro, tmpl, cfg.output_dir);
            std::cout << s.papers << " papers, " << s.run_files << " run files, " << s.failed_runs
                      << " failed runs, " << s.failed_papers << " failed papers, " << s.provider_calls
                      << " provider calls\n";
            return s.failed_papers > 0 ? 3 : 0;
        }

        if (*aggregate) {
            auto papers = load_ranked_corpus(bundles, or_default(runs_dir, cfg.output_dir));
            std::optional<OrdinalModel> model;
            if (!model_path.empty()) model = model_from_json(nlohmann::json::parse(read_text_file(model_path)));
            auto s = aggregate_corpus(papers, cfg.mode, model ? &*model : nullptr, cfg.rrf_k, cfg.output_dir);
            std::cout << s.fused_files << " fused files (" << to_string(cfg.mode) << "), " << s.skipped.size()
                      << " papers without runs\n";
            return 0;
        }

        if (*train) {
            auto papers = load_ranked_corpus(bundles, or_default(runs_dir, cfg.output_dir));
            std::set<CitationPair> held_out;
            if (!gt_in.empty()) {
                for (const auto& r : truth_for_corpus(gt_in, bundles).records) held_out.insert(r.pair());
            }
            FitOptions fo;
            fo.alpha = alpha;
            auto r = train_model(papers, held_out, fo);
            auto path = or_default(model_path, cfg.output_dir / "model.json");
            write_text_file(path, model_to_json(r.model).dump(2) + "\n");
            std::cout << r.rows << " training rows, " << r.excluded_pairs << " held-out pairs excluded, "
                      << (r.model.converged ? "converged" : "NOT converged") << " after " << r.model.iterations
                      << " iterations (|g| = " << r.model.grad_norm << ")\n";
            return r.model.converged ? 0 : 4;
        }

        if (*evaluate) {
            auto truth = truth_for_corpus(gt_in, bundles);
            std::vector<PaperId> citing;
            for (const auto& b : truth.bundles) citing.push_back(b.citing.id);
            auto preds = load_fused_predictions(citing, or_default(fused_dir, cfg.output_dir));
            auto ev = evaluate_predictions(preds, truth.records, allow_missing);
            std::vector<NamedReport> rows{{system, ev.report}};
            if (baseline_seed) {
                std::vector<BinaryLabel> gold;
                for (const auto& r : truth.records) gold.push_back(r.label);
                rows.push_back({"random", random_baseline(gold, *baseline_seed)});
            }
            std::cout << format_report_table(rows) << "\n" << format_confusion(ev.report.confusion);
            if (!ev.unmatched.empty()) std::cout << ev.unmatched.size() << " unmatched pairs counted as other\n";
            write_report(cfg.output_dir, "report", system, ev.report);
            return 0;
        }

        if (*missing) {
            auto papers = load_ranked_corpus(bundles, or_default(runs_dir, cfg.output_dir));
            auto curve = missing_reference_curve(papers, bin_width);
            nlohmann::ordered_json doc = nlohmann::ordered_json::array();
            std::cout << "references  papers  mean missing\n";
            for (const auto& b : curve) {
                std::ostringstream line;
                line << "[" << b.lower << ", " << b.upper << ")";
                std::cout << line.str() << std::string(line.str().size() < 12 ? 12 - line.str().size() : 1, ' ')
                          << b.papers << "  " << b.mean_missing << "\n";
                doc.push_back({{"lower", b.lower}, {"upper", b.upper}, {"papers", b.papers},
                               {"mean_missing", b.mean_missing}});
            }
            write_text_file(cfg.output_dir / "missing_curve.json", doc.dump(2) + "\n");
            return 0;
        }

        if (*serve) {
            auto fused = or_default(fused_dir, cfg.output_dir);
            std::map<PaperId, std::vector<PaperId>> model_rankings;
            for (const auto& b : bundles) {
                if (!fs::exists(fused_file_path(fused, b.citing.id))) continue;
                auto& order = model_rankings[b.citing.id];
                for (const auto& e : read_fused_file(fused, b.citing.id).entries) order.push_back(e.paper_id);
            }
            AnnotationStore store(bundles, std::move(model_rankings),
                                  or_default(state_dir, cfg.output_dir / "annotations"), cfg.master_seed);
            std::optional<fs::path> ui;
            if (!ui_dir.empty()) ui = ui_dir;
            AnnotationServer server(store, ui);
            if (!server.bind(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "serving " << bundles.size() << " tasks on http://" << host << ":" << port << "\n"
                      << std::flush;
            server.listen();
            return 0;
        }
    } catch (const NotFoundError& e) {
        std::cerr << "error: not found: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
