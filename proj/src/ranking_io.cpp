#include "citeimpact/ranking_io.hpp"

#include "citeimpact/corpus_io.hpp"
#include "citeimpact/errors.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace citeimpact {

fs::path run_file_path(const fs::path& dir, const PaperId& citing, int run_index) {
    check_file_stem(citing);
    return dir / (citing.str() + ".run" + std::to_string(run_index) + ".json");
}

fs::path fused_file_path(const fs::path& dir, const PaperId& citing) {
    check_file_stem(citing);
    return dir / (citing.str() + ".fused.json");
}

void write_run_file(const fs::path& dir, const RankingRun& run) {
    write_text_file(run_file_path(dir, run.citing_id, run.run_index), ranking_entries_to_json(run.entries));
}

std::vector<RankingRun> read_run_files(const fs::path& dir, const CitingPaperBundle& bundle) {
    std::vector<RankingRun> runs;
    for (int k = 1; k <= kPscRuns; ++k) {
        const auto path = run_file_path(dir, bundle.citing.id, k);
        if (!fs::exists(path)) continue;
        try {
            runs.push_back(parse_ranking_response(read_text_file(path), bundle, k));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": " + e.what(), e.raw());
        }
    }
    return runs;
}

std::string fused_to_json(const AggregatedRanking& ranking) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : ranking.entries) {
        nlohmann::ordered_json j;
        j["rank"] = e.rank;
        j["paperId"] = e.paper_id.str();
        j["title"] = e.title;
        j["rrf_score"] = e.rrf_score;
        j["num_rankings_found"] = e.num_rankings_found;
        j["predicted_impact"] = e.predicted_impact ? json(std::string(to_string(*e.predicted_impact))) : json(nullptr);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

AggregatedRanking fused_from_json(const PaperId& citing, std::string_view text) {
    AggregatedRanking out{citing, {}, {}};
    try {
        for (const auto& j : json::parse(text)) {
            AggregatedEntry e{j.at("rank").get<int>(), PaperId(j.at("paperId").get<std::string>()),
                              j.value("title", std::string()), j.at("rrf_score").get<double>(),
                              j.at("num_rankings_found").get<int>(), std::nullopt};
            if (const auto& p = j.at("predicted_impact"); !p.is_null()) {
                e.predicted_impact = parse_category(p.get<std::string>());
                if (!e.predicted_impact) throw ParseError("unknown predicted_impact " + p.dump());
            }
            out.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed fused ranking: ") + e.what(), std::string(text));
    }
    return out;
}

void write_fused_file(const fs::path& dir, const AggregatedRanking& ranking) {
    write_text_file(fused_file_path(dir, ranking.citing_id), fused_to_json(ranking));
}

AggregatedRanking read_fused_file(const fs::path& dir, const PaperId& citing) {
    const auto path = fused_file_path(dir, citing);
    return fused_from_json(citing, read_text_file(path));
}

} // namespace citeimpact
