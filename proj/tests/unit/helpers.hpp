#pragma once

#include "citeimpact/corpus_io.hpp"
#include "citeimpact/judge.hpp"
#include "citeimpact/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(CITEIMPACT_FIXTURES) / name;
}

inline citeimpact::CitingPaperBundle idlg_bundle() {
    return citeimpact::bundle_from_json(nlohmann::json::parse(citeimpact::read_text_file(fixture("idlg_bundle.json"))));
}

// Reference ids of the iDLG fixture in fused order, with per-run ranks
// consistent with the published fused scores (runs 1 and 2 agree).
struct IdlgRow {
    const char* id;
    int r12;
    int r3;
};
inline constexpr IdlgRow kIdlgRanks[] = {
    {"5507d267bbf0b4cdb9f893c3c0960a45016f7010", 1, 1},  {"6a6ad9eb495739f4c80e7c09598720c3d5c5dff7", 2, 4},
    {"7fcb90f68529cbfab49f471b54719ded7528d0ef", 3, 3},  {"8a564ee07fa930ebc1176019deacdc9951063a99", 5, 5},
    {"49bdeb07b045dd77f0bfe2b44436608770235a23", 4, 8},  {"8bdf6f03bde08c424c214188b35be8b2dec7cdea", 6, 7},
    {"f2f8f7a2ec1b2ede48cbcd189b376ab9fa0735ef", 7, 6},  {"1267fe36b5ece49a9d8f913eb67716a040bbcced", 11, 2},
    {"5d90f06bb70a0a3dced62413346235c02b1aa086", 8, 9},  {"c6b3ca4f939e36a9679a70e14ce8b1bbbc5618f3", 9, 10},
    {"162d958ff885f1462aeda91cd72582323fd6a1f4", 10, 11},
};

inline std::vector<citeimpact::RankingRun> idlg_runs(const citeimpact::CitingPaperBundle& b) {
    std::vector<citeimpact::RankingRun> runs;
    for (int k = 1; k <= 3; ++k) {
        citeimpact::RankingRun run{b.citing.id, k, static_cast<std::uint64_t>(k), {}, {}, {}};
        for (const auto& row : kIdlgRanks) {
            citeimpact::PaperId id(row.id);
            run.entries.push_back({k == 3 ? row.r3 : row.r12, id, b.find(id)->cited.title, "", "",
                                   citeimpact::ImpactCategory::Medium});
        }
        std::sort(run.entries.begin(), run.entries.end(), [](const auto& x, const auto& y) { return x.rank < y.rank; });
        runs.push_back(std::move(run));
    }
    return runs;
}

// Fresh directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 gen(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / ("citeimpact-test-" + std::to_string(gen()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

// Bundle "c" with references r0..r{n-1}.
inline citeimpact::CitingPaperBundle small_bundle(std::size_t n, const std::string& citing = "c") {
    citeimpact::CitingPaperBundle b{{citeimpact::PaperId(citing), "citing " + citing, std::nullopt}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        b.references.push_back({{citeimpact::PaperId("r" + std::to_string(i)), "ref " + std::to_string(i), std::nullopt},
                                {citeimpact::CitationContext("context " + std::to_string(i))}});
    }
    return b;
}

} // namespace testing_support
