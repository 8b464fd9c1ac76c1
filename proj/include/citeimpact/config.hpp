#pragma once

#include "citeimpact/judge.hpp"
#include "citeimpact/mock_judge.hpp"
#include "citeimpact/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace citeimpact {

struct RunConfig {
    JudgeConfig judge;
    std::string provider_base_url = "https://api.openai.com";
    std::string provider_path = "/v1/chat/completions";
    std::optional<std::string> provider_api_key;
    MockJudgeOptions mock;

    std::string scholar_base_url = "https://api.semanticscholar.org";
    std::optional<std::string> scholar_api_key;
    double scholar_requests_per_second = 1.0;

    std::uint64_t master_seed = 0;
    std::filesystem::path cache_dir = ".citeimpact-cache";
    std::filesystem::path corpus;
    std::filesystem::path ground_truth;
    std::filesystem::path output_dir = "out";
    AggregationMode mode = AggregationMode::Majority;
    int rrf_k = kDefaultRrfK;
    unsigned jobs = 1;

    void validate() const;
};

// Reads the JSON config document (missing keys keep their defaults).
RunConfig load_config(const std::filesystem::path& path);

// Applies CRISP_S2_API_KEY, CRISP_PROVIDER_API_KEY, CRISP_MASTER_SEED,
// CRISP_CACHE_DIR and CRISP_OUTPUT_DIR when set.
void apply_env_overrides(RunConfig& config);

} // namespace citeimpact
