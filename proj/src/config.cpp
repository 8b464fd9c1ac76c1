#include "citeimpact/config.hpp"

#include "citeimpact/chat_provider.hpp"
#include "citeimpact/corpus_io.hpp"
#include "citeimpact/errors.hpp"
#include "citeimpact/scholar.hpp"

#include <json.hpp>

#include <cstdlib>

using nlohmann::json;

namespace citeimpact {

void RunConfig::validate() const {
    judge.validate();
    if (rrf_k <= 0) throw PreconditionError("rrf_k must be positive");
    for (double r : {mock.drop_rate, mock.duplicate_rate, mock.hallucination_rate}) {
        if (!(r >= 0.0 && r <= 1.0)) throw PreconditionError("mock noise rates must lie in [0, 1]");
    }
}

namespace {

template <typename T>
void read(const json& doc, const char* key, T& target) {
    if (auto it = doc.find(key); it != doc.end() && !it->is_null()) target = it->get<T>();
}

template <typename T>
void read_optional(const json& doc, const char* key, std::optional<T>& target) {
    if (auto it = doc.find(key); it != doc.end() && !it->is_null()) target = it->get<T>();
}

void read_path(const json& doc, const char* key, std::filesystem::path& target) {
    if (auto it = doc.find(key); it != doc.end() && it->is_string()) target = it->get<std::string>();
}

} // namespace

RunConfig load_config(const std::filesystem::path& path) {
    RunConfig c;
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    try {
        if (auto j = doc.find("judge"); j != doc.end()) {
            read(*j, "provider", c.judge.provider);
            read(*j, "model", c.judge.model);
            read_optional(*j, "temperature", c.judge.temperature);
            read_optional(*j, "top_p", c.judge.top_p);
            read(*j, "max_context_tokens", c.judge.max_context_tokens);
            read_path(*j, "prompt_template", c.judge.prompt_template);
            read(*j, "base_url", c.provider_base_url);
            read(*j, "path", c.provider_path);
        }
        if (auto m = doc.find("mock"); m != doc.end()) {
            read(*m, "score_seed", c.mock.score_seed);
            read(*m, "drop_rate", c.mock.drop_rate);
            read(*m, "duplicate_rate", c.mock.duplicate_rate);
            read(*m, "hallucination_rate", c.mock.hallucination_rate);
            read(*m, "drop_min_references", c.mock.drop_min_references);
            read(*m, "position_bias", c.mock.position_bias);
        }
        if (auto s = doc.find("scholar"); s != doc.end()) {
            read(*s, "base_url", c.scholar_base_url);
            read(*s, "requests_per_second", c.scholar_requests_per_second);
        }
        read(doc, "master_seed", c.master_seed);
        read_path(doc, "cache_dir", c.cache_dir);
        read_path(doc, "corpus", c.corpus);
        read_path(doc, "ground_truth", c.ground_truth);
        read_path(doc, "output_dir", c.output_dir);
        read(doc, "rrf_k", c.rrf_k);
        read(doc, "jobs", c.jobs);
        if (auto m = doc.find("aggregation_mode"); m != doc.end()) {
            auto mode = parse_aggregation_mode(m->get<std::string>());
            if (!mode) throw ParseError("aggregation_mode must be majority or ordreg");
            c.mode = *mode;
        }
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return c;
}

void apply_env_overrides(RunConfig& config) {
    if (auto k = scholar_api_key_from_env()) config.scholar_api_key = k;
    if (auto k = provider_api_key_from_env()) config.provider_api_key = k;
    if (const char* v = std::getenv("CRISP_MASTER_SEED"); v && *v) {
        try {
            config.master_seed = std::stoull(v);
        } catch (const std::exception&) {
            throw PreconditionError("CRISP_MASTER_SEED must be an unsigned integer");
        }
    }
    if (const char* v = std::getenv("CRISP_CACHE_DIR"); v && *v) config.cache_dir = v;
    if (const char* v = std::getenv("CRISP_OUTPUT_DIR"); v && *v) config.output_dir = v;
}

} // namespace citeimpact
