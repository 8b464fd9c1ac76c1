#pragma once

#include "citeimpact/cache.hpp"
#include "citeimpact/http.hpp"
#include "citeimpact/rate_limit.hpp"
#include "citeimpact/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace citeimpact {

struct ScholarOptions {
    std::string api_prefix = "/graph/v1";
    std::optional<std::string> api_key; // sent as x-api-key
    double requests_per_second = 1.0;
    RetryPolicy retry;
    std::size_t page_size = 100;
};

// Reads the scholarly API key from CRISP_S2_API_KEY, if set.
std::optional<std::string> scholar_api_key_from_env();

// Client for the scholarly-graph API (paper, citations, references with
// contexts, title match). Every successful response is cached per
// (subject, request kind); a cached key never reaches the transport.
class ScholarClient {
public:
    ScholarClient(HttpTransport& transport, ResponseCache* cache, ScholarOptions options = {});

    // Best-match identifier for a title, or nullopt when the API has no match.
    std::optional<PaperId> resolve_paper_by_title(std::string_view title);

    PaperRecord fetch_paper(const PaperId& id);

    // Papers citing target, deduplicated by id, in API order.
    std::vector<PaperRecord> fetch_citing_papers(const PaperId& target);

    // Reference list of citing with contexts, in API order. nullopt means the
    // API returned no usable references and the bundle must be discarded.
    std::optional<CitingPaperBundle> fetch_references_with_contexts(const PaperId& citing);

private:
    HttpResponse request(const std::string& target);
    std::string fetch_paginated(const PaperId& id, const std::string& kind, const std::string& fields);

    HttpTransport& transport_;
    ResponseCache* cache_;
    ScholarOptions options_;
    TokenBucket bucket_;
};

} // namespace citeimpact
