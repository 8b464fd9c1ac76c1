#include "citeimpact/scholar.hpp"

#include "citeimpact/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <thread>
#include <unordered_set>

using nlohmann::json;

namespace citeimpact {

std::optional<std::string> scholar_api_key_from_env() {
    if (const char* v = std::getenv("CRISP_S2_API_KEY"); v != nullptr && *v != '\0') {
        return std::string(v);
    }
    return std::nullopt;
}

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

json parse_body(const std::string& body, const std::string& what) {
    try {
        return json::parse(body);
    } catch (const json::exception& e) {
        throw ParseError("malformed " + what + " response: " + e.what(), body);
    }
}

std::optional<PaperRecord> record_from(const json& node) {
    if (!node.is_object()) return std::nullopt;
    const auto id = node.find("paperId");
    if (id == node.end() || !id->is_string() || id->get<std::string>().empty()) {
        return std::nullopt;
    }
    PaperRecord rec{PaperId(id->get<std::string>()), {}, std::nullopt};
    if (auto t = node.find("title"); t != node.end() && t->is_string()) {
        rec.title = t->get<std::string>();
    }
    if (auto a = node.find("abstract"); a != node.end() && a->is_string()) {
        rec.abstract = a->get<std::string>();
    }
    return rec;
}

} // namespace

ScholarClient::ScholarClient(HttpTransport& transport, ResponseCache* cache, ScholarOptions options)
    : transport_(transport), cache_(cache), options_(std::move(options)),
      bucket_(options_.requests_per_second) {}

HttpResponse ScholarClient::request(const std::string& target) {
    HttpHeaders headers;
    if (options_.api_key) headers.emplace_back("x-api-key", *options_.api_key);

    auto delay = options_.retry.base_delay;
    std::string last_error;
    for (int attempt = 1; attempt <= std::max(1, options_.retry.attempts); ++attempt) {
        bucket_.acquire();
        try {
            auto res = transport_.get(target, headers);
            if (!retryable(res.status)) return res;
            last_error = "HTTP " + std::to_string(res.status);
        } catch (const TransportError& e) {
            last_error = e.what();
        }
        if (attempt < options_.retry.attempts) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }
    throw TransportError("giving up on " + target + " after " +
                         std::to_string(options_.retry.attempts) + " attempts: " + last_error);
}

std::optional<PaperId> ScholarClient::resolve_paper_by_title(std::string_view title) {
    const auto clean = trim(title);
    if (clean.empty()) {
        throw PreconditionError("title must be non-empty");
    }
    const CacheKey key{clean, "title-match"};
    if (cache_) {
        if (auto hit = cache_->get(key)) {
            const auto doc = json::parse(*hit);
            if (doc.at("paperId").is_null()) return std::nullopt;
            return PaperId(doc.at("paperId").get<std::string>());
        }
    }

    const auto res = request(options_.api_prefix + "/paper/search/match?query=" + url_encode(clean) +
                             "&fields=paperId,title");
    std::optional<PaperId> found;
    if (res.status == 200) {
        const auto doc = parse_body(res.body, "title match");
        const auto& data = doc.contains("data") ? doc.at("data") : json::array();
        if (data.is_array() && !data.empty()) {
            if (auto rec = record_from(data.front())) found = rec->id;
        }
    } else if (res.status != 404) {
        throw Error("title match failed with HTTP " + std::to_string(res.status) + ": " + res.body);
    }

    if (cache_) {
        cache_->put(key, json{{"paperId", found ? json(found->str()) : json(nullptr)}}.dump());
    }
    return found;
}

PaperRecord ScholarClient::fetch_paper(const PaperId& id) {
    const CacheKey key{id.str(), "paper"};
    std::optional<std::string> body = cache_ ? cache_->get(key) : std::nullopt;
    if (!body) {
        const auto res = request(options_.api_prefix + "/paper/" + url_encode(id.str()) +
                                 "?fields=paperId,title,abstract");
        if (res.status == 404) throw NotFoundError("paper " + id.str() + " not found");
        if (res.status != 200) {
            throw Error("paper lookup failed with HTTP " + std::to_string(res.status));
        }
        body = res.body;
        parse_body(*body, "paper");
        if (cache_) cache_->put(key, *body);
    }
    auto rec = record_from(parse_body(*body, "paper"));
    if (!rec) throw ParseError("paper response lacks paperId", *body);
    return *rec;
}

std::string ScholarClient::fetch_paginated(const PaperId& id, const std::string& kind,
                                           const std::string& fields) {
    const CacheKey key{id.str(), kind};
    if (cache_) {
        if (auto hit = cache_->get(key)) return *hit;
    }

    json all = json::array();
    std::size_t offset = 0;
    for (;;) {
        const auto target = options_.api_prefix + "/paper/" + url_encode(id.str()) + "/" + kind +
                            "?fields=" + fields + "&offset=" + std::to_string(offset) +
                            "&limit=" + std::to_string(options_.page_size);
        const auto res = request(target);
        if (res.status == 404) throw NotFoundError("paper " + id.str() + " not found");
        if (res.status != 200) {
            throw Error(kind + " lookup failed with HTTP " + std::to_string(res.status));
        }
        const auto page = parse_body(res.body, kind);
        if (auto d = page.find("data"); d != page.end() && d->is_array()) {
            for (const auto& item : *d) all.push_back(item);
        }
        const auto next = page.find("next");
        if (next == page.end() || !next->is_number_unsigned() || next->get<std::size_t>() <= offset) {
            break;
        }
        offset = next->get<std::size_t>();
    }

    auto payload = json{{"data", std::move(all)}}.dump();
    if (cache_) cache_->put(key, payload);
    return payload;
}

std::vector<PaperRecord> ScholarClient::fetch_citing_papers(const PaperId& target) {
    const auto doc = parse_body(fetch_paginated(target, "citations", "paperId,title,abstract"),
                                "citations");
    std::vector<PaperRecord> out;
    std::unordered_set<PaperId> seen;
    for (const auto& item : doc.at("data")) {
        auto rec = record_from(item.value("citingPaper", json()));
        if (rec && seen.insert(rec->id).second) out.push_back(std::move(*rec));
    }
    return out;
}

std::optional<CitingPaperBundle> ScholarClient::fetch_references_with_contexts(const PaperId& citing) {
    const auto doc = parse_body(
        fetch_paginated(citing, "references", "contexts,paperId,title,abstract"), "references");

    std::vector<ReferenceEntry> references;
    for (const auto& item : doc.at("data")) {
        auto rec = record_from(item.value("citedPaper", json()));
        if (!rec) continue;
        ReferenceEntry entry{std::move(*rec), {}};
        if (auto ctx = item.find("contexts"); ctx != item.end() && ctx->is_array()) {
            for (const auto& c : *ctx) {
                if (c.is_string() && !trim(c.get<std::string>()).empty()) {
                    entry.contexts.emplace_back(c.get<std::string>());
                }
            }
        }
        references.push_back(std::move(entry));
    }
    if (references.empty()) return std::nullopt;

    CitingPaperBundle bundle{fetch_paper(citing), std::move(references)};
    dedup_references(bundle);
    return bundle;
}

} // namespace citeimpact
