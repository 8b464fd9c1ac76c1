#include "citeimpact/judge.hpp"

#include "citeimpact/errors.hpp"
#include "citeimpact/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>

using nlohmann::json;

namespace citeimpact {

const RankedEntry* RankingRun::find(const PaperId& id) const {
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const RankedEntry& e) { return e.paper_id == id; });
    return it == entries.end() ? nullptr : &*it;
}

void JudgeConfig::validate() const {
    if (temperature && !(*temperature >= 0.0 && *temperature <= 2.0)) {
        throw PreconditionError("temperature must lie in [0, 2]");
    }
    if (top_p && !(*top_p >= 0.0 && *top_p <= 1.0)) {
        throw PreconditionError("top_p must lie in [0, 1]");
    }
    if (max_context_tokens == 0) {
        throw PreconditionError("max_context_tokens must be positive");
    }
}

std::vector<PaperId> permute_references(const CitingPaperBundle& bundle, std::uint64_t seed) {
    if (bundle.references.empty()) {
        throw PreconditionError("cannot permute an empty bundle");
    }
    auto ids = bundle.reference_ids();
    Rng rng(seed);
    for (std::size_t i = ids.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(ids[i], ids[j]);
    }
    return ids;
}

namespace {

// Index one past the bracket that closes the one at `open`, skipping string
// literals; npos when unbalanced.
std::size_t match_bracket(std::string_view s, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '[' || c == '{') {
            ++depth;
        } else if (c == ']' || c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

// First array whose elements are all objects. Prose such as "see [1]" is skipped.
std::optional<json> first_entry_array(std::string_view raw) {
    for (std::size_t pos = raw.find('['); pos != std::string_view::npos; pos = raw.find('[', pos + 1)) {
        const auto end = match_bracket(raw, pos);
        if (end == std::string_view::npos) continue;
        auto doc = json::parse(raw.substr(pos, end - pos), nullptr, false);
        if (doc.is_discarded() || !doc.is_array()) continue;
        if (std::all_of(doc.begin(), doc.end(), [](const json& e) { return e.is_object(); })) {
            return doc;
        }
    }
    return std::nullopt;
}

std::string text_field(const json& obj, const char* name) {
    auto it = obj.find(name);
    if (it == obj.end() || it->is_null()) return {};
    if (it->is_string()) return it->get<std::string>();
    if (it->is_array()) {
        std::string out;
        for (const auto& part : *it) {
            if (!part.is_string()) continue;
            if (!out.empty()) out += kContextSeparator;
            out += part.get<std::string>();
        }
        return out;
    }
    return it->dump();
}

int rank_field(const json& obj, std::string_view raw) {
    auto it = obj.find("rank");
    if (it == obj.end()) throw ParseError("ranking entry lacks \"rank\"", std::string(raw));
    double value = 0;
    if (it->is_number()) {
        value = it->get<double>();
    } else if (it->is_string()) {
        try {
            value = std::stod(it->get<std::string>());
        } catch (const std::exception&) {
            throw ParseError("ranking entry has non-numeric rank " + it->dump(), std::string(raw));
        }
    } else {
        throw ParseError("ranking entry has non-numeric rank " + it->dump(), std::string(raw));
    }
    if (!(value >= 1) || value != std::floor(value) || value > 1e9) {
        throw ParseError("ranking entry has invalid rank " + it->dump(), std::string(raw));
    }
    return static_cast<int>(value);
}

} // namespace

RankingRun parse_ranking_response(std::string_view raw, const CitingPaperBundle& bundle, int run_index,
                                  std::uint64_t seed) {
    auto doc = first_entry_array(raw);
    if (!doc) {
        throw ParseError("no JSON array of ranking entries found in response", std::string(raw));
    }

    std::unordered_map<std::string, const ReferenceEntry*> by_title;
    for (const auto& r : bundle.references) {
        if (!r.cited.title.empty()) by_title.emplace(trim(r.cited.title), &r);
    }

    RankingRun run{bundle.citing.id, run_index, seed, {}, {}, {}};
    std::unordered_map<PaperId, std::size_t> position;
    for (const auto& obj : *doc) {
        const int rank = rank_field(obj, raw);
        const auto category_text = text_field(obj, "impactCategory");
        const auto category = parse_category(category_text);
        if (!category) {
            throw ParseError("unknown impact category '" + category_text + "'", std::string(raw));
        }

        const auto id_text = text_field(obj, "paperId");
        const auto title = text_field(obj, "title");
        const ReferenceEntry* ref = nullptr;
        if (!trim(id_text).empty()) {
            ref = bundle.find(PaperId(trim(id_text)));
        } else if (auto t = by_title.find(trim(title)); t != by_title.end()) {
            ref = t->second;
        }
        if (ref == nullptr) {
            run.dropped_hallucinations.push_back(!trim(id_text).empty() ? trim(id_text) : title);
            continue;
        }

        RankedEntry entry{rank, ref->cited.id, title.empty() ? ref->cited.title : title,
                          text_field(obj, "contexts"), text_field(obj, "reason"), *category};
        if (auto it = position.find(entry.paper_id); it != position.end()) {
            if (entry.rank < run.entries[it->second].rank) run.entries[it->second] = std::move(entry);
            continue;
        }
        position.emplace(entry.paper_id, run.entries.size());
        run.entries.push_back(std::move(entry));
    }

    std::stable_sort(run.entries.begin(), run.entries.end(),
                     [](const RankedEntry& a, const RankedEntry& b) { return a.rank < b.rank; });
    for (const auto& r : bundle.references) {
        if (!position.count(r.cited.id)) run.missing.push_back(r.cited.id);
    }
    return run;
}

std::string ranking_entries_to_json(const std::vector<RankedEntry>& entries) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json j;
        j["rank"] = e.rank;
        j["paperId"] = e.paper_id.str();
        j["title"] = e.title;
        j["contexts"] = e.contexts;
        j["reason"] = e.reason;
        j["impactCategory"] = std::string(to_string(e.category));
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::array<std::uint64_t, kPscRuns> default_seeds(std::uint64_t master_seed) {
    return {1 ^ master_seed, 2 ^ master_seed, 3 ^ master_seed};
}

PscResult run_psc(const CitingPaperBundle& bundle, const JudgeConfig& config,
                  const std::array<std::uint64_t, kPscRuns>& seeds, ProviderAdapter& provider,
                  const PromptTemplate& tmpl) {
    for (int i = 0; i < kPscRuns; ++i) {
        for (int j = i + 1; j < kPscRuns; ++j) {
            if (seeds[i] == seeds[j]) throw PreconditionError("PSC seeds must be pairwise distinct");
        }
    }
    config.validate();
    validate_bundle(bundle);

    std::array<std::vector<PaperId>, kPscRuns> orders;
    std::array<std::string, kPscRuns> prompts;
    for (int i = 0; i < kPscRuns; ++i) {
        orders[i] = permute_references(bundle, seeds[i]);
        prompts[i] = build_ranking_prompt(bundle, orders[i], tmpl);
        const auto tokens = estimate_tokens(prompts[i]);
        if (tokens > config.max_context_tokens) {
            throw PromptTooLongError("prompt for " + bundle.citing.id.str() + " needs ~" +
                                     std::to_string(tokens) + " tokens, budget is " +
                                     std::to_string(config.max_context_tokens));
        }
    }

    PscResult result;
    for (int i = 0; i < kPscRuns; ++i) {
        const int run_index = i + 1;
        try {
            const auto raw = provider.complete({prompts[i], config, bundle, orders[i], seeds[i]});
            result.runs.push_back(parse_ranking_response(raw, bundle, run_index, seeds[i]));
        } catch (const std::exception& e) {
            result.failures.push_back({run_index, seeds[i], e.what()});
        }
    }
    if (result.runs.empty()) {
        throw Error("all " + std::to_string(kPscRuns) + " judge runs failed for " + bundle.citing.id.str() +
                    ": " + result.failures.front().message);
    }
    return result;
}

} // namespace citeimpact
