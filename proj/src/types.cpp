#include "citeimpact/types.hpp"

#include "citeimpact/errors.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace citeimpact {

PaperId::PaperId(std::string value) : value_(std::move(value)) {
    if (value_.empty()) {
        throw PreconditionError("paper id must be non-empty");
    }
}

CitationContext::CitationContext(std::string text) : text_(std::move(text)) {
    if (trim(text_).empty()) {
        throw PreconditionError("citation context must be non-empty after trimming");
    }
}

const ReferenceEntry* CitingPaperBundle::find(const PaperId& id) const {
    auto it = std::find_if(references.begin(), references.end(),
                           [&](const ReferenceEntry& r) { return r.cited.id == id; });
    return it == references.end() ? nullptr : &*it;
}

std::vector<PaperId> CitingPaperBundle::reference_ids() const {
    std::vector<PaperId> ids;
    ids.reserve(references.size());
    for (const auto& r : references) {
        ids.push_back(r.cited.id);
    }
    return ids;
}

void dedup_references(CitingPaperBundle& bundle) {
    std::unordered_set<PaperId> seen;
    std::erase_if(bundle.references,
                  [&](const ReferenceEntry& r) { return !seen.insert(r.cited.id).second; });
}

void validate_bundle(const CitingPaperBundle& bundle) {
    if (bundle.references.empty()) {
        throw PreconditionError("bundle " + bundle.citing.id.str() + " has no references");
    }
    std::unordered_set<PaperId> seen;
    for (const auto& r : bundle.references) {
        if (!seen.insert(r.cited.id).second) {
            throw PreconditionError("bundle " + bundle.citing.id.str() +
                                    " repeats reference " + r.cited.id.str());
        }
    }
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string_view to_string(ImpactCategory c) {
    switch (c) {
    case ImpactCategory::Low:
        return "Low";
    case ImpactCategory::Medium:
        return "Medium";
    case ImpactCategory::High:
        return "High";
    }
    return "Low";
}

std::optional<ImpactCategory> parse_category(std::string_view text) {
    const auto s = lower(trim(text));
    if (s == "low") return ImpactCategory::Low;
    if (s == "medium") return ImpactCategory::Medium;
    if (s == "high") return ImpactCategory::High;
    return std::nullopt;
}

std::string_view to_string(BinaryLabel l) {
    return l == BinaryLabel::ImpactRevealing ? "impact-revealing" : "other";
}

std::optional<BinaryLabel> parse_binary_label(std::string_view text) {
    const auto s = lower(trim(text));
    if (s == "impact-revealing") return BinaryLabel::ImpactRevealing;
    if (s == "other") return BinaryLabel::Other;
    return std::nullopt;
}

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return std::string(s);
}

std::string join_contexts(const std::vector<CitationContext>& contexts) {
    std::string out;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        if (i > 0) out += kContextSeparator;
        out += contexts[i].text();
    }
    return out;
}

} // namespace citeimpact
