#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace citeimpact {

// Opaque scholarly-graph identifier. Never empty.
class PaperId {
public:
    explicit PaperId(std::string value);

    const std::string& str() const noexcept { return value_; }

    friend bool operator==(const PaperId&, const PaperId&) = default;
    friend auto operator<=>(const PaperId&, const PaperId&) = default;

private:
    std::string value_;
};

struct PaperRecord {
    PaperId id;
    std::string title;
    std::optional<std::string> abstract;
};

// One excerpt of the citing paper that mentions a reference. Non-empty after trimming.
class CitationContext {
public:
    explicit CitationContext(std::string text);

    const std::string& text() const noexcept { return text_; }

    friend bool operator==(const CitationContext&, const CitationContext&) = default;

private:
    std::string text_;
};

struct ReferenceEntry {
    PaperRecord cited;
    std::vector<CitationContext> contexts;
};

// A citing paper with its full reference list (reference ids unique, list non-empty).
struct CitingPaperBundle {
    PaperRecord citing;
    std::vector<ReferenceEntry> references;

    std::size_t size() const noexcept { return references.size(); }
    const ReferenceEntry* find(const PaperId& id) const;
    bool contains(const PaperId& id) const { return find(id) != nullptr; }
    std::vector<PaperId> reference_ids() const;
};

// Drops repeated cited ids (first occurrence wins). Idempotent.
void dedup_references(CitingPaperBundle& bundle);

// Throws PreconditionError when the bundle breaks its invariants.
void validate_bundle(const CitingPaperBundle& bundle);

enum class ImpactCategory : int { Low = 0, Medium = 1, High = 2 };

std::string_view to_string(ImpactCategory c);
// Case-insensitive; nullopt for anything other than low/medium/high.
std::optional<ImpactCategory> parse_category(std::string_view text);

enum class BinaryLabel : int { Other = 0, ImpactRevealing = 1 };

std::string_view to_string(BinaryLabel l);
std::optional<BinaryLabel> parse_binary_label(std::string_view text);

struct CitationPair {
    PaperId citing;
    PaperId cited;

    friend bool operator==(const CitationPair&, const CitationPair&) = default;
    friend auto operator<=>(const CitationPair&, const CitationPair&) = default;
};

struct GroundTruthRecord {
    PaperId citing_id;
    PaperId cited_id;
    BinaryLabel label;

    CitationPair pair() const { return {citing_id, cited_id}; }
};

std::string trim(std::string_view s);
std::string join_contexts(const std::vector<CitationContext>& contexts);

inline constexpr std::string_view kContextSeparator = " | ";

} // namespace citeimpact

template <>
struct std::hash<citeimpact::PaperId> {
    std::size_t operator()(const citeimpact::PaperId& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
