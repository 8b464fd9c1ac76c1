#include "citeimpact/prompt.hpp"

#include "citeimpact/corpus_io.hpp"
#include "citeimpact/errors.hpp"

#include "builtin_prompt.hpp"

#include <algorithm>
#include <unordered_map>

namespace citeimpact {

namespace {

struct Piece {
    bool placeholder;
    std::string text;
};

std::vector<Piece> tokenize(const std::string& text) {
    std::vector<Piece> pieces;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find("{{", pos);
        if (open == std::string::npos) {
            pieces.push_back({false, text.substr(pos)});
            break;
        }
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos) {
            throw ParseError("unterminated placeholder at offset " + std::to_string(open));
        }
        if (open > pos) pieces.push_back({false, text.substr(pos, open - pos)});
        auto name = trim(std::string_view(text).substr(open + 2, close - open - 2));
        if (name.empty()) {
            throw ParseError("empty placeholder at offset " + std::to_string(open));
        }
        pieces.push_back({true, std::move(name)});
        pos = close + 2;
    }
    return pieces;
}

} // namespace

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
    for (const auto& p : tokenize(text_)) {
        if (p.placeholder && std::find(placeholders_.begin(), placeholders_.end(), p.text) == placeholders_.end()) {
            placeholders_.push_back(p.text);
        }
    }
}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
    return PromptTemplate(read_text_file(path));
}

PromptTemplate PromptTemplate::builtin() {
    static const PromptTemplate tmpl(detail::kBuiltinRankingPrompt);
    return tmpl;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
    std::string out;
    out.reserve(text_.size());
    for (const auto& p : tokenize(text_)) {
        if (!p.placeholder) {
            out += p.text;
            continue;
        }
        auto it = values.find(p.text);
        if (it == values.end()) {
            throw PreconditionError("no value for placeholder {{" + p.text + "}}");
        }
        out += it->second;
    }
    return out;
}

std::string build_ranking_prompt(const CitingPaperBundle& bundle, std::span<const PaperId> permutation,
                                 const PromptTemplate& tmpl) {
    if (permutation.empty()) {
        throw PreconditionError("permutation must not be empty");
    }
    if (permutation.size() != bundle.size()) {
        throw PreconditionError("permutation lists " + std::to_string(permutation.size()) +
                                " references, bundle has " + std::to_string(bundle.size()));
    }
    std::unordered_map<PaperId, const ReferenceEntry*> by_id;
    for (const auto& r : bundle.references) by_id.emplace(r.cited.id, &r);

    std::string block;
    std::unordered_map<PaperId, bool> used;
    for (std::size_t i = 0; i < permutation.size(); ++i) {
        auto it = by_id.find(permutation[i]);
        if (it == by_id.end()) {
            throw PreconditionError("permutation names unknown reference " + permutation[i].str());
        }
        if (used[permutation[i]]) {
            throw PreconditionError("permutation repeats reference " + permutation[i].str());
        }
        used[permutation[i]] = true;
        const auto& ref = *it->second;
        if (i > 0) block += "\n\n";
        block += "[" + std::to_string(i + 1) + "] paperId: " + ref.cited.id.str() + "\n";
        block += "title: " + (ref.cited.title.empty() ? std::string("(untitled)") : ref.cited.title) + "\n";
        block += "contexts: " +
                 (ref.contexts.empty() ? std::string("(no citation contexts available)") : join_contexts(ref.contexts));
    }

    return tmpl.render({
        {"citing_title", bundle.citing.title.empty() ? std::string("(untitled)") : bundle.citing.title},
        {"citing_id", bundle.citing.id.str()},
        {"reference_count", std::to_string(bundle.size())},
        {"references", block},
    });
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

} // namespace citeimpact
