#pragma once

#include "citeimpact/types.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace citeimpact {

// Text template with {{name}} placeholders. Rendering fails on a placeholder
// that has no value, so a template typo never reaches a provider.
class PromptTemplate {
public:
    explicit PromptTemplate(std::string text);

    static PromptTemplate from_file(const std::filesystem::path& path);
    // The ranking template shipped in share/prompts/ranking_prompt.txt.
    static PromptTemplate builtin();

    std::string render(const std::map<std::string, std::string>& values) const;
    const std::vector<std::string>& placeholders() const noexcept { return placeholders_; }
    const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
    std::vector<std::string> placeholders_;
};

// Renders the ranking prompt for bundle with references listed in the order
// given by permutation, which must be a bijection over the bundle's ids.
std::string build_ranking_prompt(const CitingPaperBundle& bundle, std::span<const PaperId> permutation,
                                 const PromptTemplate& tmpl = PromptTemplate::builtin());

// Rough token count (one token per four bytes, rounded up).
std::size_t estimate_tokens(std::string_view text);

} // namespace citeimpact
