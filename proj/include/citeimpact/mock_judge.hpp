#pragma once

#include "citeimpact/judge.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>

namespace citeimpact {

// Offline judge. References are ordered by a hidden score that depends only on
// the paper id and score_seed, so every run agrees on the underlying ranking;
// the run seed drives the injected noise.
struct MockJudgeOptions {
    std::uint64_t score_seed = 0;
    double drop_rate = 0.0;          // per reference, omit from the output
    double duplicate_rate = 0.0;     // per kept reference, emit a second copy at a random position
    double hallucination_rate = 0.0; // per kept reference, insert an invented paper
    std::size_t drop_min_references = 0; // drops apply only to bundles at least this large
    double position_bias = 0.0;      // score bonus for references shown early in the prompt
};

// Hidden score in [0, 1).
double hidden_score(const PaperId& id, std::uint64_t score_seed);

// Category of the reference at 0-based position in an emitted list of length
// count: top ceil(20%) High, bottom ceil(30%) Low, Medium otherwise.
ImpactCategory category_for_position(std::size_t position, std::size_t count);

// Noise-free categories of every reference of bundle.
std::map<PaperId, ImpactCategory> planted_categories(const CitingPaperBundle& bundle, std::uint64_t score_seed);

// Synthetic completion text: a JSON ranking array in the per-run file format.
std::string mock_judge(const CitingPaperBundle& bundle, std::span<const PaperId> permutation, std::uint64_t seed,
                       const MockJudgeOptions& options = {});

class MockProvider : public ProviderAdapter {
public:
    explicit MockProvider(MockJudgeOptions options = {}) : options_(options) {}

    const MockJudgeOptions& options() const noexcept { return options_; }

protected:
    std::string do_complete(const CompletionRequest& request) override {
        return mock_judge(request.bundle, request.order, request.seed, options_);
    }

private:
    MockJudgeOptions options_;
};

} // namespace citeimpact
