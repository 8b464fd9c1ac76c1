#include "helpers.hpp"

#include "citeimpact/chat_provider.hpp"
#include "citeimpact/errors.hpp"
#include "citeimpact/judge.hpp"
#include "citeimpact/mock_judge.hpp"
#include "citeimpact/prompt.hpp"
#include "citeimpact/synthetic.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <algorithm>
#include <map>
#include <set>
#include <thread>

using namespace citeimpact;
using testing_support::small_bundle;

namespace {

const PaperId kDlg("5507d267bbf0b4cdb9f893c3c0960a45016f7010");

std::vector<PaperId> identity(const CitingPaperBundle& b) { return b.reference_ids(); }

// Fails on the n-th call (1-based), otherwise behaves like the mock.
class FlakyProvider : public ProviderAdapter {
public:
    explicit FlakyProvider(std::size_t fail_on) : fail_on_(fail_on) {}

protected:
    std::string do_complete(const CompletionRequest& r) override {
        if (calls() == fail_on_) throw TransportError("connection reset");
        return mock_judge(r.bundle, r.order, r.seed);
    }

private:
    std::size_t fail_on_;
};

class CannedProvider : public ProviderAdapter {
public:
    explicit CannedProvider(std::string text) : text_(std::move(text)) {}

protected:
    std::string do_complete(const CompletionRequest&) override { return text_; }

private:
    std::string text_;
};

} // namespace

TEST(Prompt, IdentityPermutationListsDlgFirst) {
    auto b = testing_support::idlg_bundle();
    auto prompt = build_ranking_prompt(b, identity(b));
    const auto first = prompt.find("[1] paperId: ");
    ASSERT_NE(first, std::string::npos);
    EXPECT_EQ(prompt.substr(first, 13 + 40), "[1] paperId: " + kDlg.str());
    EXPECT_LT(prompt.find("Deep Leakage from Gradients"), prompt.find("Federated Learning: Collaborative"));
    EXPECT_NE(prompt.find("iDLG: Improved Deep Leakage from Gradients"), std::string::npos);
    EXPECT_EQ(prompt.find("{{"), std::string::npos);
}

TEST(Prompt, ContextsJoinedWithPipe) {
    auto b = small_bundle(1);
    b.references[0].contexts.emplace_back("second");
    auto prompt = build_ranking_prompt(b, identity(b));
    EXPECT_NE(prompt.find("contexts: context 0 | second"), std::string::npos);
}

TEST(Prompt, RejectsNonBijections) {
    auto b = testing_support::idlg_bundle();
    auto ids = identity(b);
    EXPECT_THROW(build_ranking_prompt(b, std::vector<PaperId>{}), PreconditionError);
    auto missing_one = ids;
    missing_one.pop_back();
    EXPECT_THROW(build_ranking_prompt(b, missing_one), PreconditionError);
    auto repeated = ids;
    repeated.back() = repeated.front();
    EXPECT_THROW(build_ranking_prompt(b, repeated), PreconditionError);
    auto stranger = ids;
    stranger.back() = PaperId("not-a-reference");
    EXPECT_THROW(build_ranking_prompt(b, stranger), PreconditionError);
}

TEST(Prompt, TemplateRendering) {
    PromptTemplate t("Hello {{name}}, {{name}} has {{n}} refs");
    EXPECT_EQ(t.render({{"name", "x"}, {"n", "3"}}), "Hello x, x has 3 refs");
    EXPECT_THROW(t.render({{"name", "x"}}), PreconditionError);
    EXPECT_EQ(PromptTemplate::builtin().text(), read_text_file(CITEIMPACT_PROMPT_FILE));
}

TEST(Permutation, DeterministicAndBijective) {
    auto b = small_bundle(30);
    auto a1 = permute_references(b, 42);
    EXPECT_EQ(a1, permute_references(b, 42));
    EXPECT_NE(a1, permute_references(b, 43));
    auto sorted = a1;
    std::sort(sorted.begin(), sorted.end());
    auto ids = identity(b);
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(sorted, ids);
    EXPECT_EQ(permute_references(small_bundle(1), 7), std::vector<PaperId>{PaperId("r0")});
}

TEST(Permutation, SeedSweepCoversAllOrders) {
    auto b = small_bundle(3);
    std::set<std::vector<PaperId>> seen;
    for (std::uint64_t s = 0; s < 6; ++s) seen.insert(permute_references(b, s));
    // six seeds need not hit all six orders; a short sweep must
    for (std::uint64_t s = 6; seen.size() < 6 && s < 200; ++s) seen.insert(permute_references(b, s));
    EXPECT_EQ(seen.size(), 6u);
}

TEST(Permutation, ChiSquareUniform) {
    auto b = small_bundle(3);
    std::map<std::vector<PaperId>, int> counts;
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) ++counts[permute_references(b, static_cast<std::uint64_t>(s))];
    ASSERT_EQ(counts.size(), 6u);
    const double expected = draws / 6.0;
    double chi2 = 0;
    for (const auto& [_, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, 15.0863); // 99th percentile, 5 degrees of freedom
}

TEST(Parse, SampleRunOutput) {
    auto b = testing_support::idlg_bundle();
    auto run = parse_ranking_response(read_text_file(testing_support::fixture("idlg_run_sample.json")), b, 1, 9);
    ASSERT_EQ(run.entries.size(), 6u);
    EXPECT_EQ(run.entries[0].rank, 1);
    EXPECT_EQ(run.entries[0].paper_id, kDlg);
    EXPECT_EQ(run.entries[0].title, "Deep Leakage from Gradients");
    EXPECT_EQ(run.entries[0].category, ImpactCategory::High);
    EXPECT_EQ(run.entries.back().rank, 11);
    EXPECT_EQ(run.entries.back().category, ImpactCategory::Low);
    EXPECT_EQ(run.missing.size(), 5u);
    EXPECT_EQ(run.seed, 9u);
    // field names survive a write/parse cycle
    auto text = ranking_entries_to_json(run.entries);
    for (const char* f : {"\"rank\"", "\"paperId\"", "\"title\"", "\"contexts\"", "\"reason\"", "\"impactCategory\""}) {
        EXPECT_NE(text.find(f), std::string::npos) << f;
    }
    EXPECT_EQ(ranking_entries_to_json(parse_ranking_response(text, b).entries), text);
}

TEST(Parse, ToleratesSurroundingProse) {
    auto b = small_bundle(2);
    auto run = parse_ranking_response(
        "Sure! [see below]\n```json\n[{\"rank\": 1, \"paperId\": \"r1\", \"impactCategory\": \"high\"},"
        " {\"rank\": \"2\", \"paperId\": \"r0\", \"title\": \"has ] bracket\", \"impactCategory\": \"LOW\"}]\n```",
        b);
    ASSERT_EQ(run.entries.size(), 2u);
    EXPECT_EQ(run.entries[0].paper_id, PaperId("r1"));
    EXPECT_EQ(run.entries[0].category, ImpactCategory::High);
    EXPECT_EQ(run.entries[1].rank, 2);
}

TEST(Parse, DuplicateKeepsBestRank) {
    auto b = small_bundle(3);
    auto run = parse_ranking_response(R"([{"rank":3,"paperId":"r0","impactCategory":"Low"},
        {"rank":1,"paperId":"r0","impactCategory":"High"},{"rank":2,"paperId":"r1","impactCategory":"Medium"}])",
                                      b);
    ASSERT_EQ(run.entries.size(), 2u);
    EXPECT_EQ(run.entries[0].paper_id, PaperId("r0"));
    EXPECT_EQ(run.entries[0].rank, 1);
    EXPECT_EQ(run.missing, std::vector<PaperId>{PaperId("r2")});
}

TEST(Parse, HallucinationDropped) {
    auto b = small_bundle(2);
    auto run = parse_ranking_response(R"([{"rank":1,"paperId":"r0","impactCategory":"High"},
        {"rank":2,"paperId":"ghost","impactCategory":"Low"}])",
                                      b);
    EXPECT_EQ(run.entries.size(), 1u);
    EXPECT_EQ(run.dropped_hallucinations, std::vector<std::string>{"ghost"});
}

TEST(Parse, Errors) {
    auto b = small_bundle(2);
    EXPECT_THROW(parse_ranking_response("no array here", b), ParseError);
    EXPECT_THROW(parse_ranking_response(R"([{"rank":1,"paperId":"r0","impactCategory":"Critical"}])", b), ParseError);
    EXPECT_THROW(parse_ranking_response(R"([{"rank":0,"paperId":"r0","impactCategory":"Low"}])", b), ParseError);
}

TEST(Psc, ThreeCallsThreeRuns) {
    auto b = testing_support::idlg_bundle();
    MockProvider mock;
    auto res = run_psc(b, JudgeConfig{}, default_seeds(5), mock);
    EXPECT_EQ(mock.calls(), 3u);
    ASSERT_EQ(res.runs.size(), 3u);
    EXPECT_TRUE(res.failures.empty());
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(res.runs[i].run_index, i + 1);
        EXPECT_EQ(res.runs[i].seed, default_seeds(5)[i]);
    }
}

TEST(Psc, FailingRunIsRecorded) {
    auto b = small_bundle(8);
    FlakyProvider flaky(2);
    auto res = run_psc(b, JudgeConfig{}, default_seeds(0), flaky);
    ASSERT_EQ(res.runs.size(), 2u);
    ASSERT_EQ(res.failures.size(), 1u);
    EXPECT_EQ(res.failures[0].run_index, 2);
    EXPECT_EQ(res.runs[1].run_index, 3);

    CannedProvider junk("nothing useful");
    EXPECT_THROW(run_psc(b, JudgeConfig{}, default_seeds(0), junk), Error);
}

TEST(Psc, CallCountIsThreePerPaper) {
    auto corpus = synthetic_corpus({.bundles = 25, .seed = 3});
    MockProvider mock;
    for (const auto& b : corpus) run_psc(b, JudgeConfig{}, default_seeds(1), mock);
    EXPECT_EQ(mock.calls(), 75u);
}

TEST(Psc, OverlongPromptRefusedBeforeAnyCall) {
    JudgeConfig cfg;
    cfg.max_context_tokens = 50;
    MockProvider mock;
    EXPECT_THROW(run_psc(testing_support::idlg_bundle(), cfg, default_seeds(0), mock), PromptTooLongError);
    EXPECT_EQ(mock.calls(), 0u);
}

TEST(Psc, Preconditions) {
    MockProvider mock;
    JudgeConfig bad;
    bad.temperature = 2.5;
    EXPECT_THROW(run_psc(small_bundle(2), bad, default_seeds(0), mock), PreconditionError);
    bad = JudgeConfig{};
    bad.top_p = -0.1;
    EXPECT_THROW(run_psc(small_bundle(2), bad, default_seeds(0), mock), PreconditionError);
    EXPECT_THROW(run_psc(small_bundle(2), JudgeConfig{}, {1, 1, 2}, mock), PreconditionError);
    EXPECT_EQ(mock.calls(), 0u);
}

TEST(MockJudge, LosslessWithoutNoise) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto b = small_bundle(5 + seed * 3);
        auto order = permute_references(b, seed);
        auto run = parse_ranking_response(mock_judge(b, order, seed), b);
        EXPECT_EQ(run.entries.size(), b.size());
        EXPECT_TRUE(run.missing.empty());
        EXPECT_TRUE(run.dropped_hallucinations.empty());
        std::set<PaperId> ids;
        for (const auto& e : run.entries) ids.insert(e.paper_id);
        EXPECT_EQ(ids.size(), b.size());
    }
}

TEST(MockJudge, FullDropGivesEmptyRun) {
    auto b = small_bundle(12);
    auto run = parse_ranking_response(mock_judge(b, identity(b), 1, {.drop_rate = 1.0}), b);
    EXPECT_TRUE(run.entries.empty());
    EXPECT_EQ(run.missing.size(), 12u);
}

TEST(MockJudge, HiddenOrderIgnoresPresentation) {
    auto b = small_bundle(20);
    auto a = parse_ranking_response(mock_judge(b, permute_references(b, 1), 1), b);
    auto c = parse_ranking_response(mock_judge(b, permute_references(b, 2), 2), b);
    ASSERT_EQ(a.entries.size(), c.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        EXPECT_EQ(a.entries[i].paper_id, c.entries[i].paper_id);
        EXPECT_EQ(a.entries[i].category, c.entries[i].category);
    }
    auto planted = planted_categories(b, 0);
    for (const auto& e : a.entries) EXPECT_EQ(planted.at(e.paper_id), e.category);
}

TEST(MockJudge, NoiseNeverSurvivesParsing) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto b = small_bundle(15);
        MockJudgeOptions noisy{.drop_rate = 0.2, .duplicate_rate = 0.3, .hallucination_rate = 0.3};
        auto run = parse_ranking_response(mock_judge(b, permute_references(b, seed), seed, noisy), b);
        std::set<PaperId> ids;
        for (const auto& e : run.entries) {
            EXPECT_NE(b.find(e.paper_id), nullptr);
            EXPECT_TRUE(ids.insert(e.paper_id).second);
        }
        EXPECT_TRUE(std::is_sorted(run.entries.begin(), run.entries.end(),
                                   [](const auto& x, const auto& y) { return x.rank < y.rank; }));
        EXPECT_EQ(run.entries.size() + run.missing.size(), b.size());
    }
}

TEST(MockJudge, CategoryCutoffs) {
    // 10 entries: 2 High, 5 Medium, 3 Low
    std::vector<ImpactCategory> got;
    for (std::size_t i = 0; i < 10; ++i) got.push_back(category_for_position(i, 10));
    EXPECT_EQ(std::count(got.begin(), got.end(), ImpactCategory::High), 2);
    EXPECT_EQ(std::count(got.begin(), got.end(), ImpactCategory::Low), 3);
    EXPECT_EQ(category_for_position(0, 1), ImpactCategory::High);
}

TEST(ChatProvider, RequestBody) {
    JudgeConfig cfg;
    cfg.model = "m";
    auto body = nlohmann::json::parse(ChatCompletionProvider::request_body("hi", cfg));
    EXPECT_EQ(body["model"], "m");
    EXPECT_EQ(body["messages"][0]["content"], "hi");
    EXPECT_FALSE(body.contains("temperature"));
    cfg.temperature = 0.0;
    cfg.top_p = 1.0;
    body = nlohmann::json::parse(ChatCompletionProvider::request_body("hi", cfg));
    EXPECT_EQ(body["temperature"], 0.0);
    EXPECT_EQ(body["top_p"], 1.0);
}

TEST(ChatProvider, AgainstLocalServer) {
    auto b = small_bundle(4);
    httplib::Server server;
    std::string seen_auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        auto body = nlohmann::json::parse(req.body);
        if (body["model"] == "overloaded") {
            res.status = 503;
            return;
        }
        const std::string ranking = R"(Ranking: [{"rank":1,"paperId":"r2","impactCategory":"High"}])";
        res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", ranking}}}}}}}.dump(),
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttplibTransport transport("http://127.0.0.1:" + std::to_string(port));
    ChatCompletionProvider provider(transport, std::string("sk-test"));
    JudgeConfig cfg;
    cfg.model = "judge";
    auto res = run_psc(b, cfg, default_seeds(0), provider);
    EXPECT_EQ(provider.calls(), 3u);
    EXPECT_EQ(seen_auth, "Bearer sk-test");
    ASSERT_EQ(res.runs.size(), 3u);
    EXPECT_EQ(res.runs[0].entries[0].paper_id, PaperId("r2"));

    cfg.model = "overloaded";
    EXPECT_THROW(run_psc(b, cfg, default_seeds(0), provider), Error);

    server.stop();
    t.join();
}
