#include "helpers.hpp"

#include "citeimpact/cache.hpp"
#include "citeimpact/errors.hpp"
#include "citeimpact/ground_truth.hpp"
#include "citeimpact/http.hpp"
#include "citeimpact/rate_limit.hpp"
#include "citeimpact/scholar.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <set>
#include <thread>

using namespace citeimpact;
using testing_support::TempDir;
using nlohmann::json;

namespace {

const std::string kDlg = "5507d267bbf0b4cdb9f893c3c0960a45016f7010";

ScholarOptions offline() {
    ScholarOptions o;
    o.requests_per_second = 0.0;
    o.retry.base_delay = std::chrono::milliseconds(1);
    return o;
}

std::string refs_target(const std::string& id, std::size_t offset = 0) {
    return "/graph/v1/paper/" + id + "/references?fields=contexts,paperId,title,abstract&offset=" +
           std::to_string(offset) + "&limit=100";
}

std::string cites_target(const std::string& id, std::size_t offset = 0) {
    return "/graph/v1/paper/" + id + "/citations?fields=paperId,title,abstract&offset=" + std::to_string(offset) +
           "&limit=100";
}

std::string paper_target(const std::string& id) { return "/graph/v1/paper/" + id + "?fields=paperId,title,abstract"; }

json citing(const std::string& id) { return {{"citingPaper", {{"paperId", id}, {"title", "T " + id}}}}; }

// Serves the iDLG bundle fixture in API shape.
void add_idlg(FixtureTransport& t, const CitingPaperBundle& b) {
    json data = json::array();
    for (const auto& r : b.references) {
        json ctx = json::array();
        for (const auto& c : r.contexts) ctx.push_back(c.text());
        data.push_back({{"contexts", ctx}, {"citedPaper", {{"paperId", r.cited.id.str()}, {"title", r.cited.title}}}});
    }
    t.add(refs_target(b.citing.id.str()), {200, json{{"offset", 0}, {"data", data}}.dump()});
    t.add(paper_target(b.citing.id.str()), {200, json{{"paperId", b.citing.id.str()}, {"title", b.citing.title}}.dump()});
}

} // namespace

TEST(ResponseCache, RoundTripAndColdMiss) {
    TempDir dir;
    ResponseCache cache(dir.path());
    CacheKey key{"abc", "paper"};
    EXPECT_FALSE(cache.get(key).has_value());
    const std::string payload = "{\"x\": \"\xc3\xa9\\n\"}";
    cache.put(key, payload);
    EXPECT_EQ(cache.get(key), payload);
    EXPECT_FALSE(cache.get({"abc", "references"}).has_value());
}

TEST(ResponseCache, LastWriteWins) {
    TempDir dir;
    ResponseCache cache(dir.path());
    CacheKey key{"abc", "paper"};
    cache.put(key, "first");
    cache.put(key, "second");
    EXPECT_EQ(cache.get(key), "second");
    ResponseCache reopened(dir.path());
    EXPECT_EQ(reopened.get(key), "second");
}

TEST(ResponseCache, CorruptEntryIsEvicted) {
    TempDir dir;
    ResponseCache cache(dir.path());
    CacheKey key{"abc", "paper"};
    cache.put(key, "payload");
    std::ofstream(cache.entry_path(key), std::ios::trunc) << "{not json";
    EXPECT_FALSE(cache.get(key).has_value());
    EXPECT_FALSE(std::filesystem::exists(cache.entry_path(key)));
}

TEST(ResponseCache, ConcurrentReadersAndWriters) {
    TempDir dir;
    ResponseCache cache(dir.path());
    std::vector<std::jthread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&cache, t] {
            for (int i = 0; i < 50; ++i) {
                CacheKey key{"k" + std::to_string(i % 5), "paper"};
                cache.put(key, "v" + std::to_string(t));
                auto got = cache.get(key);
                ASSERT_TRUE(got.has_value());
                EXPECT_EQ(got->front(), 'v');
            }
        });
    }
}

TEST(Scholar, ResolveTitle) {
    FixtureTransport t;
    t.add("/graph/v1/paper/search/match?query=Deep%20Leakage%20from%20Gradients&fields=paperId,title",
          {200, json{{"data", {{{"paperId", kDlg}, {"title", "Deep Leakage from Gradients"}}}}}.dump()});
    // captured shape of a no-match answer
    t.add("/graph/v1/paper/search/match?query=9c1f3a77e0d24b6b8e51&fields=paperId,title",
          {404, R"({"error":"Title match not found"})"});
    ScholarClient client(t, nullptr, offline());
    EXPECT_EQ(client.resolve_paper_by_title("Deep Leakage from Gradients"), PaperId(kDlg));
    EXPECT_FALSE(client.resolve_paper_by_title("9c1f3a77e0d24b6b8e51").has_value());
    EXPECT_THROW(client.resolve_paper_by_title(""), PreconditionError);
    EXPECT_THROW(client.resolve_paper_by_title("   "), PreconditionError);
}

TEST(Scholar, CitingPapers) {
    FixtureTransport t;
    t.add(cites_target("p"), {200, json{{"offset", 0}, {"data", {citing("q1"), citing("q2"), citing("q3")}}}.dump()});
    t.add(cites_target("lonely"), {200, json{{"offset", 0}, {"data", json::array()}}.dump()});
    ScholarClient client(t, nullptr, offline());
    auto recs = client.fetch_citing_papers(PaperId("p"));
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[0].id, PaperId("q1"));
    EXPECT_EQ(recs[2].id, PaperId("q3"));
    EXPECT_TRUE(client.fetch_citing_papers(PaperId("lonely")).empty());
    EXPECT_THROW(client.fetch_citing_papers(PaperId("nope")), NotFoundError);
}

TEST(Scholar, DuplicateCiterAcrossPagesKeptOnce) {
    FixtureTransport t;
    ScholarOptions o = offline();
    o.page_size = 2;
    auto target = [](std::size_t off) {
        return "/graph/v1/paper/p/citations?fields=paperId,title,abstract&offset=" + std::to_string(off) + "&limit=2";
    };
    t.add(target(0), {200, json{{"offset", 0}, {"next", 2}, {"data", {citing("q1"), citing("q2")}}}.dump()});
    t.add(target(2), {200, json{{"offset", 2}, {"data", {citing("q2"), citing("q3")}}}.dump()});
    ScholarClient client(t, nullptr, o);
    auto recs = client.fetch_citing_papers(PaperId("p"));
    ASSERT_EQ(recs.size(), 3u);
    std::set<PaperId> ids;
    for (const auto& r : recs) ids.insert(r.id);
    EXPECT_EQ(ids.size(), 3u);
    EXPECT_EQ(t.calls(), 2u);
}

TEST(Scholar, IdlgReferencesWithContexts) {
    const auto fixture = testing_support::idlg_bundle();
    FixtureTransport t;
    add_idlg(t, fixture);
    ScholarClient client(t, nullptr, offline());
    auto bundle = client.fetch_references_with_contexts(fixture.citing.id);
    ASSERT_TRUE(bundle.has_value());
    EXPECT_EQ(bundle->size(), 11u);
    const auto* dlg = bundle->find(PaperId(kDlg));
    ASSERT_NE(dlg, nullptr);
    EXPECT_EQ(dlg->cited.title, "Deep Leakage from Gradients");
    EXPECT_EQ(dlg->contexts.size(), 5u);
}

TEST(Scholar, EmptyReferenceListIsDiscarded) {
    FixtureTransport t;
    t.add(refs_target("bare"), {200, R"({"offset":0,"data":[]})"});
    // references without a paperId are unusable too
    t.add(refs_target("anon"), {200, R"({"offset":0,"data":[{"contexts":["x"],"citedPaper":{"paperId":null,"title":"?"}}]})"});
    ScholarClient client(t, nullptr, offline());
    EXPECT_FALSE(client.fetch_references_with_contexts(PaperId("bare")).has_value());
    EXPECT_FALSE(client.fetch_references_with_contexts(PaperId("anon")).has_value());
    // no paper lookup was needed
    for (const auto& r : t.requested()) EXPECT_EQ(r.find("?fields=paperId,title,abstract"), std::string::npos) << r;
}

TEST(Scholar, CacheHitSkipsNetwork) {
    TempDir dir;
    ResponseCache cache(dir.path());
    const auto fixture = testing_support::idlg_bundle();
    FixtureTransport t;
    add_idlg(t, fixture);
    {
        ScholarClient client(t, &cache, offline());
        ASSERT_TRUE(client.fetch_references_with_contexts(fixture.citing.id).has_value());
    }
    const auto warm = t.calls();
    EXPECT_EQ(warm, 2u);
    ScholarClient again(t, &cache, offline());
    auto bundle = again.fetch_references_with_contexts(fixture.citing.id);
    ASSERT_TRUE(bundle.has_value());
    EXPECT_EQ(bundle->size(), 11u);
    EXPECT_EQ(t.calls(), warm);
}

TEST(Scholar, RetriesThenGivesUp) {
    FixtureTransport t;
    t.add(paper_target("busy"), {429, "slow down"});
    ScholarClient client(t, nullptr, offline());
    EXPECT_THROW(client.fetch_paper(PaperId("busy")), TransportError);
    EXPECT_EQ(t.calls(), 3u);
}

TEST(Dedup, IdempotentAndUnique) {
    auto b = testing_support::small_bundle(4);
    b.references.push_back(b.references[1]);
    b.references.push_back(b.references[3]);
    dedup_references(b);
    EXPECT_EQ(b.size(), 4u);
    auto again = b;
    dedup_references(again);
    EXPECT_EQ(again.reference_ids(), b.reference_ids());
}

namespace {

std::optional<CitingPaperBundle> source_without(const PaperId& id, const std::string& bare) {
    if (id.str() == bare) return std::nullopt;
    return testing_support::small_bundle(3, id.str());
}

} // namespace

TEST(GroundTruth, FiltersAndCollapses) {
    TempDir dir;
    std::ofstream(dir / "gt.jsonl")
        << R"({"citing_id":"a","cited_id":"r0","context_text":"x","label":"impact-revealing"})" "\n"
        << R"({"citing_id":"a","cited_id":"r0","context_text":"x","label":"impact-revealing"})" "\n"
        << R"({"citing_id":"a","cited_id":"r0","context_text":" x ","label":"other"})" "\n"
        << R"({"citing_id":"a","cited_id":"r0","context_text":"y","label":"other"})" "\n"
        << R"({"citing_id":"a","cited_id":"r1","context_text":"z","label":"other"})" "\n"
        << R"({"citing_id":"b","cited_id":"r2","context_text":"w","label":"other"})" "\n";
    auto set = load_ground_truth(dir / "gt.jsonl", [](const PaperId& id) { return source_without(id, "b"); });
    EXPECT_EQ(set.stats.rows_read, 6u);
    EXPECT_EQ(set.stats.duplicate_rows, 1u);
    EXPECT_EQ(set.stats.repeated_contexts, 1u);
    EXPECT_EQ(set.stats.merged_contexts, 1u);
    EXPECT_EQ(set.stats.label_conflicts, 1u);
    EXPECT_EQ(set.stats.no_reference_rows, 1u);
    ASSERT_EQ(set.records.size(), 2u);
    EXPECT_EQ(set.records[0].cited_id, PaperId("r0"));
    EXPECT_EQ(set.records[0].label, BinaryLabel::ImpactRevealing);
    EXPECT_EQ(set.bundles.size(), 1u);

    // pairs are unique
    std::set<CitationPair> pairs;
    for (const auto& r : set.records) EXPECT_TRUE(pairs.insert(r.pair()).second);

    // idempotent over its own output
    write_ground_truth(dir / "again.jsonl", set.records);
    auto again = load_ground_truth(dir / "again.jsonl", [](const PaperId& id) { return source_without(id, "b"); });
    EXPECT_EQ(again.stats.cited_pairs, set.stats.cited_pairs);
    EXPECT_EQ(again.stats.citing_papers, set.stats.citing_papers);
    EXPECT_EQ(again.stats.duplicate_rows + again.stats.repeated_contexts + again.stats.no_reference_rows, 0u);
}

TEST(GroundTruth, SingleDuplicatedRecord) {
    std::vector<GroundTruthRow> rows(2, GroundTruthRow{PaperId("a"), PaperId("r0"), "ctx", BinaryLabel::Other, 1});
    auto set = filter_ground_truth(rows, [](const PaperId& id) { return source_without(id, ""); });
    EXPECT_EQ(set.records.size(), 1u);
}

TEST(GroundTruth, CsvWithQuotesAndTsv) {
    TempDir dir;
    std::ofstream(dir / "gt.csv") << "citing_id,cited_id,context_text,label\n"
                                  << "a,r0,\"uses, as shown \"\"here\"\"\",impact-revealing\n"
                                  << "a,r1,,other\n";
    auto rows = read_ground_truth_rows(dir / "gt.csv");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].context_text, "uses, as shown \"here\"");
    EXPECT_EQ(rows[1].label, BinaryLabel::Other);

    std::ofstream(dir / "gt.tsv") << "label\tcited_id\tciting_id\n" << "other\tr5\ta\n";
    auto tsv = read_ground_truth_rows(dir / "gt.tsv");
    ASSERT_EQ(tsv.size(), 1u);
    EXPECT_EQ(tsv[0].cited_id, PaperId("r5"));
}

TEST(GroundTruth, MalformedLineNamesLocation) {
    TempDir dir;
    std::ofstream(dir / "bad.jsonl") << R"({"citing_id":"a","cited_id":"r0","label":"other"})" "\n"
                                     << R"({"citing_id":"a","cited_id":"r1","label":"maybe"})" "\n";
    try {
        read_ground_truth_rows(dir / "bad.jsonl");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
    }
}

TEST(TokenBucket, PacesRequests) {
    TokenBucket bucket(50.0, 1.0);
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 6; ++i) bucket.acquire();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    // first token is free, five more at 20 ms each
    EXPECT_GE(elapsed, std::chrono::milliseconds(90));

    TokenBucket unlimited(0.0);
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 1000; ++i) unlimited.acquire();
    EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(50));
}

TEST(CorpusIo, RoundTrip) {
    TempDir dir;
    std::vector<CitingPaperBundle> corpus{testing_support::idlg_bundle(), testing_support::small_bundle(3)};
    write_corpus(dir / "c.jsonl", corpus);
    auto back = read_corpus(dir / "c.jsonl");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].reference_ids(), corpus[0].reference_ids());
    EXPECT_EQ(bundle_to_json(back[0]).dump(), bundle_to_json(corpus[0]).dump());
    write_corpus(dir / "c2.jsonl", back);
    EXPECT_EQ(read_text_file(dir / "c.jsonl"), read_text_file(dir / "c2.jsonl"));
}
