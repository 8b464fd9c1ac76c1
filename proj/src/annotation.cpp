#include "citeimpact/annotation.hpp"

#include "citeimpact/corpus_io.hpp"
#include "citeimpact/errors.hpp"
#include "citeimpact/eval.hpp"
#include "citeimpact/judge.hpp"
#include "citeimpact/random.hpp"

#include <fstream>
#include <set>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace citeimpact {

namespace {

ordered_json error_body(const std::string& message) { return {{"error", message}}; }

ordered_json submission_to_json(const std::vector<SubmittedItem>& items) {
    auto arr = ordered_json::array();
    for (const auto& item : items) {
        arr.push_back({{"paperId", item.paper_id.str()}, {"impactCategory", std::string(to_string(item.category))}});
    }
    return arr;
}

} // namespace

ordered_json task_to_json(const AnnotationTask& task) {
    ordered_json j;
    j["taskId"] = task.task_id;
    j["citing"] = {{"paperId", task.citing.id.str()}, {"title", task.citing.title}};
    j["status"] = task.status == TaskStatus::Open ? "open" : "submitted";
    j["shuffleSeed"] = task.shuffle_seed;
    auto refs = ordered_json::array();
    for (const auto& r : task.references) {
        auto contexts = ordered_json::array();
        for (const auto& c : r.contexts) contexts.push_back(c.text());
        refs.push_back({{"paperId", r.cited.id.str()}, {"title", r.cited.title}, {"contexts", std::move(contexts)}});
    }
    j["references"] = std::move(refs);
    j["submission"] = task.submission ? submission_to_json(*task.submission) : ordered_json(nullptr);
    return j;
}

AnnotationStore::AnnotationStore(const std::vector<CitingPaperBundle>& bundles,
                                 std::map<PaperId, std::vector<PaperId>> model_rankings, fs::path state_dir,
                                 std::uint64_t seed)
    : state_dir_(std::move(state_dir)) {
    fs::create_directories(state_dir_);
    for (const auto& bundle : bundles) {
        check_file_stem(bundle.citing.id);
        auto slot = std::make_unique<Slot>(AnnotationTask{bundle.citing.id.str(), bundle.citing, {}, 0, TaskStatus::Open, std::nullopt});
        auto& task = slot->task;
        task.shuffle_seed = splitmix64(seed ^ fnv1a64(task.task_id));
        for (const auto& id : permute_references(bundle, task.shuffle_seed)) task.references.push_back(*bundle.find(id));
        if (auto it = model_rankings.find(bundle.citing.id); it != model_rankings.end()) {
            slot->model_ranking = std::move(it->second);
        }
        replay(*slot);
        if (!slots_.count(task.task_id)) order_.push_back(task.task_id);
        slots_[task.task_id] = std::move(slot);
    }
}

void AnnotationStore::replay(Slot& slot) {
    std::ifstream in(state_dir_ / (slot.task.task_id + ".journal.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
        const auto event = json::parse(line, nullptr, false);
        if (event.is_discarded() || event.value("event", "") != "submitted") continue;
        std::vector<SubmittedItem> items;
        try {
            for (const auto& item : event.at("ranking")) {
                items.push_back({PaperId(item.at("paperId").get<std::string>()),
                                 parse_category(item.at("impactCategory").get<std::string>()).value()});
            }
        } catch (const std::exception&) {
            continue; // torn write
        }
        slot.task.submission = std::move(items);
        slot.task.status = TaskStatus::Submitted;
        break;
    }
}

std::optional<AnnotationTask> AnnotationStore::task(const std::string& task_id) const {
    auto it = slots_.find(task_id);
    if (it == slots_.end()) return std::nullopt;
    std::lock_guard lock(it->second->mutex);
    return it->second->task;
}

StoreReply AnnotationStore::list() const {
    auto arr = ordered_json::array();
    for (const auto& id : order_) {
        const auto& slot = *slots_.at(id);
        std::lock_guard lock(slot.mutex);
        arr.push_back({{"taskId", id},
                       {"title", slot.task.citing.title},
                       {"references", slot.task.references.size()},
                       {"status", slot.task.status == TaskStatus::Open ? "open" : "submitted"}});
    }
    return {200, {{"tasks", std::move(arr)}}};
}

StoreReply AnnotationStore::get(const std::string& task_id) const {
    auto t = task(task_id);
    if (!t) return {404, error_body("unknown task " + task_id)};
    return {200, task_to_json(*t)};
}

StoreReply AnnotationStore::submit(const std::string& task_id, const json& body) {
    auto it = slots_.find(task_id);
    if (it == slots_.end()) return {404, error_body("unknown task " + task_id)};
    auto& slot = *it->second;

    const auto ranking = body.is_object() ? body.find("ranking") : body.end();
    if (!body.is_object() || ranking == body.end() || !ranking->is_array()) {
        return {400, error_body("body must be {\"ranking\": [{\"paperId\", \"impactCategory\"}, ...]}")};
    }

    std::lock_guard lock(slot.mutex);
    if (slot.task.status == TaskStatus::Submitted) {
        return {409, error_body("task " + task_id + " was already submitted")};
    }

    std::set<std::string> expected;
    for (const auto& r : slot.task.references) expected.insert(r.cited.id.str());
    std::set<std::string> seen;
    std::vector<std::string> duplicate, unknown, bad_category;
    std::vector<SubmittedItem> items;
    for (const auto& item : *ranking) {
        const auto id = item.is_object() ? item.value("paperId", json()) : json();
        if (!id.is_string() || id.get<std::string>().empty()) {
            unknown.push_back(item.dump());
            continue;
        }
        const auto key = id.get<std::string>();
        if (!expected.count(key)) {
            unknown.push_back(key);
            continue;
        }
        if (!seen.insert(key).second) {
            duplicate.push_back(key);
            continue;
        }
        const auto cat = item.value("impactCategory", json());
        const auto parsed = cat.is_string() ? parse_category(cat.get<std::string>()) : std::nullopt;
        if (!parsed) {
            bad_category.push_back(key);
            continue;
        }
        items.push_back({PaperId(key), *parsed});
    }
    std::vector<std::string> missing;
    for (const auto& r : slot.task.references) {
        if (!seen.count(r.cited.id.str())) missing.push_back(r.cited.id.str());
    }
    if (!missing.empty() || !duplicate.empty() || !unknown.empty() || !bad_category.empty()) {
        return {422, {{"error", "ranking must list every reference exactly once with a category"},
                      {"missing", missing},
                      {"duplicate", duplicate},
                      {"unknown", unknown},
                      {"invalid_category", bad_category}}};
    }

    ordered_json event;
    event["event"] = "submitted";
    event["ranking"] = submission_to_json(items);
    {
        std::ofstream out(state_dir_ / (task_id + ".journal.jsonl"), std::ios::app);
        out << event.dump() << '\n';
        out.flush();
        if (!out) return {500, error_body("could not persist submission")};
    }
    slot.task.submission = std::move(items);
    slot.task.status = TaskStatus::Submitted;
    return {200, {{"taskId", task_id}, {"status", "submitted"}}};
}

StoreReply AnnotationStore::agreement(const std::string& task_id) const {
    auto it = slots_.find(task_id);
    if (it == slots_.end()) return {404, error_body("unknown task " + task_id)};
    const auto& slot = *it->second;
    std::lock_guard lock(slot.mutex);
    if (slot.task.status != TaskStatus::Submitted) {
        return {409, error_body("task " + task_id + " has no submission yet")};
    }
    if (slot.model_ranking.empty()) return {404, error_body("no model ranking for task " + task_id)};

    std::set<PaperId> in_model(slot.model_ranking.begin(), slot.model_ranking.end());
    std::set<PaperId> in_submission;
    std::vector<PaperId> human;
    for (const auto& item : *slot.task.submission) {
        in_submission.insert(item.paper_id);
        if (in_model.count(item.paper_id)) human.push_back(item.paper_id);
    }
    std::vector<PaperId> model;
    for (const auto& id : slot.model_ranking) {
        if (in_submission.count(id)) model.push_back(id);
    }
    if (human.size() < 2) {
        return {409, error_body("fewer than two references shared with the model ranking")};
    }
    return {200, {{"taskId", task_id}, {"rho", spearman(std::span<const PaperId>(human), std::span<const PaperId>(model))},
                  {"n", human.size()}}};
}

} // namespace citeimpact
