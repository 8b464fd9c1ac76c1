#pragma once

#include "citeimpact/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace citeimpact {

struct SubmittedItem {
    PaperId paper_id;
    ImpactCategory category;
};

enum class TaskStatus { Open, Submitted };

struct AnnotationTask {
    std::string task_id; // the citing paper id
    PaperRecord citing;
    std::vector<ReferenceEntry> references; // shuffled with shuffle_seed
    std::uint64_t shuffle_seed = 0;
    TaskStatus status = TaskStatus::Open;
    std::optional<std::vector<SubmittedItem>> submission;
};

nlohmann::ordered_json task_to_json(const AnnotationTask& task);

// Outcome of a request against the store, mapped 1:1 onto an HTTP status.
struct StoreReply {
    int status = 200;
    nlohmann::ordered_json body;
};

// Annotation tasks over a corpus. Each task moves open -> submitted exactly
// once; submissions are appended to <state_dir>/<task_id>.journal.jsonl and
// replayed on construction.
class AnnotationStore {
public:
    AnnotationStore(const std::vector<CitingPaperBundle>& bundles,
                    std::map<PaperId, std::vector<PaperId>> model_rankings, std::filesystem::path state_dir,
                    std::uint64_t seed = 0);

    StoreReply list() const;
    StoreReply get(const std::string& task_id) const;
    // 200 on success, 404 unknown task, 400 malformed body, 409 already
    // submitted, 422 when the ranking is not a bijection with categories.
    StoreReply submit(const std::string& task_id, const nlohmann::json& body);
    // 200 {rho, n}, 404 unknown task or no model ranking, 409 before submission.
    StoreReply agreement(const std::string& task_id) const;

    std::optional<AnnotationTask> task(const std::string& task_id) const;

private:
    struct Slot {
        explicit Slot(AnnotationTask t) : task(std::move(t)) {}

        AnnotationTask task;
        std::vector<PaperId> model_ranking;
        mutable std::mutex mutex;
    };

    void replay(Slot& slot);

    std::vector<std::string> order_;
    std::map<std::string, std::unique_ptr<Slot>> slots_;
    std::filesystem::path state_dir_;
};

} // namespace citeimpact
