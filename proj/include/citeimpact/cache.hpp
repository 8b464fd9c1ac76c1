#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

namespace citeimpact {

// Key of one cached API response: the subject (paper id or query text) and the
// request kind ("paper", "citations", "references", "title-match").
struct CacheKey {
    std::string subject;
    std::string kind;
};

// On-disk response cache. One JSON document per key, stored under
// <root>/<kind>/<hash of key>.json. Readers run concurrently; writers are
// serialized and publish through an atomic rename.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path root);

    // nullopt on a cold key. A corrupt entry is evicted and reported as a miss.
    std::optional<std::string> get(const CacheKey& key) const;
    void put(const CacheKey& key, std::string_view payload);

    std::filesystem::path entry_path(const CacheKey& key) const;
    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path root_;
    mutable std::shared_mutex mutex_;
};

} // namespace citeimpact
