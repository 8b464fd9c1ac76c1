#include "citeimpact/cache.hpp"

#include "citeimpact/errors.hpp"
#include "citeimpact/random.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace citeimpact {

namespace {

std::string sanitize_kind(std::string_view kind) {
    std::string out;
    for (char c : kind) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        out += ok ? c : '_';
    }
    return out.empty() ? std::string("default") : out;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::optional<std::string> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

ResponseCache::ResponseCache(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) {
        throw Error("cache directory " + root_.string() + " is not writable: " + ec.message());
    }
}

fs::path ResponseCache::entry_path(const CacheKey& key) const {
    std::string material = key.kind;
    material += '\0';
    material += key.subject;
    const auto h1 = fnv1a64(material);
    const auto h2 = splitmix64(h1 ^ material.size());
    return root_ / sanitize_kind(key.kind) / (hex64(h1) + hex64(h2) + ".json");
}

std::optional<std::string> ResponseCache::get(const CacheKey& key) const {
    const auto path = entry_path(key);
    {
        std::shared_lock lock(mutex_);
        auto text = read_file(path);
        if (!text) return std::nullopt;
        try {
            const auto doc = json::parse(*text);
            if (doc.at("subject").get<std::string>() == key.subject &&
                doc.at("kind").get<std::string>() == key.kind) {
                return doc.at("payload").get<std::string>();
            }
        } catch (const json::exception&) {
        }
    }
    std::unique_lock lock(mutex_);
    std::error_code ec;
    fs::remove(path, ec);
    return std::nullopt;
}

void ResponseCache::put(const CacheKey& key, std::string_view payload) {
    static std::atomic<unsigned long> counter{0};
    const auto path = entry_path(key);
    const json doc = {{"subject", key.subject}, {"kind", key.kind}, {"payload", std::string(payload)}};
    const auto text = doc.dump();

    std::unique_lock lock(mutex_);
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp" + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write cache entry " + tmp.string());
        out << text;
    }
    fs::rename(tmp, path);
}

} // namespace citeimpact
