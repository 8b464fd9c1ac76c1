#include "citeimpact/corpus_io.hpp"

#include "citeimpact/errors.hpp"

#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace citeimpact {

namespace {

ordered_json record_fields(const PaperRecord& r) {
    ordered_json j;
    j["paperId"] = r.id.str();
    j["title"] = r.title;
    if (r.abstract) j["abstract"] = *r.abstract;
    return j;
}

PaperRecord record_from(const json& j) {
    PaperRecord r{PaperId(j.at("paperId").get<std::string>()), j.value("title", std::string()), std::nullopt};
    if (auto a = j.find("abstract"); a != j.end() && a->is_string()) r.abstract = a->get<std::string>();
    return r;
}

} // namespace

ordered_json bundle_to_json(const CitingPaperBundle& bundle) {
    auto doc = record_fields(bundle.citing);
    auto refs = ordered_json::array();
    for (const auto& ref : bundle.references) {
        auto r = record_fields(ref.cited);
        auto ctx = ordered_json::array();
        for (const auto& c : ref.contexts) ctx.push_back(c.text());
        r["contexts"] = std::move(ctx);
        refs.push_back(std::move(r));
    }
    doc["references"] = std::move(refs);
    return doc;
}

CitingPaperBundle bundle_from_json(const json& doc) {
    CitingPaperBundle b{record_from(doc), {}};
    for (const auto& r : doc.at("references")) {
        ReferenceEntry entry{record_from(r), {}};
        if (auto ctx = r.find("contexts"); ctx != r.end()) {
            for (const auto& c : *ctx) entry.contexts.emplace_back(c.get<std::string>());
        }
        b.references.push_back(std::move(entry));
    }
    return b;
}

std::vector<CitingPaperBundle> read_corpus(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus " + path.string());
    std::vector<CitingPaperBundle> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto b = bundle_from_json(json::parse(line));
            validate_bundle(b);
            out.push_back(std::move(b));
        } catch (const std::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_corpus(const fs::path& path, const std::vector<CitingPaperBundle>& bundles) {
    std::string text;
    for (const auto& b : bundles) {
        text += bundle_to_json(b).dump();
        text += '\n';
    }
    write_text_file(path, text);
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_file_stem(const PaperId& id) {
    for (char c : id.str()) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '-' || c == '_' || c == ':';
        if (!ok) throw PreconditionError("paper id '" + id.str() + "' is not usable as a file name");
    }
}

} // namespace citeimpact
