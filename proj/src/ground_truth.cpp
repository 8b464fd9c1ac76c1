#include "citeimpact/ground_truth.hpp"

#include "citeimpact/corpus_io.hpp"
#include "citeimpact/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <tuple>

namespace fs = std::filesystem;
using nlohmann::json;

namespace citeimpact {

namespace {

// RFC 4180 style field splitting: quoted fields may contain the delimiter and "" escapes.
std::vector<std::string> split_delimited(const std::string& line, char delim, bool& ok) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    ok = true;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) ok = false;
    fields.push_back(std::move(cur));
    return fields;
}

GroundTruthRow make_row(const std::string& citing, const std::string& cited, std::string context,
                        const std::string& label, std::size_t line) {
    if (trim(citing).empty() || trim(cited).empty()) {
        throw ParseError("citing_id and cited_id must be non-empty");
    }
    auto parsed = parse_binary_label(label);
    if (!parsed) {
        throw ParseError("unknown label '" + label + "' (expected impact-revealing or other)");
    }
    return {PaperId(trim(citing)), PaperId(trim(cited)), std::move(context), *parsed, line};
}

} // namespace

std::vector<GroundTruthRow> read_ground_truth_rows(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open ground truth " + path.string());

    const auto ext = path.extension().string();
    const bool delimited = ext == ".csv" || ext == ".tsv";
    const char delim = ext == ".tsv" ? '\t' : ',';

    std::vector<GroundTruthRow> rows;
    std::map<std::string, std::size_t> columns;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + what, line);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        if (!delimited) {
            try {
                const auto j = json::parse(line);
                rows.push_back(make_row(j.at("citing_id").get<std::string>(),
                                        j.at("cited_id").get<std::string>(),
                                        j.value("context_text", std::string()),
                                        j.at("label").get<std::string>(), lineno));
            } catch (const std::exception& e) {
                fail(e.what());
            }
            continue;
        }

        bool ok = true;
        auto fields = split_delimited(line, delim, ok);
        if (!ok) fail("unterminated quoted field");
        if (columns.empty()) {
            for (std::size_t i = 0; i < fields.size(); ++i) columns[trim(fields[i])] = i;
            for (const char* required : {"citing_id", "cited_id", "label"}) {
                if (!columns.count(required)) fail(std::string("header lacks column ") + required);
            }
            continue;
        }
        auto field = [&](const std::string& name) -> std::string {
            auto it = columns.find(name);
            if (it == columns.end()) return {};
            if (it->second >= fields.size()) fail("row has too few fields");
            return fields[it->second];
        };
        try {
            rows.push_back(make_row(field("citing_id"), field("cited_id"), field("context_text"),
                                    field("label"), lineno));
        } catch (const ParseError& e) {
            fail(e.what());
        }
    }
    return rows;
}

GroundTruthSet filter_ground_truth(const std::vector<GroundTruthRow>& rows, const BundleSource& source) {
    GroundTruthSet out;
    out.stats.rows_read = rows.size();

    using RowKey = std::tuple<std::string, std::string, std::string, int>;
    using ContextKey = std::tuple<std::string, std::string, std::string>;
    std::set<RowKey> seen_rows;
    std::set<ContextKey> seen_contexts;
    std::map<CitationPair, std::size_t> pair_index;
    std::vector<GroundTruthRecord> records;

    for (const auto& row : rows) {
        const RowKey rk{row.citing_id.str(), row.cited_id.str(), row.context_text, static_cast<int>(row.label)};
        if (!seen_rows.insert(rk).second) {
            ++out.stats.duplicate_rows;
            continue;
        }
        const ContextKey ck{row.citing_id.str(), row.cited_id.str(), trim(row.context_text)};
        if (!seen_contexts.insert(ck).second) {
            ++out.stats.repeated_contexts;
            continue;
        }
        const CitationPair pair{row.citing_id, row.cited_id};
        if (auto it = pair_index.find(pair); it != pair_index.end()) {
            ++out.stats.merged_contexts;
            if (records[it->second].label != row.label) ++out.stats.label_conflicts;
            continue;
        }
        pair_index.emplace(pair, records.size());
        records.push_back({row.citing_id, row.cited_id, row.label});
    }

    // resolve bundles in first-appearance order
    std::map<PaperId, bool> has_refs;
    for (const auto& rec : records) {
        if (has_refs.count(rec.citing_id)) continue;
        auto bundle = source(rec.citing_id);
        has_refs[rec.citing_id] = bundle.has_value();
        if (bundle) out.bundles.push_back(std::move(*bundle));
    }

    for (auto& rec : records) {
        if (!has_refs[rec.citing_id]) {
            ++out.stats.no_reference_rows;
            continue;
        }
        out.records.push_back(std::move(rec));
    }
    out.stats.citing_papers = out.bundles.size();
    out.stats.cited_pairs = out.records.size();
    return out;
}

GroundTruthSet load_ground_truth(const fs::path& path, const BundleSource& source) {
    return filter_ground_truth(read_ground_truth_rows(path), source);
}

void write_ground_truth(const fs::path& path, const std::vector<GroundTruthRecord>& records) {
    std::string text;
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["citing_id"] = r.citing_id.str();
        j["cited_id"] = r.cited_id.str();
        j["label"] = std::string(to_string(r.label));
        text += j.dump();
        text += '\n';
    }
    write_text_file(path, text);
}

} // namespace citeimpact
