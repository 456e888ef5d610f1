#include "credence/corpus.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <set>

namespace credence {

Article Article::from_json(const nlohmann::json& j) {
    Article a;
    if (!j.contains("id") || !j["id"].is_string()) throw ParseError("article missing string 'id'");
    if (!j.contains("text") || !j["text"].is_string())
        throw ParseError("article missing string 'text'");
    a.id = j["id"].get<std::string>();
    a.text = j["text"].get<std::string>();
    a.domain = j.value("domain", "");
    if (j.contains("source_tag") && j["source_tag"].is_string())
        a.source_tag = j["source_tag"].get<std::string>();
    if (a.text.empty()) throw ParseError("article 'text' must be non-empty");
    if (a.id.empty()) throw ParseError("article 'id' must be non-empty");
    return a;
}

nlohmann::json Article::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["text"] = text;
    j["domain"] = domain;
    if (source_tag) j["source_tag"] = *source_tag;
    return j;
}

std::vector<Article> load_articles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open article file: " + path);
    std::vector<Article> out;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        Article a;
        try {
            a = Article::from_json(j);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (!seen.insert(a.id).second) throw DuplicateId("duplicate article id: " + a.id);
        out.push_back(std::move(a));
    }
    return out;
}

std::string record_kind_name(RecordKind k) {
    switch (k) {
    case RecordKind::article: return "article";
    case RecordKind::claim: return "claim";
    case RecordKind::evidence_trace: return "evidence_trace";
    case RecordKind::assessment: return "assessment";
    case RecordKind::intent: return "intent";
    case RecordKind::suggestion: return "suggestion";
    }
    return "article";
}

RecordKind record_kind_from_string(const std::string& s) {
    if (s == "article") return RecordKind::article;
    if (s == "claim") return RecordKind::claim;
    if (s == "evidence_trace") return RecordKind::evidence_trace;
    if (s == "assessment") return RecordKind::assessment;
    if (s == "intent") return RecordKind::intent;
    if (s == "suggestion") return RecordKind::suggestion;
    throw ParseError("unknown record kind: " + s);
}

nlohmann::json DatasetRecord::to_json() const {
    nlohmann::json j;
    j["record_kind"] = record_kind_name(kind);
    j["schema_version"] = schema_version;
    j["created_at"] = created_at;
    j["payload"] = payload;
    return j;
}

DatasetRecord DatasetRecord::from_json(const nlohmann::json& j) {
    DatasetRecord rec;
    if (!j.contains("record_kind")) throw ParseError("record missing 'record_kind'");
    rec.kind = record_kind_from_string(j["record_kind"].get<std::string>());
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
        throw ParseError("record missing integer 'schema_version'");
    rec.schema_version = j["schema_version"].get<int>();
    if (rec.schema_version != kSchemaVersion)
        throw SchemaMismatch("record schema_version " + std::to_string(rec.schema_version) +
                             " does not match reader version " + std::to_string(kSchemaVersion));
    rec.created_at = j.value("created_at", "");
    if (!j.contains("payload")) throw ParseError("record missing 'payload'");
    rec.payload = j["payload"];
    return rec;
}

std::string SystemClock::now() {
    const auto t = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string LogicalClock::now() {
    std::lock_guard lock(mu_);
    const std::time_t tt = static_cast<std::time_t>(ticks_++);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RecordWriter::RecordWriter(std::string path, std::shared_ptr<Clock> clock)
    : path_(std::move(path)), clock_(std::move(clock)) {}

void RecordWriter::append(RecordKind kind, nlohmann::json payload) {
    DatasetRecord rec;
    rec.kind = kind;
    rec.schema_version = kSchemaVersion;
    rec.payload = std::move(payload);
    std::lock_guard lock(mu_);
    rec.created_at = clock_->now();
    append_record(path_, rec);
}

void append_record(const std::string& store_path, const DatasetRecord& rec) {
    // The full line is built first and written with a single stream insertion
    // so a record is never split across writes.
    const std::string line = rec.to_json().dump() + "\n";
    std::ofstream out(store_path, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot open store for append: " + store_path);
    out << line;
    out.flush();
    if (!out) throw IoError("write failed: " + store_path);
}

std::vector<DatasetRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open store: " + path);
    std::vector<DatasetRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        out.push_back(DatasetRecord::from_json(j));
    }
    return out;
}

std::vector<nlohmann::json> read_payloads(const std::string& path, RecordKind kind) {
    std::vector<nlohmann::json> out;
    for (auto& rec : read_records(path))
        if (rec.kind == kind) out.push_back(std::move(rec.payload));
    return out;
}

} // namespace credence
