#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "credence/errors.hpp"

namespace credence {

inline constexpr int kSchemaVersion = 1;

struct Article {
    std::string id;
    std::string text;
    std::string domain;
    std::optional<std::string> source_tag;

    static Article from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Loads a JSONL file with one article object per line, preserving file order.
// Throws ParseError (with the 1-based line number) or DuplicateId.
std::vector<Article> load_articles(const std::string& path);

enum class RecordKind { article, claim, evidence_trace, assessment, intent, suggestion };

std::string record_kind_name(RecordKind k);
RecordKind record_kind_from_string(const std::string& s);

struct DatasetRecord {
    RecordKind kind = RecordKind::article;
    int schema_version = kSchemaVersion;
    std::string created_at;
    nlohmann::json payload;

    nlohmann::json to_json() const;
    static DatasetRecord from_json(const nlohmann::json& j);
};

// Timestamp source for records. The logical clock makes mock-mode runs
// replayable byte for byte.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::string now() = 0;
};

class SystemClock : public Clock {
public:
    std::string now() override;
};

class LogicalClock : public Clock {
public:
    std::string now() override;

private:
    std::mutex mu_;
    std::uint64_t ticks_ = 0;
};

// Appends one record as a single JSONL line and flushes. Writes from any
// number of stage workers are serialized here so the file never contains
// interleaved partial lines.
class RecordWriter {
public:
    RecordWriter(std::string path, std::shared_ptr<Clock> clock);

    void append(RecordKind kind, nlohmann::json payload);

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::shared_ptr<Clock> clock_;
    std::mutex mu_;
};

// One-shot append of a fully formed record.
void append_record(const std::string& store_path, const DatasetRecord& rec);

// Reads every record in the file; validates schema_version on each.
std::vector<DatasetRecord> read_records(const std::string& path);

// Reads only records of one kind, returning their payloads.
std::vector<nlohmann::json> read_payloads(const std::string& path, RecordKind kind);

} // namespace credence
