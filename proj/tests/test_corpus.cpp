#include <doctest.h>

#include <fstream>

#include "credence/corpus.hpp"
#include "support.hpp"

using namespace credence;
using testsupport::TempDir;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("load_articles preserves file order") {
    TempDir dir;
    const auto path = dir.file("articles.jsonl");
    write_file(path,
               "{\"id\":\"x\",\"text\":\"first\",\"domain\":\"Sports\"}\n"
               "{\"id\":\"y\",\"text\":\"second\",\"domain\":\"Health and Wellness\"}\n");
    const auto articles = load_articles(path);
    REQUIRE(articles.size() == 2);
    CHECK(articles[0].id == "x");
    CHECK(articles[0].text == "first");
    CHECK(articles[1].id == "y");
}

TEST_CASE("empty article file loads as empty list") {
    TempDir dir;
    const auto path = dir.file("empty.jsonl");
    write_file(path, "");
    CHECK(load_articles(path).empty());
}

TEST_CASE("missing text field names the offending line") {
    TempDir dir;
    const auto path = dir.file("bad.jsonl");
    write_file(path, "{\"id\":\"x\",\"domain\":\"Sports\"}\n");
    try {
        (void)load_articles(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
}

TEST_CASE("duplicate article ids are rejected") {
    TempDir dir;
    const auto path = dir.file("dup.jsonl");
    write_file(path,
               "{\"id\":\"x\",\"text\":\"a\"}\n"
               "{\"id\":\"x\",\"text\":\"b\"}\n");
    CHECK_THROWS_AS((void)load_articles(path), DuplicateId);
}

TEST_CASE("append then reload round-trips the payload") {
    TempDir dir;
    const auto path = dir.file("store.jsonl");
    DatasetRecord rec;
    rec.kind = RecordKind::claim;
    rec.created_at = "1970-01-01T00:00:00Z";
    rec.payload = {{"id", "c1"}, {"text", "claim text"}, {"nested", {{"k", 1}}}};
    append_record(path, rec);

    const auto records = read_records(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].kind == RecordKind::claim);
    CHECK(records[0].payload == rec.payload);
}

TEST_CASE("two appends reload in append order") {
    TempDir dir;
    const auto path = dir.file("store.jsonl");
    auto clock = std::make_shared<LogicalClock>();
    RecordWriter writer(path, clock);
    writer.append(RecordKind::claim, {{"n", 1}});
    writer.append(RecordKind::claim, {{"n", 2}});
    const auto records = read_records(path);
    REQUIRE(records.size() == 2);
    CHECK(records[0].payload["n"] == 1);
    CHECK(records[1].payload["n"] == 2);
    CHECK(records[0].created_at != records[1].created_at);
}

TEST_CASE("wrong schema_version on read raises SchemaMismatch") {
    TempDir dir;
    const auto path = dir.file("store.jsonl");
    write_file(path,
               "{\"record_kind\":\"claim\",\"schema_version\":99,"
               "\"created_at\":\"\",\"payload\":{}}\n");
    CHECK_THROWS_AS((void)read_records(path), SchemaMismatch);
}

TEST_CASE("record payload round-trip is identity on random payloads") {
    TempDir dir;
    const auto path = dir.file("store.jsonl");
    std::mt19937_64 rng(12345);
    std::vector<nlohmann::json> payloads;
    for (int i = 0; i < 50; ++i) {
        nlohmann::json payload;
        payload["id"] = "r" + std::to_string(i);
        payload["score"] = static_cast<int>(rng() % 5) + 1;
        payload["flag"] = (rng() % 2) == 0;
        payload["text"] = "line1\nline2 \"quoted\" \\ end " + std::to_string(rng());
        payload["list"] = {static_cast<int>(rng() % 100), static_cast<int>(rng() % 100)};
        payloads.push_back(payload);
        DatasetRecord rec;
        rec.kind = RecordKind::assessment;
        rec.created_at = "t";
        rec.payload = payload;
        append_record(path, rec);
    }
    const auto records = read_records(path);
    REQUIRE(records.size() == payloads.size());
    for (std::size_t i = 0; i < payloads.size(); ++i) CHECK(records[i].payload == payloads[i]);
}

TEST_CASE("concurrent writers never interleave partial lines") {
    TempDir dir;
    const auto path = dir.file("store.jsonl");
    auto clock = std::make_shared<LogicalClock>();
    RecordWriter writer(path, clock);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&writer, t] {
            for (int i = 0; i < 25; ++i)
                writer.append(RecordKind::intent,
                              {{"writer", t}, {"i", i}, {"pad", std::string(200, 'x')}});
        });
    for (auto& t : threads) t.join();
    const auto records = read_records(path); // parse failure would throw
    CHECK(records.size() == 100);
}
