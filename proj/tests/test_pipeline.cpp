#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "credence/pipeline.hpp"
#include "support.hpp"

using namespace credence;
using namespace credence::pipeline;
using testsupport::TempDir;

namespace {

RunConfig mock_config(const TempDir& dir, std::uint64_t seed = 42) {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.generator.model = "mock-generator";
    cfg.judge.model = "mock-judge";
    cfg.analyst.model = "mock-analyst";
    cfg.target_models = {"mock-target"};
    cfg.tiers = {genesis::Tier::easy, genesis::Tier::medium, genesis::Tier::hard};
    cfg.settings = {tribunal::EvalSetting::original(), tribunal::EvalSetting::at_round(0),
                    tribunal::EvalSetting::at_round(1), tribunal::EvalSetting::at_round(3)};
    cfg.paths.articles = testsupport::data_path("articles.jsonl");
    cfg.paths.out_dir = dir.file("out");
    return cfg;
}

} // namespace

TEST_CASE("generate produces one claim per article and tier") {
    TempDir dir;
    Pipeline pipe(mock_config(dir));
    const auto result = pipe.cmd_generate();
    CHECK(result.processed == 9);
    CHECK(result.failed == 0);
    const auto claims = read_payloads(pipe.config().paths.claims(), RecordKind::claim);
    CHECK(claims.size() == 9);
}

TEST_CASE("generate with a missing article file fails before any backend call") {
    TempDir dir;
    auto cfg = mock_config(dir);
    cfg.paths.articles = dir.file("never_written.jsonl");
    Pipeline pipe(cfg);
    CHECK_THROWS_AS((void)pipe.cmd_generate(), IoError);
}

TEST_CASE("generate with an empty corpus is fatal") {
    TempDir dir;
    auto cfg = mock_config(dir);
    const auto empty = dir.file("empty.jsonl");
    std::ofstream(empty).close();
    cfg.paths.articles = empty;
    Pipeline pipe(cfg);
    CHECK_THROWS_AS((void)pipe.cmd_generate(), PreconditionError);
}

TEST_CASE("forge produces a trace per claim with the configured shape") {
    TempDir dir;
    Pipeline pipe(mock_config(dir));
    (void)pipe.cmd_generate();
    const auto result = pipe.cmd_forge();
    CHECK(result.processed == 9);
    CHECK(result.failed == 0);

    const auto traces = read_payloads(pipe.config().paths.traces(), RecordKind::evidence_trace);
    REQUIRE(traces.size() == 9);
    for (const auto& payload : traces) {
        const auto trace = forge::EvidenceTrace::from_json(payload);
        CHECK(trace.drafts.size() == 3);
        for (const auto& draft : trace.drafts) CHECK(draft.rounds.size() == 6);
    }
}

TEST_CASE("evaluate covers the sweep, resumes idempotently") {
    TempDir dir;
    Pipeline pipe(mock_config(dir));
    (void)pipe.cmd_generate();
    (void)pipe.cmd_forge();
    const auto result = pipe.cmd_evaluate();
    CHECK(result.processed + result.failed == 9 * 4);

    const auto before = testsupport::read_file(pipe.config().paths.assessments());

    // re-running the stage with the same config must not change output bytes
    Pipeline again(mock_config(dir));
    const auto rerun = again.cmd_evaluate();
    CHECK(rerun.processed == 0);
    CHECK(rerun.skipped == 36);
    CHECK(testsupport::read_file(pipe.config().paths.assessments()) == before);
}

TEST_CASE("shielded evaluation persists intents and marks assessments") {
    TempDir dir;
    Pipeline pipe(mock_config(dir));
    (void)pipe.cmd_generate();
    (void)pipe.cmd_forge();
    EvaluateOptions opts;
    opts.shielded = true;
    const auto result = pipe.cmd_evaluate(opts);
    CHECK(result.processed + result.failed == 36);

    bool saw_shielded = false;
    for (const auto& payload :
         read_payloads(pipe.config().paths.assessments(), RecordKind::assessment)) {
        const auto a = tribunal::BeliefAssessment::from_json(payload);
        if (a.shielded) {
            saw_shielded = true;
            CHECK(a.analyst_model == "mock-analyst");
        }
    }
    CHECK(saw_shielded);

    const auto intents = read_payloads(pipe.config().paths.intents(), RecordKind::intent);
    CHECK(intents.size() > 0);
    // every shielded round-bearing setting reuses cached analyses, so the
    // intent count is bounded by drafts x distinct rounds
    CHECK(intents.size() <= 9 * 3 * 3);
}

TEST_CASE("advise produces judged suggestion pairs") {
    TempDir dir;
    Pipeline pipe(mock_config(dir));
    (void)pipe.cmd_generate();
    (void)pipe.cmd_forge();
    (void)pipe.cmd_evaluate();
    const auto result = pipe.cmd_advise({3});
    CHECK(result.processed == 9);
    const auto suggestions =
        read_payloads(pipe.config().paths.suggestions(), RecordKind::suggestion);
    REQUIRE(suggestions.size() == 9);
    for (const auto& payload : suggestions) {
        const auto pair = shield::SuggestionPair::from_json(payload);
        REQUIRE(pair.similarity.has_value());
        CHECK(*pair.changed == (*pair.similarity <= 3));
        CHECK_FALSE(pair.question.empty());
    }
}

TEST_CASE("report renders tables and a manifest with matching digests") {
    TempDir dir;
    Pipeline pipe(mock_config(dir));
    (void)pipe.cmd_generate();
    (void)pipe.cmd_forge();
    (void)pipe.cmd_evaluate();
    (void)pipe.cmd_advise({3});
    const auto result = pipe.cmd_report();
    CHECK(result.processed > 0);

    const auto text = testsupport::read_file(pipe.config().paths.report_text());
    CHECK(text.find("Model: mock-target") != std::string::npos);
    CHECK(text.find("original") != std::string::npos);
    CHECK(text.find("Suggestion comparison:") != std::string::npos);

    const auto csv = testsupport::read_file(pipe.config().paths.report_csv());
    CHECK(csv.find("model,shielded") == 0);

    // manifest digests must match the bytes on disk
    nlohmann::json manifest;
    std::ifstream in(pipe.config().paths.manifest());
    in >> manifest;
    for (const auto& [name, digest] : manifest.at("digests").items()) {
        const auto path = pipe.config().paths.out_dir + "/" + name;
        CHECK(file_digest(path) == digest.get<std::string>());
    }
    CHECK(manifest.at("stages").contains("generate"));
    CHECK(manifest.at("stages").contains("report"));
}

TEST_CASE("full mock runs with one seed are byte-identical, different seeds differ") {
    TempDir dir_a, dir_b, dir_c;
    auto run = [](const TempDir& dir, std::uint64_t seed) {
        Pipeline pipe(mock_config(dir, seed));
        (void)pipe.cmd_generate();
        (void)pipe.cmd_forge();
        (void)pipe.cmd_evaluate();
        return testsupport::read_file(pipe.config().paths.claims()) + "\x1e" +
               testsupport::read_file(pipe.config().paths.traces()) + "\x1e" +
               testsupport::read_file(pipe.config().paths.assessments());
    };
    const auto a = run(dir_a, 7);
    const auto b = run(dir_b, 7);
    const auto c = run(dir_c, 8);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("rank table novelty fixture") {
    const auto table = RankTable::load_csv(testsupport::data_path("benchmark_ranks.csv"));
    REQUIRE(table.models.size() == 5);
    const double ours = novelty_from_table(table, "Belief", {"HLE", "GPQA", "LiveCode", "SciCode"},
                                           {"Belief"});
    CHECK(ours == doctest::Approx(0.636).epsilon(0.005));
    const double baseline = novelty_from_table(table, "MMLU",
                                               {"HLE", "GPQA", "LiveCode", "SciCode"}, {});
    CHECK(baseline == doctest::Approx(0.097).epsilon(0.005));
}

TEST_CASE("ac1 files helper binarizes at the threshold") {
    TempDir dir;
    const auto path_a = dir.file("a.txt");
    const auto path_b = dir.file("b.txt");
    std::ofstream(path_a) << "5\n4\n4\n2\n";
    std::ofstream(path_b) << "4\n5\n1\n2\n";
    // binarized at >=3: a=[1,1,1,0], b=[1,1,0,0] -> 0.28125/0.53125
    CHECK(ac1_from_files(path_a, path_b, 3) == doctest::Approx(0.28125 / 0.53125).epsilon(1e-12));
}

TEST_CASE("lingstats aggregates per round across drafts") {
    TempDir dir;
    Pipeline pipe(mock_config(dir));
    (void)pipe.cmd_generate();
    (void)pipe.cmd_forge();
    const auto by_round = lingstats_from_traces(pipe.config().paths.traces(),
                                                metrics::JournalMatch::word_boundary);
    REQUIRE(by_round.size() == 6); // rounds 0..5
    for (const auto& [round, profile] : by_round) CHECK(profile.avg_word_count > 0.0);
    const auto rendered = render_lingstats(by_round);
    CHECK(rendered.find("round,avg_word_count") == 0);
}

TEST_CASE("run config JSON round-trip") {
    TempDir dir;
    const auto cfg = mock_config(dir);
    const auto round_tripped = RunConfig::from_json(cfg.to_json());
    CHECK(round_tripped.to_json() == cfg.to_json());
}
