#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "credence/backend.hpp"
#include "credence/corpus.hpp"
#include "credence/forge.hpp"
#include "credence/genesis.hpp"
#include "credence/metrics.hpp"
#include "credence/report.hpp"
#include "credence/shield.hpp"
#include "credence/tribunal.hpp"

namespace credence::pipeline {

struct RoleConfig {
    BackendConfig backend;
    std::string model = "mock-model";

    static RoleConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct Paths {
    std::string articles;
    std::string out_dir = "out";

    std::string claims() const { return out_dir + "/claims.jsonl"; }
    std::string traces() const { return out_dir + "/traces.jsonl"; }
    std::string assessments() const { return out_dir + "/assessments.jsonl"; }
    std::string intents() const { return out_dir + "/intents.jsonl"; }
    std::string suggestions() const { return out_dir + "/suggestions.jsonl"; }
    std::string report_text() const { return out_dir + "/report.txt"; }
    std::string report_csv() const { return out_dir + "/report.csv"; }
    std::string suggestion_csv() const { return out_dir + "/report_suggestions.csv"; }
    std::string manifest() const { return out_dir + "/manifest.json"; }
};

// One config drives the whole run. Distinct backend roles mirror the
// pipeline's division of labor: a generator writes claims and evidence,
// target models are evaluated, a judge scores and compares, an analyst
// shields. A zero mock_seed on any mock backend is derived from `seed` and
// the role name, so one seed pins a whole offline run.
struct RunConfig {
    std::uint64_t seed = 0;
    RoleConfig generator;
    RoleConfig judge;
    RoleConfig analyst;
    BackendConfig target_backend;
    std::vector<std::string> target_models;
    forge::ForgeConfig forge_cfg;
    std::vector<genesis::Tier> tiers;
    std::vector<tribunal::EvalSetting> settings;
    Paths paths;

    void validate() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
    nlohmann::json to_json() const;
};

struct StageResult {
    std::string stage;
    std::size_t processed = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    std::int64_t wall_ms = 0;
};

struct EvaluateOptions {
    bool shielded = false;
    std::optional<int> evidence_count;
};

struct AdviseOptions {
    int round = 3;
};

std::string file_digest(const std::string& path); // "fnv1a64:<16 hex>"

class Pipeline {
public:
    explicit Pipeline(RunConfig cfg);

    StageResult cmd_generate();
    StageResult cmd_forge();
    StageResult cmd_evaluate(const EvaluateOptions& opts = {});
    StageResult cmd_advise(const AdviseOptions& opts = {});
    StageResult cmd_report();

    const RunConfig& config() const { return cfg_; }

private:
    void record_stage(const StageResult& result);
    void write_manifest();

    RunConfig cfg_;
    std::shared_ptr<Clock> clock_;
    std::unique_ptr<Backend> generator_;
    std::unique_ptr<Backend> target_;
    std::unique_ptr<Backend> judge_;
    std::unique_ptr<Backend> analyst_;
    std::map<std::string, StageResult> stage_history_;
};

// --- standalone report helpers used by the CLI ---

// CSV of per-benchmark model performance: header "model,<col>,<col>,...",
// one row per model.
struct RankTable {
    std::vector<std::string> models;
    std::vector<std::string> columns;
    std::map<std::string, std::vector<double>> values; // column -> per-model values

    static RankTable load_csv(const std::string& path);
};

// Ranks every column (lower_better columns rank ascending values best) and
// returns the novelty of `candidate` against the `prev` columns.
double novelty_from_table(const RankTable& table, const std::string& candidate,
                          const std::vector<std::string>& prev,
                          const std::set<std::string>& lower_better);

// One integer score per line; blank lines ignored.
std::vector<int> load_score_file(const std::string& path);

// Binarizes both raters at `threshold` (score >= threshold counts positive)
// and computes AC1.
double ac1_from_files(const std::string& path_a, const std::string& path_b, int threshold);

// Per-round linguistic profiles over every draft in a trace store.
std::map<int, metrics::LinguisticProfile> lingstats_from_traces(const std::string& traces_path,
                                                                metrics::JournalMatch mode);
std::string render_lingstats(const std::map<int, metrics::LinguisticProfile>& by_round);

} // namespace credence::pipeline
