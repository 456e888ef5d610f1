#include <cstdio>
#include <exception>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "credence/pipeline.hpp"

using namespace credence;

namespace {

int finish(const pipeline::StageResult& result) {
    std::printf("%s: processed=%zu skipped=%zu failed=%zu wall_ms=%lld\n", result.stage.c_str(),
                result.processed, result.skipped, result.failed,
                static_cast<long long>(result.wall_ms));
    return result.failed > 0 ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Misinformation belief-shift evaluation pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Run config JSON")->required(false);

    // stage subcommands share the run config
    auto* generate = app.add_subcommand("generate", "Generate claims from the article corpus");
    auto* forge_cmd = app.add_subcommand("forge", "Run adversarial evidence refinement per claim");
    auto* evaluate = app.add_subcommand("evaluate", "Sweep belief assessments over settings");
    auto* shield_evaluate =
        app.add_subcommand("shield-evaluate", "Belief sweep with analyst intent shielding");
    auto* advise = app.add_subcommand("advise", "Advice questions and pre/post suggestions");
    auto* report_cmd = app.add_subcommand("report", "Render metric tables from assessments");

    // overrides mirroring RunConfig fields
    std::string articles_path, out_dir;
    std::vector<std::string> tier_names, setting_names, model_names;
    for (auto* cmd : {generate, forge_cmd, evaluate, shield_evaluate, advise, report_cmd}) {
        cmd->add_option("--articles", articles_path, "Article corpus JSONL (overrides config)");
        cmd->add_option("--out-dir", out_dir, "Output directory (overrides config)");
    }
    generate->add_option("--tiers", tier_names, "Difficulty tiers (easy/medium/hard)");
    int forge_m = 0, forge_rounds = 0, forge_threshold = 0;
    bool forge_early_stop = false;
    forge_cmd->add_option("--m", forge_m, "Evidence drafts per claim");
    forge_cmd->add_option("--rounds", forge_rounds, "Maximum refinement rounds");
    forge_cmd->add_flag("--early-stop", forge_early_stop,
                        "Stop a draft once its quantified judgment reaches the threshold");
    forge_cmd->add_option("--threshold", forge_threshold, "Accept threshold for early stop (1..5)");
    evaluate->add_option("--settings", setting_names,
                         "Evaluation settings (original/baseline/roundN)");
    shield_evaluate->add_option("--settings", setting_names,
                                "Evaluation settings (original/baseline/roundN)");
    evaluate->add_option("--models", model_names, "Target model identifiers");
    shield_evaluate->add_option("--models", model_names, "Target model identifiers");

    std::string shield_analyst;
    std::optional<int> evidence_count;
    int evidence_count_raw = -1;
    evaluate->add_option("--shield", shield_analyst,
                         "Shield evidence via this analyst model before evaluation");
    evaluate->add_option("--evidence-count", evidence_count_raw,
                         "Evaluate with only the first k evidence drafts");
    shield_evaluate->add_option("--evidence-count", evidence_count_raw,
                                "Evaluate with only the first k evidence drafts");

    int advise_round = 3;
    advise->add_option("--round", advise_round, "Refinement round used for post-injection evidence");

    // standalone metric subcommands
    auto* novelty_cmd = app.add_subcommand("novelty", "Novelty of a benchmark's model ranking");
    std::string ranks_csv, candidate_col;
    std::vector<std::string> prev_cols, lower_better_cols;
    novelty_cmd->add_option("--ranks", ranks_csv, "CSV: model,<benchmark columns>")->required();
    novelty_cmd->add_option("--candidate", candidate_col, "Candidate benchmark column")->required();
    novelty_cmd->add_option("--prev", prev_cols, "Previous benchmark columns")->required();
    novelty_cmd->add_option("--lower-better", lower_better_cols,
                            "Columns where lower values rank first");

    auto* ac1_cmd = app.add_subcommand("ac1", "Gwet's AC1 between two rater score files");
    std::string rater_a, rater_b;
    int ac1_threshold = 3;
    ac1_cmd->add_option("--a", rater_a, "First rater's scores, one integer per line")->required();
    ac1_cmd->add_option("--b", rater_b, "Second rater's scores, one integer per line")->required();
    ac1_cmd->add_option("--threshold", ac1_threshold,
                        "Scores >= threshold count as positive (default 3)");

    auto* ling_cmd = app.add_subcommand("lingstats", "Per-round linguistic features of evidence");
    std::string traces_path;
    bool journal_substring = false;
    ling_cmd->add_option("--traces", traces_path, "Evidence trace store (JSONL)")->required();
    ling_cmd->add_flag("--journal-substring", journal_substring,
                       "Match journal names as substrings instead of whole words");

    CLI11_PARSE(app, argc, argv);

    try {
        if (novelty_cmd->parsed()) {
            const auto table = pipeline::RankTable::load_csv(ranks_csv);
            const std::set<std::string> lower(lower_better_cols.begin(), lower_better_cols.end());
            const double score = pipeline::novelty_from_table(table, candidate_col, prev_cols, lower);
            std::printf("novelty(%s) = %.3f\n", candidate_col.c_str(), score);
            return 0;
        }
        if (ac1_cmd->parsed()) {
            const double value = pipeline::ac1_from_files(rater_a, rater_b, ac1_threshold);
            std::printf("ac1 = %.4f\n", value);
            return 0;
        }
        if (ling_cmd->parsed()) {
            const auto mode = journal_substring ? metrics::JournalMatch::substring
                                                : metrics::JournalMatch::word_boundary;
            std::fputs(pipeline::render_lingstats(pipeline::lingstats_from_traces(traces_path, mode))
                           .c_str(),
                       stdout);
            return 0;
        }

        if (config_path.empty()) {
            std::fprintf(stderr, "--config is required for pipeline stages\n");
            return 2;
        }
        auto cfg = pipeline::RunConfig::load(config_path);
        if (!shield_analyst.empty()) cfg.analyst.model = shield_analyst;
        if (!articles_path.empty()) cfg.paths.articles = articles_path;
        if (!out_dir.empty()) cfg.paths.out_dir = out_dir;
        if (!tier_names.empty()) {
            cfg.tiers.clear();
            for (const auto& t : tier_names) cfg.tiers.push_back(genesis::tier_from_string(t));
        }
        if (!setting_names.empty()) {
            cfg.settings.clear();
            for (const auto& s : setting_names)
                cfg.settings.push_back(tribunal::EvalSetting::parse(s));
        }
        if (!model_names.empty()) cfg.target_models = model_names;
        if (forge_m > 0) cfg.forge_cfg.m = forge_m;
        if (forge_rounds > 0) cfg.forge_cfg.max_rounds = forge_rounds;
        if (forge_early_stop) cfg.forge_cfg.early_stop = true;
        if (forge_threshold > 0) cfg.forge_cfg.accept_threshold = forge_threshold;
        cfg.validate();
        pipeline::Pipeline pipe(std::move(cfg));

        if (evidence_count_raw > 0) evidence_count = evidence_count_raw;
        if (generate->parsed()) return finish(pipe.cmd_generate());
        if (forge_cmd->parsed()) return finish(pipe.cmd_forge());
        if (evaluate->parsed()) {
            pipeline::EvaluateOptions opts;
            opts.shielded = !shield_analyst.empty();
            opts.evidence_count = evidence_count;
            return finish(pipe.cmd_evaluate(opts));
        }
        if (shield_evaluate->parsed()) {
            pipeline::EvaluateOptions opts;
            opts.shielded = true;
            opts.evidence_count = evidence_count;
            return finish(pipe.cmd_evaluate(opts));
        }
        if (advise->parsed()) return finish(pipe.cmd_advise({advise_round}));
        if (report_cmd->parsed()) return finish(pipe.cmd_report());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fatal: %s\n", e.what());
        return 2;
    }
    return 2;
}
