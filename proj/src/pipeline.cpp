#include "credence/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "credence/parallel.hpp"
#include "credence/textutil.hpp"

namespace credence::pipeline {

namespace fs = std::filesystem;

namespace {

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

bool all_mock(const RunConfig& cfg) {
    return cfg.generator.backend.mode == BackendMode::mock &&
           cfg.target_backend.mode == BackendMode::mock &&
           cfg.judge.backend.mode == BackendMode::mock &&
           cfg.analyst.backend.mode == BackendMode::mock;
}

BackendConfig seeded(BackendConfig backend, std::uint64_t run_seed, const char* role) {
    if (backend.mode == BackendMode::mock && backend.mock_seed == 0)
        backend.mock_seed = fnv1a(role, run_seed ^ 0x243f6a8885a308d3ULL);
    return backend;
}

std::string setting_key(const tribunal::EvalSetting& s) {
    std::string key = s.name();
    if (s.evidence_count) key += ":k" + std::to_string(*s.evidence_count);
    return key;
}

} // namespace

RoleConfig RoleConfig::from_json(const nlohmann::json& j) {
    RoleConfig rc;
    if (j.contains("backend")) rc.backend = BackendConfig::from_json(j.at("backend"));
    rc.model = j.value("model", rc.model);
    return rc;
}

nlohmann::json RoleConfig::to_json() const {
    return {{"backend", backend.to_json()}, {"model", model}};
}

void RunConfig::validate() const {
    generator.backend.validate();
    judge.backend.validate();
    analyst.backend.validate();
    target_backend.validate();
    forge_cfg.validate();
    if (tiers.empty()) throw PreconditionError("at least one difficulty tier is required");
    if (settings.empty()) throw PreconditionError("at least one evaluation setting is required");
    if (target_models.empty()) throw PreconditionError("at least one target model is required");
    if (paths.out_dir.empty()) throw PreconditionError("out_dir must be set");
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("generator")) cfg.generator = RoleConfig::from_json(j.at("generator"));
    if (j.contains("judge")) cfg.judge = RoleConfig::from_json(j.at("judge"));
    if (j.contains("analyst")) cfg.analyst = RoleConfig::from_json(j.at("analyst"));
    if (j.contains("target_backend"))
        cfg.target_backend = BackendConfig::from_json(j.at("target_backend"));
    if (j.contains("target_models"))
        cfg.target_models = j.at("target_models").get<std::vector<std::string>>();
    else
        cfg.target_models = {"mock-target"};
    if (j.contains("forge")) cfg.forge_cfg = forge::ForgeConfig::from_json(j.at("forge"));
    if (j.contains("tiers")) {
        for (const auto& t : j.at("tiers"))
            cfg.tiers.push_back(genesis::tier_from_string(t.get<std::string>()));
    } else {
        cfg.tiers = {genesis::Tier::easy, genesis::Tier::medium, genesis::Tier::hard};
    }
    if (j.contains("settings")) {
        for (const auto& s : j.at("settings"))
            cfg.settings.push_back(tribunal::EvalSetting::parse(s.get<std::string>()));
    } else {
        cfg.settings = {tribunal::EvalSetting::original(), tribunal::EvalSetting::at_round(0),
                        tribunal::EvalSetting::at_round(1), tribunal::EvalSetting::at_round(3)};
    }
    if (j.contains("paths")) {
        cfg.paths.articles = j.at("paths").value("articles", "");
        cfg.paths.out_dir = j.at("paths").value("out_dir", cfg.paths.out_dir);
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid config JSON: " + std::string(e.what()));
    }
    return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["generator"] = generator.to_json();
    j["judge"] = judge.to_json();
    j["analyst"] = analyst.to_json();
    j["target_backend"] = target_backend.to_json();
    j["target_models"] = target_models;
    j["forge"] = forge_cfg.to_json();
    auto tiers_json = nlohmann::json::array();
    for (auto t : tiers) tiers_json.push_back(genesis::tier_name(t));
    j["tiers"] = std::move(tiers_json);
    auto settings_json = nlohmann::json::array();
    for (const auto& s : settings) settings_json.push_back(s.name());
    j["settings"] = std::move(settings_json);
    j["paths"] = {{"articles", paths.articles}, {"out_dir", paths.out_dir}};
    return j;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for digest: " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
        if (!in) break;
    }
    char hex[32];
    std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return hex;
}

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    clock_ = all_mock(cfg_) ? std::shared_ptr<Clock>(std::make_shared<LogicalClock>())
                            : std::shared_ptr<Clock>(std::make_shared<SystemClock>());
    generator_ = std::make_unique<Backend>(seeded(cfg_.generator.backend, cfg_.seed, "generator"));
    target_ = std::make_unique<Backend>(seeded(cfg_.target_backend, cfg_.seed, "target"));
    judge_ = std::make_unique<Backend>(seeded(cfg_.judge.backend, cfg_.seed, "judge"));
    analyst_ = std::make_unique<Backend>(seeded(cfg_.analyst.backend, cfg_.seed, "analyst"));
    fs::create_directories(cfg_.paths.out_dir);
}

StageResult Pipeline::cmd_generate() {
    const auto start = std::chrono::steady_clock::now();
    StageResult result{"generate"};

    const auto articles = load_articles(cfg_.paths.articles);
    if (articles.empty()) throw PreconditionError("article corpus is empty");

    std::set<std::string> existing;
    if (fs::exists(cfg_.paths.claims()))
        for (const auto& payload : read_payloads(cfg_.paths.claims(), RecordKind::claim))
            existing.insert(payload.at("id").get<std::string>());

    RecordWriter writer(cfg_.paths.claims(), clock_);
    for (const auto& article : articles) {
        for (auto tier : cfg_.tiers) {
            const std::string claim_id = article.id + ":" + genesis::tier_name(tier);
            if (existing.count(claim_id)) {
                ++result.skipped;
                continue;
            }
            try {
                const auto claim = genesis::generate_claim(*generator_, cfg_.generator.model,
                                                           article, genesis::difficulty_for(tier));
                writer.append(RecordKind::claim, claim.to_json());
                ++result.processed;
            } catch (const Error&) {
                ++result.failed;
            }
        }
    }
    result.wall_ms = elapsed_ms(start);
    record_stage(result);
    return result;
}

StageResult Pipeline::cmd_forge() {
    const auto start = std::chrono::steady_clock::now();
    StageResult result{"forge"};

    const auto claim_payloads = read_payloads(cfg_.paths.claims(), RecordKind::claim);
    if (claim_payloads.empty()) throw PreconditionError("no claims to forge; run generate first");

    std::set<std::string> existing;
    if (fs::exists(cfg_.paths.traces()))
        for (const auto& payload : read_payloads(cfg_.paths.traces(), RecordKind::evidence_trace))
            existing.insert(payload.at("claim_id").get<std::string>());

    RecordWriter writer(cfg_.paths.traces(), clock_);
    for (const auto& payload : claim_payloads) {
        const auto claim = genesis::Claim::from_json(payload);
        if (existing.count(claim.id)) {
            ++result.skipped;
            continue;
        }
        try {
            const auto trace =
                forge::run_refinement(*generator_, cfg_.generator.model, claim, cfg_.forge_cfg);
            writer.append(RecordKind::evidence_trace, trace.to_json());
            bool any_draft_failed = false;
            for (const auto& draft : trace.drafts)
                if (draft.failure) any_draft_failed = true;
            if (any_draft_failed)
                ++result.failed;
            else
                ++result.processed;
        } catch (const Error&) {
            ++result.failed;
        }
    }
    result.wall_ms = elapsed_ms(start);
    record_stage(result);
    return result;
}

StageResult Pipeline::cmd_evaluate(const EvaluateOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    StageResult result{opts.shielded ? "shield-evaluate" : "evaluate"};

    const auto claim_payloads = read_payloads(cfg_.paths.claims(), RecordKind::claim);
    const auto trace_payloads = read_payloads(cfg_.paths.traces(), RecordKind::evidence_trace);
    if (trace_payloads.empty())
        throw PreconditionError("no evidence traces; run forge first");

    std::map<std::string, forge::EvidenceTrace> traces;
    for (const auto& payload : trace_payloads)
        traces.emplace(payload.at("claim_id").get<std::string>(),
                       forge::EvidenceTrace::from_json(payload));

    std::vector<tribunal::SweepInstance> instances;
    for (const auto& payload : claim_payloads) {
        auto claim = genesis::Claim::from_json(payload);
        auto it = traces.find(claim.id);
        if (it == traces.end()) continue;
        instances.push_back({std::move(claim), it->second});
    }
    if (instances.empty()) throw PreconditionError("no claim/trace pairs to evaluate");

    // Resume bookkeeping: one key per persisted assessment cell.
    std::set<std::string> existing;
    if (fs::exists(cfg_.paths.assessments())) {
        for (const auto& payload : read_payloads(cfg_.paths.assessments(), RecordKind::assessment)) {
            const auto a = tribunal::BeliefAssessment::from_json(payload);
            existing.insert(a.target_model + "|" + a.claim_id + "|" + setting_key(a.setting) +
                            "|" + (a.shielded ? a.analyst_model : ""));
        }
    }

    const int parallelism = cfg_.target_backend.mode == BackendMode::http
                                ? cfg_.target_backend.max_parallel
                                : 1;

    // The sweep cells still owed after resume filtering, in persistence order.
    struct WorkItem {
        std::string model;
        const tribunal::SweepInstance* instance;
        tribunal::EvalSetting setting;
    };
    std::vector<WorkItem> pending;
    for (const auto& model : cfg_.target_models) {
        for (const auto& instance : instances) {
            for (auto setting : cfg_.settings) {
                if (opts.evidence_count && setting.kind == tribunal::EvalSetting::Kind::round)
                    setting.evidence_count = opts.evidence_count;
                const std::string key = model + "|" + instance.claim.id + "|" +
                                        setting_key(setting) + "|" +
                                        (opts.shielded ? cfg_.analyst.model : "");
                if (existing.count(key))
                    ++result.skipped;
                else
                    pending.push_back({model, &instance, setting});
            }
        }
    }

    // Cache of shield analyses, persisted to the intent store. All analyses
    // needed by the pending cells are generated up front so the assessment
    // pass reads the cache without mutation.
    std::map<std::string, shield::IntentAnalysis> analyses;
    std::mutex analyses_mu;
    if (opts.shielded) {
        if (fs::exists(cfg_.paths.intents())) {
            for (const auto& payload : read_payloads(cfg_.paths.intents(), RecordKind::intent)) {
                const auto analysis = shield::IntentAnalysis::from_json(payload);
                const std::string key = analysis.claim_id + "|" +
                                        std::to_string(analysis.draft_index) + "|" +
                                        std::to_string(analysis.round) + "|" +
                                        analysis.analyst_model;
                analyses.emplace(key, analysis);
            }
        }
        RecordWriter intent_writer(cfg_.paths.intents(), clock_);

        struct AnalysisNeed {
            const tribunal::SweepInstance* instance;
            forge::Evidence evidence;
            std::string key;
        };
        std::vector<AnalysisNeed> needs;
        std::set<std::string> queued;
        for (const auto& item : pending) {
            if (item.setting.kind != tribunal::EvalSetting::Kind::round) continue;
            const int count = item.setting.evidence_count.value_or(item.instance->trace.config.m);
            for (const auto& ev : item.instance->trace.round_evidence(item.setting.round)) {
                if (ev.draft_index > count) continue;
                const std::string key = ev.claim_id + "|" + std::to_string(ev.draft_index) + "|" +
                                        std::to_string(ev.round) + "|" + cfg_.analyst.model;
                if (analyses.count(key) || !queued.insert(key).second) continue;
                needs.push_back({item.instance, ev, key});
            }
        }
        const int analyst_parallelism = cfg_.analyst.backend.mode == BackendMode::http
                                            ? cfg_.analyst.backend.max_parallel
                                            : 1;
        parallel_for_index(needs.size(), analyst_parallelism, [&](std::size_t i) {
            auto analysis = shield::analyze_intent(*analyst_, cfg_.analyst.model,
                                                   needs[i].instance->claim, needs[i].evidence);
            intent_writer.append(RecordKind::intent, analysis.to_json());
            std::lock_guard lock(analyses_mu);
            analyses.emplace(needs[i].key, std::move(analysis));
        });
    }

    auto shielded_evidence = [&](const tribunal::SweepInstance& instance,
                                 const tribunal::EvalSetting& setting) -> std::vector<std::string> {
        if (setting.kind == tribunal::EvalSetting::Kind::original) return {};
        const int count = setting.evidence_count.value_or(instance.trace.config.m);
        std::vector<std::string> rendered;
        for (const auto& ev : instance.trace.round_evidence(setting.round)) {
            if (ev.draft_index > count) continue;
            const std::string key = ev.claim_id + "|" + std::to_string(ev.draft_index) + "|" +
                                    std::to_string(ev.round) + "|" + cfg_.analyst.model;
            const auto it = analyses.find(key);
            if (it == analyses.end())
                throw PreconditionError("missing intent analysis for " + key);
            rendered.push_back(shield::shield_evidence(it->second, ev).rendered);
        }
        if (static_cast<int>(rendered.size()) < count)
            throw PreconditionError("trace for claim " + instance.claim.id + " lacks round " +
                                    std::to_string(setting.round));
        return rendered;
    };

    // Assess in parallel (http) or serially (mock); persist in cell order.
    std::vector<tribunal::BeliefAssessment> outcomes(pending.size());
    parallel_for_index(pending.size(), parallelism, [&](std::size_t i) {
        const auto& item = pending[i];
        tribunal::BeliefAssessment assessment;
        try {
            const auto evidence = opts.shielded
                                      ? shielded_evidence(*item.instance, item.setting)
                                      : tribunal::plain_evidence(*item.instance, item.setting);
            assessment = tribunal::assess_belief(*target_, item.model, item.instance->claim,
                                                 evidence, item.setting);
        } catch (const Error& e) {
            assessment.claim_id = item.instance->claim.id;
            assessment.setting = item.setting;
            assessment.target_model = item.model;
            assessment.failure = e.what();
        }
        assessment.shielded = opts.shielded;
        if (opts.shielded) assessment.analyst_model = cfg_.analyst.model;
        outcomes[i] = std::move(assessment);
    });

    RecordWriter writer(cfg_.paths.assessments(), clock_);
    for (const auto& assessment : outcomes) {
        writer.append(RecordKind::assessment, assessment.to_json());
        if (assessment.failure)
            ++result.failed;
        else
            ++result.processed;
    }
    result.wall_ms = elapsed_ms(start);
    record_stage(result);
    return result;
}

StageResult Pipeline::cmd_advise(const AdviseOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    StageResult result{"advise"};

    const auto articles = load_articles(cfg_.paths.articles);
    std::map<std::string, Article> articles_by_id;
    for (const auto& a : articles) articles_by_id.emplace(a.id, a);

    const auto claim_payloads = read_payloads(cfg_.paths.claims(), RecordKind::claim);
    const auto trace_payloads = read_payloads(cfg_.paths.traces(), RecordKind::evidence_trace);
    if (claim_payloads.empty() || trace_payloads.empty())
        throw PreconditionError("advise needs claims and traces");

    std::map<std::string, forge::EvidenceTrace> traces;
    for (const auto& payload : trace_payloads)
        traces.emplace(payload.at("claim_id").get<std::string>(),
                       forge::EvidenceTrace::from_json(payload));

    // Belief rationales fill the suggestion prompt's analysis slot.
    std::map<std::string, std::string> reasons; // model|claim|setting -> reason
    if (fs::exists(cfg_.paths.assessments())) {
        for (const auto& payload : read_payloads(cfg_.paths.assessments(), RecordKind::assessment)) {
            const auto a = tribunal::BeliefAssessment::from_json(payload);
            if (a.shielded || a.failure) continue;
            reasons[a.target_model + "|" + a.claim_id + "|" + a.setting.name()] = a.reason;
        }
    }
    if (reasons.empty())
        throw PreconditionError("advise needs belief assessments; run evaluate first");

    std::set<std::string> existing;
    if (fs::exists(cfg_.paths.suggestions()))
        for (const auto& payload : read_payloads(cfg_.paths.suggestions(), RecordKind::suggestion))
            existing.insert(payload.at("target_model").get<std::string>() + "|" +
                            payload.at("claim_id").get<std::string>() + "|" +
                            std::to_string(payload.at("round").get<int>()));

    const std::string round_setting = "round" + std::to_string(opts.round);
    RecordWriter writer(cfg_.paths.suggestions(), clock_);
    for (const auto& model : cfg_.target_models) {
        for (const auto& payload : claim_payloads) {
            const auto claim = genesis::Claim::from_json(payload);
            const std::string key = model + "|" + claim.id + "|" + std::to_string(opts.round);
            if (existing.count(key)) {
                ++result.skipped;
                continue;
            }
            try {
                auto trace_it = traces.find(claim.id);
                if (trace_it == traces.end())
                    throw PreconditionError("no trace for claim " + claim.id);
                auto article_it = articles_by_id.find(claim.article_id);
                if (article_it == articles_by_id.end())
                    throw PreconditionError("no article for claim " + claim.id);
                auto pre_reason = reasons.find(model + "|" + claim.id + "|original");
                auto post_reason = reasons.find(model + "|" + claim.id + "|" + round_setting);
                if (pre_reason == reasons.end() || post_reason == reasons.end())
                    throw PreconditionError("missing belief rationales for claim " + claim.id);

                const std::string question = shield::generate_advice_question(
                    *judge_, cfg_.judge.model, article_it->second, claim);
                const auto evidence = trace_it->second.evidence_at_round(
                    opts.round, trace_it->second.config.m);
                const std::string answer_pre =
                    shield::seek_suggestion(*target_, model, claim.text, "",
                                            pre_reason->second, question);
                const std::string answer_post = shield::seek_suggestion(
                    *target_, model, claim.text, tribunal::format_evidence_block(evidence),
                    post_reason->second, question);

                shield::SuggestionPair pair;
                pair.question = question;
                pair.answer_pre = answer_pre;
                pair.answer_post = answer_post;
                pair = shield::compare_suggestions(*judge_, cfg_.judge.model, std::move(pair));

                auto record = pair.to_json();
                record["claim_id"] = claim.id;
                record["target_model"] = model;
                record["round"] = opts.round;
                record["judge_model"] = cfg_.judge.model;
                writer.append(RecordKind::suggestion, std::move(record));
                ++result.processed;
            } catch (const Error&) {
                ++result.failed;
            }
        }
    }
    result.wall_ms = elapsed_ms(start);
    record_stage(result);
    return result;
}

StageResult Pipeline::cmd_report() {
    const auto start = std::chrono::steady_clock::now();
    StageResult result{"report"};

    const auto claim_payloads = read_payloads(cfg_.paths.claims(), RecordKind::claim);
    std::map<std::string, genesis::Tier> claim_tiers;
    for (const auto& payload : claim_payloads) {
        const auto claim = genesis::Claim::from_json(payload);
        claim_tiers.emplace(claim.id, claim.tier);
    }

    std::vector<tribunal::BeliefAssessment> assessments;
    if (fs::exists(cfg_.paths.assessments()))
        for (const auto& payload : read_payloads(cfg_.paths.assessments(), RecordKind::assessment))
            assessments.push_back(tribunal::BeliefAssessment::from_json(payload));
    if (assessments.empty()) throw PreconditionError("no assessments to report on");

    const auto belief_report = report::build_belief_report(assessments, claim_tiers);
    std::string text = report::render_text(belief_report);
    const std::string csv = report::render_csv(belief_report);

    if (fs::exists(cfg_.paths.suggestions())) {
        std::vector<shield::SuggestionPair> pairs;
        for (const auto& payload : read_payloads(cfg_.paths.suggestions(), RecordKind::suggestion))
            pairs.push_back(shield::SuggestionPair::from_json(payload));
        if (!pairs.empty()) {
            const auto stats = report::suggestion_stats(pairs);
            text += "\n" + report::render_suggestion_text(stats);
            std::ofstream sf(cfg_.paths.suggestion_csv(), std::ios::binary);
            sf << report::render_suggestion_csv(stats);
        }
    }

    {
        std::ofstream tf(cfg_.paths.report_text(), std::ios::binary);
        if (!tf) throw IoError("cannot write " + cfg_.paths.report_text());
        tf << text;
    }
    {
        std::ofstream cf(cfg_.paths.report_csv(), std::ios::binary);
        if (!cf) throw IoError("cannot write " + cfg_.paths.report_csv());
        cf << csv;
    }
    result.processed = belief_report.cells.size();
    result.wall_ms = elapsed_ms(start);
    record_stage(result);
    return result;
}

void Pipeline::record_stage(const StageResult& result) {
    stage_history_[result.stage] = result;
    write_manifest();
}

void Pipeline::write_manifest() {
    nlohmann::json manifest;
    manifest["config"] = cfg_.to_json();
    nlohmann::json stages;
    for (const auto& [name, r] : stage_history_)
        stages[name] = {{"processed", r.processed},
                        {"skipped", r.skipped},
                        {"failed", r.failed},
                        {"wall_ms", r.wall_ms}};
    // earlier runs' stage stats are merged in so resumes keep history
    if (fs::exists(cfg_.paths.manifest())) {
        try {
            std::ifstream in(cfg_.paths.manifest());
            nlohmann::json previous;
            in >> previous;
            if (previous.contains("stages"))
                for (const auto& [name, value] : previous["stages"].items())
                    if (!stages.contains(name)) stages[name] = value;
        } catch (...) {
        }
    }
    manifest["stages"] = std::move(stages);

    nlohmann::json digests;
    for (const std::string& path :
         {cfg_.paths.claims(), cfg_.paths.traces(), cfg_.paths.assessments(),
          cfg_.paths.intents(), cfg_.paths.suggestions(), cfg_.paths.report_text(),
          cfg_.paths.report_csv()}) {
        if (fs::exists(path)) digests[fs::path(path).filename().string()] = file_digest(path);
    }
    manifest["digests"] = std::move(digests);

    std::ofstream out(cfg_.paths.manifest(), std::ios::binary);
    if (!out) throw IoError("cannot write manifest");
    out << manifest.dump(2) << "\n";
}

RankTable RankTable::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open rank CSV: " + path);
    RankTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (table.columns.empty()) {
            if (fields.size() < 2 || to_lower(fields[0]) != "model")
                throw ParseError("rank CSV header must start with 'model'", lineno);
            table.columns.assign(fields.begin() + 1, fields.end());
            for (const auto& c : table.columns) table.values[c] = {};
            continue;
        }
        if (fields.size() != table.columns.size() + 1)
            throw ParseError("rank CSV row has wrong field count", lineno);
        table.models.push_back(fields[0]);
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            try {
                table.values[table.columns[i]].push_back(std::stod(fields[i + 1]));
            } catch (const std::exception&) {
                throw ParseError("rank CSV value is not numeric: " + fields[i + 1], lineno);
            }
        }
    }
    if (table.models.size() < 2) throw TooFewItems("rank CSV needs at least two models");
    return table;
}

double novelty_from_table(const RankTable& table, const std::string& candidate,
                          const std::vector<std::string>& prev,
                          const std::set<std::string>& lower_better) {
    auto rank_column = [&](const std::string& column) {
        auto it = table.values.find(column);
        if (it == table.values.end()) throw PreconditionError("no such column: " + column);
        return metrics::average_ranks(table.models, it->second, !lower_better.count(column));
    };
    const auto candidate_ranks = rank_column(candidate);
    std::vector<metrics::RankVector> prev_ranks;
    prev_ranks.reserve(prev.size());
    for (const auto& p : prev) prev_ranks.push_back(rank_column(p));
    return metrics::novelty(candidate_ranks, prev_ranks);
}

std::vector<int> load_score_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open score file: " + path);
    std::vector<int> scores;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        try {
            scores.push_back(std::stoi(t));
        } catch (const std::exception&) {
            throw ParseError("score file line is not an integer: " + t, lineno);
        }
    }
    return scores;
}

double ac1_from_files(const std::string& path_a, const std::string& path_b, int threshold) {
    const auto a = load_score_file(path_a);
    const auto b = load_score_file(path_b);
    if (a.size() != b.size())
        throw PreconditionError("score files must have the same number of entries");
    if (a.empty()) throw EmptyInput("score files are empty");
    metrics::RaterMatrix m;
    m.labels_a.reserve(a.size());
    m.labels_b.reserve(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        m.labels_a.push_back(a[i] >= threshold ? 1 : 0);
        m.labels_b.push_back(b[i] >= threshold ? 1 : 0);
    }
    return metrics::gwet_ac1(m);
}

std::map<int, metrics::LinguisticProfile> lingstats_from_traces(const std::string& traces_path,
                                                                metrics::JournalMatch mode) {
    std::map<int, std::vector<std::string>> texts_by_round;
    for (const auto& payload : read_payloads(traces_path, RecordKind::evidence_trace)) {
        const auto trace = forge::EvidenceTrace::from_json(payload);
        for (const auto& draft : trace.drafts)
            for (const auto& entry : draft.rounds)
                texts_by_round[entry.evidence.round].push_back(entry.evidence.text);
    }
    std::map<int, metrics::LinguisticProfile> out;
    for (const auto& [round, texts] : texts_by_round)
        out[round] = metrics::linguistic_profile(texts, mode);
    return out;
}

std::string render_lingstats(const std::map<int, metrics::LinguisticProfile>& by_round) {
    std::ostringstream out;
    out << "round,avg_word_count,prop_time,prop_sources,prop_journals\n";
    for (const auto& [round, p] : by_round) {
        out << round << ',' << report::format_fixed(p.avg_word_count, 2) << ','
            << report::format_fixed(p.prop_time, 4) << ',' << report::format_fixed(p.prop_sources, 4)
            << ',' << report::format_fixed(p.prop_journals, 4) << "\n";
    }
    return out.str();
}

} // namespace credence::pipeline
