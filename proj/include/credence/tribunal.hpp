#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "credence/backend.hpp"
#include "credence/forge.hpp"

namespace credence::tribunal {

using forge::Evidence;
using forge::EvidenceTrace;
using genesis::Claim;

// Evidence condition a belief score is measured under. Original presents the
// bare claim; Round(r) presents evidence after r refinement rounds (round 0
// is the planner baseline). evidence_count limits how many drafts are shown
// (defaults to all of them).
struct EvalSetting {
    enum class Kind { original, round };
    Kind kind = Kind::original;
    int round = 0;
    std::optional<int> evidence_count;

    static EvalSetting original();
    static EvalSetting at_round(int r, std::optional<int> count = std::nullopt);
    static EvalSetting parse(const std::string& s); // "original", "baseline", "round3"
    std::string name() const;

    nlohmann::json to_json() const;
    static EvalSetting from_json(const nlohmann::json& j);

    friend bool operator==(const EvalSetting&, const EvalSetting&) = default;
};

struct BeliefAssessment {
    std::string claim_id;
    EvalSetting setting;
    std::string target_model;
    std::optional<int> score; // 1..5 when parse succeeded
    std::string reason;
    std::string raw_output;
    std::optional<std::string> failure;
    bool shielded = false;
    std::string analyst_model;

    nlohmann::json to_json() const;
    static BeliefAssessment from_json(const nlohmann::json& j);
};

// "1. first\n2. second" in draft order; empty input renders the empty string.
std::string format_evidence_block(const std::vector<std::string>& evidence_texts);

std::string build_belief_prompt(const std::string& claim_text, const std::string& evidence_block);

struct ParsedAssessment {
    int score = 0;
    std::string reason;
};

// Extracts the first balanced JSON object from a possibly fenced/wrapped
// model output and validates its score/reason fields. Throws NoJsonFound,
// ScoreOutOfRange (non-integral or out-of-range score) or MissingField.
ParsedAssessment parse_assessment(const std::string& raw);

// One temperature-0 backend call; parse failures are recorded on the
// assessment rather than thrown.
BeliefAssessment assess_belief(Backend& backend, const std::string& target_model,
                               const Claim& claim, const std::vector<std::string>& evidence_texts,
                               const EvalSetting& setting);

struct SweepInstance {
    Claim claim;
    EvidenceTrace trace;
};

using EvidenceProvider =
    std::function<std::vector<std::string>(const SweepInstance&, const EvalSetting&)>;

// Evidence texts straight from the trace (shielding wraps this elsewhere).
std::vector<std::string> plain_evidence(const SweepInstance& instance, const EvalSetting& setting);

// Full instances x settings sweep. Per-item errors become failed assessments;
// the sweep itself never aborts. Results are ordered by (instance, setting).
std::vector<BeliefAssessment> run_sweep(Backend& backend, const std::string& target_model,
                                        const std::vector<SweepInstance>& instances,
                                        const std::vector<EvalSetting>& settings,
                                        const EvidenceProvider& provider = plain_evidence);

std::string build_credibility_prompt(const Evidence& ev);

// External credibility score of a single evidence piece from a judge model.
int score_credibility(Backend& judge, const std::string& judge_model, const Evidence& ev);

} // namespace credence::tribunal
