#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "credence/backend.hpp"
#include "credence/genesis.hpp"

namespace credence::forge {

using genesis::Claim;

struct Evidence {
    std::string claim_id;
    int draft_index = 1; // 1..m
    int round = 0;       // 0 = planner draft
    std::string text;
};

struct Judgment {
    std::string claim_id;
    int draft_index = 1;
    int round = 0;
    std::string text;
    std::optional<int> score; // quantified credibility, 1..5
};

struct RoundEntry {
    Evidence evidence;
    Judgment judgment;
};

struct DraftTrace {
    int draft_index = 1;
    std::vector<RoundEntry> rounds;      // contiguous from round 0
    std::optional<int> stop_round;       // set when early-stopped
    std::optional<std::string> failure;  // set when a stage error aborted the draft
};

struct ForgeConfig {
    int m = 3;
    int max_rounds = 5;
    bool early_stop = false;
    int accept_threshold = 4;

    void validate() const;
    nlohmann::json to_json() const;
    static ForgeConfig from_json(const nlohmann::json& j);
};

struct EvidenceTrace {
    std::string claim_id;
    ForgeConfig config;
    std::vector<DraftTrace> drafts;

    nlohmann::json to_json() const;
    static EvidenceTrace from_json(const nlohmann::json& j);

    // Evidence texts of one round across drafts 1..count (draft order).
    // Throws PreconditionError if any requested draft lacks that round.
    std::vector<std::string> evidence_at_round(int round, int count) const;

    // Evidence entries of one round across all drafts that reached it.
    std::vector<Evidence> round_evidence(int round) const;
};

// --- prompt rendering ---

std::string build_planner_prompt(const Claim& claim, int m);
std::string build_reviewer_prompt(const Evidence& ev);
std::string build_refiner_prompt(const Claim& claim, const Evidence& ev, const Judgment& j);
std::string build_quantify_prompt(const Judgment& j);

// --- output extraction ---

// Recovers at least m evidence strings from a model's list-formatted output:
// strict list-literal parse, then quoted-line fallback, then plain-line
// fallback. Throws PlannerParseError when fewer than m candidates survive.
std::vector<std::string> parse_planner_output(const std::string& raw, int m);

// First digit 1..5 not adjacent to another digit; ScoreParseError otherwise.
int parse_single_score(const std::string& raw);

// --- operations ---

std::vector<Evidence> plan_evidence(Backend& backend, const std::string& model,
                                    const Claim& claim, int m);
Judgment review(Backend& backend, const std::string& model, const Evidence& ev);
int quantify_judgment(Backend& backend, const std::string& model, const Judgment& j);

inline constexpr int kDefaultMaxRounds = 5;

Evidence refine(Backend& backend, const std::string& model, const Claim& claim,
                const Evidence& ev, const Judgment& j, int max_rounds = kDefaultMaxRounds);

// Full per-claim refinement: planner draft (round 0), then review -> quantify
// -> refine cycles. Every round, including round 0, carries a complete
// (evidence, judgment, score) triple. With early_stop, a draft halts at the
// first round whose score reaches accept_threshold; otherwise every draft
// runs through max_rounds. A stage failure aborts only that draft and is
// recorded in its trace.
EvidenceTrace run_refinement(Backend& backend, const std::string& model, const Claim& claim,
                             const ForgeConfig& cfg);

} // namespace credence::forge
