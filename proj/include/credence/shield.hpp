#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "credence/backend.hpp"
#include "credence/forge.hpp"

namespace credence::shield {

using forge::Evidence;
using genesis::Claim;

struct IntentAnalysis {
    std::string claim_id;
    int draft_index = 1;
    int round = 0;
    std::string analyst_model;
    std::string text;

    nlohmann::json to_json() const;
    static IntentAnalysis from_json(const nlohmann::json& j);
};

// Evidence with its analyst warning prepended; `rendered` always places the
// analysis strictly before the evidence text.
struct ShieldedEvidence {
    IntentAnalysis analysis;
    Evidence evidence;
    std::string rendered;
};

enum class IntentLabel { direct_support, indirect_support, other };

std::string intent_label_name(IntentLabel label);

struct SuggestionPair {
    std::string question;
    std::string answer_pre;
    std::string answer_post;
    std::optional<int> similarity; // 1..5
    std::optional<bool> changed;   // similarity <= 3

    nlohmann::json to_json() const;
    static SuggestionPair from_json(const nlohmann::json& j);
};

// --- prompt rendering ---

std::string build_analyst_prompt(const std::string& claim_text, const std::string& evidence_text);
std::string build_intent_prompt(const std::string& claim_text, const std::string& evidence_text);
std::string build_advice_question_prompt(const std::string& article_text,
                                         const std::string& claim_text);
std::string build_suggestion_prompt(const std::string& claim_text,
                                    const std::string& evidence_block,
                                    const std::string& analysis_text,
                                    const std::string& question);
std::string build_compare_prompt(const std::string& question, const std::string& answer1,
                                 const std::string& answer2);

// --- operations ---

IntentAnalysis analyze_intent(Backend& backend, const std::string& analyst_model,
                              const Claim& claim, const Evidence& ev);

ShieldedEvidence shield_evidence(const IntentAnalysis& analysis, const Evidence& ev);

// Matches "Label: <X>" (prefix optional, case-insensitive) against the
// three-way label set; anything else raises LabelParseError.
IntentLabel parse_intent_label(const std::string& raw);

IntentLabel classify_intent(Backend& backend, const std::string& model, const Claim& claim,
                            const Evidence& ev);

std::string generate_advice_question(Backend& backend, const std::string& model,
                                     const Article& article, const Claim& claim);

std::string seek_suggestion(Backend& backend, const std::string& model,
                            const std::string& claim_text, const std::string& evidence_block,
                            const std::string& analysis_text, const std::string& question);

// Fills similarity and changed on the pair via a judge call.
SuggestionPair compare_suggestions(Backend& judge, const std::string& judge_model,
                                   SuggestionPair pair);

} // namespace credence::shield
