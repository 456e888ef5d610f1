#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "credence/genesis.hpp"
#include "credence/metrics.hpp"
#include "credence/shield.hpp"
#include "credence/tribunal.hpp"

namespace credence::report {

struct Cell {
    metrics::BeliefStats stats;
    double accuracy = 0.0;
    // percent change of the mean against the same model/tier's unshielded
    // Original cell; absent for Original itself or when no baseline exists
    std::optional<double> rel_change_pct;
};

struct RowKey {
    std::string model;
    bool shielded = false;
    std::string analyst_model;
    std::string setting_name;

    auto operator<=>(const RowKey&) const = default;
};

struct BeliefReport {
    std::vector<genesis::Tier> tiers;
    std::map<RowKey, std::map<genesis::Tier, Cell>> cells;
};

BeliefReport build_belief_report(const std::vector<tribunal::BeliefAssessment>& assessments,
                                 const std::map<std::string, genesis::Tier>& claim_tiers);

std::string render_text(const BeliefReport& report);
std::string render_csv(const BeliefReport& report);

struct SuggestionStats {
    std::size_t n = 0;
    double mean_similarity = 0.0;
    double changed_fraction = 0.0;
    std::size_t unfilled = 0;
};

SuggestionStats suggestion_stats(const std::vector<shield::SuggestionPair>& pairs);
std::string render_suggestion_text(const SuggestionStats& stats);
std::string render_suggestion_csv(const SuggestionStats& stats);

// Fixed-precision helpers shared by the renderers.
std::string format_fixed(double v, int decimals);

} // namespace credence::report
