#include "credence/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace credence::report {

namespace {

using genesis::Tier;

std::string tier_header(Tier t) {
    switch (t) {
    case Tier::easy: return "Easy";
    case Tier::medium: return "Medium";
    case Tier::hard: return "Hard";
    }
    return "?";
}

std::string cell_text(const Cell& cell) {
    std::string out =
        format_fixed(cell.stats.mean, 2) + "+-" + format_fixed(cell.stats.stddev, 2);
    if (cell.rel_change_pct) {
        const double rc = *cell.rel_change_pct;
        out += " (" + std::string(rc >= 0 ? "+" : "") + format_fixed(rc, 1) + "%)";
    }
    return out;
}

std::string row_label(const RowKey& key) {
    std::string label = key.setting_name == "round0" ? "baseline" : key.setting_name;
    if (key.shielded) label += " [shield=" + key.analyst_model + "]";
    return label;
}

} // namespace

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

BeliefReport build_belief_report(const std::vector<tribunal::BeliefAssessment>& assessments,
                                 const std::map<std::string, Tier>& claim_tiers) {
    struct Bucket {
        std::vector<int> scores;
        std::size_t failures = 0;
    };
    std::map<RowKey, std::map<Tier, Bucket>> buckets;
    for (const auto& a : assessments) {
        auto it = claim_tiers.find(a.claim_id);
        if (it == claim_tiers.end()) continue;
        RowKey key{a.target_model, a.shielded, a.analyst_model, a.setting.name()};
        Bucket& bucket = buckets[key][it->second];
        if (a.score)
            bucket.scores.push_back(*a.score);
        else
            ++bucket.failures;
    }

    BeliefReport report;
    report.tiers = {Tier::easy, Tier::medium, Tier::hard};
    for (const auto& [key, by_tier] : buckets) {
        for (const auto& [tier, bucket] : by_tier) {
            if (bucket.scores.empty() && bucket.failures == 0) continue;
            Cell cell;
            if (!bucket.scores.empty()) {
                cell.stats = metrics::belief_stats(bucket.scores, bucket.failures);
                cell.accuracy = metrics::accuracy(bucket.scores);
            } else {
                cell.stats.failures = bucket.failures;
            }
            report.cells[key][tier] = cell;
        }
    }

    // Relative change against the unshielded Original cell of the same model/tier.
    for (auto& [key, by_tier] : report.cells) {
        if (key.setting_name == "original" && !key.shielded) continue;
        const RowKey base_key{key.model, false, "", "original"};
        auto base_it = report.cells.find(base_key);
        if (base_it == report.cells.end()) continue;
        for (auto& [tier, cell] : by_tier) {
            auto base_cell = base_it->second.find(tier);
            if (base_cell == base_it->second.end()) continue;
            if (base_cell->second.stats.n == 0 || cell.stats.n == 0) continue;
            cell.rel_change_pct =
                metrics::relative_change(base_cell->second.stats.mean, cell.stats.mean);
        }
    }
    return report;
}

std::string render_text(const BeliefReport& report) {
    // Column widths sized to content so the table stays aligned.
    constexpr int kLabelWidth = 34;
    constexpr int kCellWidth = 24;

    std::ostringstream out;
    std::string current_model;
    for (const auto& [key, by_tier] : report.cells) {
        if (key.model != current_model) {
            current_model = key.model;
            out << "Model: " << current_model << "\n";
            out << std::string(kLabelWidth, ' ');
            for (Tier t : report.tiers) {
                std::string h = tier_header(t);
                h.resize(kCellWidth, ' ');
                out << h;
            }
            out << "\n";
        }
        std::string label = row_label(key);
        if (static_cast<int>(label.size()) < kLabelWidth)
            label.resize(kLabelWidth, ' ');
        out << label;
        for (Tier t : report.tiers) {
            std::string cell = "-";
            auto it = by_tier.find(t);
            if (it != by_tier.end()) {
                if (it->second.stats.n > 0)
                    cell = cell_text(it->second);
                else
                    cell = "failed n=" + std::to_string(it->second.stats.failures);
            }
            if (static_cast<int>(cell.size()) < kCellWidth) cell.resize(kCellWidth, ' ');
            out << cell;
        }
        out << "\n";
    }
    return out.str();
}

std::string render_csv(const BeliefReport& report) {
    std::ostringstream out;
    out << "model,shielded,analyst_model,setting,tier,n,failures,mean,std,accuracy,rel_change_pct\n";
    for (const auto& [key, by_tier] : report.cells) {
        for (Tier t : report.tiers) {
            auto it = by_tier.find(t);
            if (it == by_tier.end()) continue;
            const Cell& cell = it->second;
            out << key.model << ',' << (key.shielded ? "true" : "false") << ','
                << key.analyst_model << ',' << key.setting_name << ','
                << genesis::tier_name(t) << ',' << cell.stats.n << ',' << cell.stats.failures
                << ',';
            if (cell.stats.n > 0)
                out << format_fixed(cell.stats.mean, 4) << ',' << format_fixed(cell.stats.stddev, 4)
                    << ',' << format_fixed(cell.accuracy, 4);
            else
                out << ",,";
            out << ',';
            if (cell.rel_change_pct) out << format_fixed(*cell.rel_change_pct, 2);
            out << "\n";
        }
    }
    return out.str();
}

SuggestionStats suggestion_stats(const std::vector<shield::SuggestionPair>& pairs) {
    SuggestionStats stats;
    double sum = 0.0;
    std::size_t changed = 0;
    for (const auto& p : pairs) {
        if (!p.similarity) {
            ++stats.unfilled;
            continue;
        }
        ++stats.n;
        sum += *p.similarity;
        if (p.changed && *p.changed) ++changed;
    }
    if (stats.n > 0) {
        stats.mean_similarity = sum / static_cast<double>(stats.n);
        stats.changed_fraction = static_cast<double>(changed) / static_cast<double>(stats.n);
    }
    return stats;
}

std::string render_suggestion_text(const SuggestionStats& stats) {
    std::ostringstream out;
    out << "Suggestion comparison: n=" << stats.n
        << " mean_similarity=" << format_fixed(stats.mean_similarity, 2)
        << " changed_fraction=" << format_fixed(stats.changed_fraction, 3)
        << " unfilled=" << stats.unfilled << "\n";
    return out.str();
}

std::string render_suggestion_csv(const SuggestionStats& stats) {
    std::ostringstream out;
    out << "n,mean_similarity,changed_fraction,unfilled\n";
    out << stats.n << ',' << format_fixed(stats.mean_similarity, 4) << ','
        << format_fixed(stats.changed_fraction, 4) << ',' << stats.unfilled << "\n";
    return out.str();
}

} // namespace credence::report
