#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "credence/errors.hpp"

namespace credence::metrics {

struct BeliefStats {
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation
    std::size_t failures = 0;
};

BeliefStats belief_stats(std::span<const int> scores, std::size_t failures = 0);

// Fraction of scores <= 3: every evaluated claim is misinformation, so a
// score at or below the midpoint counts as a correct rejection.
double accuracy(std::span<const int> scores);

// (after/before - 1) * 100. Throws NonPositiveBaseline when before <= 0.
double relative_change(double before, double after);

struct RankVector {
    std::vector<std::string> labels;
    std::vector<double> ranks; // tie-averaged, rank 1 = best
};

// Average ranks: rank 1 is the best value under the chosen orientation; tied
// values share the arithmetic mean of the positions they span.
RankVector average_ranks(std::span<const std::string> labels, std::span<const double> values,
                         bool higher_is_better);
RankVector average_ranks(std::span<const double> values, bool higher_is_better);

// Spearman correlation: Pearson on the tie-averaged rank values. Requires the
// two vectors to carry the same labels in the same order.
double spearman(const RankVector& a, const RankVector& b);

// (1 - mean correlation with previous benchmarks) / 2, in [0, 1].
double novelty(const RankVector& candidate, std::span<const RankVector> prev);

struct RaterMatrix {
    std::vector<int> labels_a; // binary 0/1
    std::vector<int> labels_b;
};

// Two-rater binary Gwet's AC1: (Pa - Pe) / (1 - Pe) with Pe = 2*pi*(1-pi)
// and pi the mean of the two raters' positive proportions.
double gwet_ac1(const RaterMatrix& m);

struct LinguisticProfile {
    double avg_word_count = 0.0;
    double prop_time = 0.0;
    double prop_sources = 0.0;
    double prop_journals = 0.0;
};

enum class JournalMatch { word_boundary, substring };

// Per-text aggregate features: whitespace-token word count, plus the
// fractions of texts containing a time expression, a news outlet name, or a
// journal name.
LinguisticProfile linguistic_profile(std::span<const std::string> texts,
                                     JournalMatch journal_mode = JournalMatch::word_boundary);

// Time grammar: a standalone 4-digit year 1900..2099, an English month name
// (full or abbreviated, optional trailing period), or a weekday name.
bool contains_time_expression(const std::string& text);

bool contains_source_name(const std::string& text);
bool contains_journal_name(const std::string& text, JournalMatch mode);

} // namespace credence::metrics
