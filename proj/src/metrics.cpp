#include "credence/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "credence/textutil.hpp"

namespace credence::metrics {

BeliefStats belief_stats(std::span<const int> scores, std::size_t failures) {
    if (scores.empty()) throw EmptyInput("belief_stats needs at least one score");
    double sum = 0.0;
    for (int s : scores) {
        if (s < 1 || s > 5) throw PreconditionError("belief score outside 1..5");
        sum += s;
    }
    const double n = static_cast<double>(scores.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (int s : scores) {
        const double d = s - mean;
        ss += d * d;
    }
    return {scores.size(), mean, std::sqrt(ss / n), failures};
}

double accuracy(std::span<const int> scores) {
    if (scores.empty()) throw EmptyInput("accuracy needs at least one score");
    std::size_t detected = 0;
    for (int s : scores)
        if (s <= 3) ++detected;
    return static_cast<double>(detected) / static_cast<double>(scores.size());
}

double relative_change(double before, double after) {
    if (!(before > 0)) throw NonPositiveBaseline("baseline must be > 0");
    return (after / before - 1.0) * 100.0;
}

RankVector average_ranks(std::span<const std::string> labels, std::span<const double> values,
                         bool higher_is_better) {
    if (values.size() < 2) throw TooFewItems("ranking needs at least two items");
    if (labels.size() != values.size())
        throw PreconditionError("labels and values must have equal length");

    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return higher_is_better ? values[a] > values[b] : values[a] < values[b];
    });

    RankVector rv;
    rv.labels.assign(labels.begin(), labels.end());
    rv.ranks.assign(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i+1 .. j+1 share their mean
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) rv.ranks[order[k]] = rank;
        i = j + 1;
    }
    return rv;
}

RankVector average_ranks(std::span<const double> values, bool higher_is_better) {
    std::vector<std::string> labels(values.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i + 1);
    return average_ranks(labels, values, higher_is_better);
}

double spearman(const RankVector& a, const RankVector& b) {
    if (a.labels != b.labels)
        throw PreconditionError("rank vectors must carry the same labels in the same order");
    const std::size_t n = a.ranks.size();
    if (n < 2 || b.ranks.size() != n) throw TooFewItems("spearman needs two aligned vectors");

    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a.ranks[i];
        mean_b += b.ranks[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.ranks[i] - mean_a;
        const double db = b.ranks[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0)
        throw DegenerateVariance("all ranks equal on one side; correlation undefined");
    return cov / std::sqrt(var_a * var_b);
}

double novelty(const RankVector& candidate, std::span<const RankVector> prev) {
    if (prev.empty()) throw PreconditionError("novelty needs at least one previous benchmark");
    double sum = 0.0;
    for (const auto& p : prev) sum += spearman(p, candidate);
    const double mean_corr = sum / static_cast<double>(prev.size());
    return (1.0 - mean_corr) / 2.0;
}

double gwet_ac1(const RaterMatrix& m) {
    const std::size_t n = m.labels_a.size();
    if (n == 0) throw EmptyInput("gwet_ac1 needs at least one item");
    if (m.labels_b.size() != n) throw PreconditionError("rater label lists must align");

    std::size_t agree = 0, pos_a = 0, pos_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int a = m.labels_a[i] ? 1 : 0;
        const int b = m.labels_b[i] ? 1 : 0;
        agree += a == b;
        pos_a += a;
        pos_b += b;
    }
    const double pa = static_cast<double>(agree) / static_cast<double>(n);
    const double pi =
        (static_cast<double>(pos_a) + static_cast<double>(pos_b)) / (2.0 * static_cast<double>(n));
    const double pe = 2.0 * pi * (1.0 - pi);
    if (pe == 1.0) throw DegenerateChance("chance agreement saturated");
    return (pa - pe) / (1.0 - pe);
}

namespace {

const char* kMonths[] = {"january", "february", "march",     "april",   "may",      "june",
                         "july",    "august",   "september", "october", "november", "december"};
const char* kMonthAbbrevs[] = {"jan", "feb",  "mar", "apr", "jun", "jul",
                               "aug", "sep",  "sept", "oct", "nov", "dec"};
const char* kWeekdays[] = {"monday", "tuesday",  "wednesday", "thursday",
                           "friday", "saturday", "sunday"};
const char* kSources[] = {"bbc", "cnn", "the new york times", "reuters", "the guardian"};
const char* kJournals[] = {"nature", "science", "cell", "pnas", "lancet"};

bool has_standalone_year(const std::string& text) {
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) continue;
        std::size_t j = i;
        while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j - i == 4) {
            const int year = std::stoi(text.substr(i, 4));
            if (year >= 1900 && year <= 2099) return true;
        }
        i = j;
    }
    return false;
}

} // namespace

bool contains_time_expression(const std::string& text) {
    if (has_standalone_year(text)) return true;
    for (const char* m : kMonths)
        if (contains_word_ci(text, m)) return true;
    for (const char* m : kMonthAbbrevs) {
        // the abbreviation alone or with a trailing period
        if (contains_word_ci(text, m)) return true;
    }
    for (const char* w : kWeekdays)
        if (contains_word_ci(text, w)) return true;
    return false;
}

bool contains_source_name(const std::string& text) {
    for (const char* s : kSources)
        if (contains_ci(text, s)) return true;
    return false;
}

bool contains_journal_name(const std::string& text, JournalMatch mode) {
    for (const char* j : kJournals) {
        if (mode == JournalMatch::substring ? contains_ci(text, j) : contains_word_ci(text, j))
            return true;
    }
    return false;
}

LinguisticProfile linguistic_profile(std::span<const std::string> texts, JournalMatch journal_mode) {
    if (texts.empty()) throw EmptyInput("linguistic_profile needs at least one text");
    LinguisticProfile profile;
    double words = 0.0;
    std::size_t with_time = 0, with_sources = 0, with_journals = 0;
    for (const auto& t : texts) {
        words += static_cast<double>(word_count(t));
        if (contains_time_expression(t)) ++with_time;
        if (contains_source_name(t)) ++with_sources;
        if (contains_journal_name(t, journal_mode)) ++with_journals;
    }
    const double n = static_cast<double>(texts.size());
    profile.avg_word_count = words / n;
    profile.prop_time = static_cast<double>(with_time) / n;
    profile.prop_sources = static_cast<double>(with_sources) / n;
    profile.prop_journals = static_cast<double>(with_journals) / n;
    return profile;
}

} // namespace credence::metrics
