#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/types.hpp"

namespace adex {

// ---------------------------------------------------------------------------
// Detection criteria levels and their parameterization
// ---------------------------------------------------------------------------

enum class AdLevel : int { AD1 = 1, AD2 = 2, AD3 = 3, AD4 = 4 };

inline constexpr AdLevel kAllAdLevels[] = {AdLevel::AD1, AdLevel::AD2, AdLevel::AD3, AdLevel::AD4};

inline const char* to_string(AdLevel level) {
    switch (level) {
    case AdLevel::AD1: return "AD1";
    case AdLevel::AD2: return "AD2";
    case AdLevel::AD3: return "AD3";
    case AdLevel::AD4: return "AD4";
    }
    return "?";
}

enum class PositionalBias { Flat, Front };
enum class CardinalityRule { NoPenalty, ExactlyOnce };

/// (alpha, delta, gamma) selecting level semantics for one side (recall or
/// precision). alpha is the existence weight; delta the positional bias;
/// gamma the cardinality rule.
struct ScoringParams {
    double alpha = 0.0;
    PositionalBias delta = PositionalBias::Flat;
    CardinalityRule gamma = CardinalityRule::NoPenalty;

    static ScoringParams recall_preset(AdLevel level) {
        switch (level) {
        case AdLevel::AD1: return {1.0, PositionalBias::Flat, CardinalityRule::NoPenalty};
        case AdLevel::AD2: return {0.0, PositionalBias::Flat, CardinalityRule::NoPenalty};
        case AdLevel::AD3: return {0.0, PositionalBias::Front, CardinalityRule::NoPenalty};
        case AdLevel::AD4: return {0.0, PositionalBias::Front, CardinalityRule::ExactlyOnce};
        }
        throw std::logic_error("bad level");
    }

    static ScoringParams precision_preset(AdLevel level) {
        if (level == AdLevel::AD4)
            return {0.0, PositionalBias::Flat, CardinalityRule::ExactlyOnce};
        return {0.0, PositionalBias::Flat, CardinalityRule::NoPenalty};
    }
};

namespace detail {

inline std::size_t overlap_size(std::size_t a_start, std::size_t a_end, std::size_t b_start,
                                std::size_t b_end) {
    std::size_t lo = std::max(a_start, b_start);
    std::size_t hi = std::min(a_end, b_end);
    return hi > lo ? hi - lo : 0;
}

/// Position weight inside a range of length len, 0-based offset j.
/// Earliest position earns the most; the last position earns 0.
inline double front_weight(std::size_t len, std::size_t j) {
    return static_cast<double>(len - 1 - j);
}

/// Sum of front weights over offsets [0, s).
inline double front_weight_head_sum(std::size_t len, std::size_t s) {
    // sum_{j=0..s-1} (len-1-j) = s*(len-1) - s*(s-1)/2
    double sd = static_cast<double>(s);
    return sd * static_cast<double>(len - 1) - sd * (sd - 1.0) / 2.0;
}

/// Generic single-range score shared by recall (range = Ri against
/// predictions) and precision (range = Pi against real ranges).
template <typename OtherRange>
double range_score(std::size_t start, std::size_t end, std::span<const OtherRange> others,
                   const ScoringParams& params) {
    const std::size_t len = end - start;
    if (len == 0)
        return 0.0;

    std::size_t overlap_total = 0;
    double front_sum = 0.0;
    std::size_t overlapping_count = 0;
    for (const auto& other : others) {
        std::size_t lo = std::max(start, other.start);
        std::size_t hi = std::min(end, other.end);
        if (hi <= lo)
            continue;
        ++overlapping_count;
        overlap_total += hi - lo;
        if (params.delta == PositionalBias::Front)
            for (std::size_t p = lo; p < hi; ++p)
                front_sum += front_weight(len, p - start);
    }
    // Input ranges are disjoint, so per-position double counting cannot occur.

    const double existence = overlap_total > 0 ? 1.0 : 0.0;
    double overlap_reward = static_cast<double>(overlap_total) / static_cast<double>(len);
    if (params.delta == PositionalBias::Front && overlap_total > 0) {
        // Monotonicity adjustment: normalize the front-weighted reward by the
        // best-placed (earliest) block of the same size, so Front never
        // exceeds Flat and equals it exactly for earliest placement.
        double best = front_weight_head_sum(len, overlap_total);
        overlap_reward *= best > 0.0 ? front_sum / best : 1.0;
    }

    double score = params.alpha * existence + (1.0 - params.alpha) * overlap_reward;
    if (params.gamma == CardinalityRule::ExactlyOnce && overlapping_count != 1)
        score = 0.0;
    return score;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Per-range scores
// ---------------------------------------------------------------------------

/// Recall earned by one real range against a sorted disjoint prediction list.
inline double recall_of_range(const AnomalyRange& ri,
                              const std::vector<PredictedRange>& predicted, AdLevel level) {
    return detail::range_score(ri.start, ri.end, std::span<const PredictedRange>(predicted),
                               ScoringParams::recall_preset(level));
}

/// Precision earned by one predicted range against the real ranges.
inline double precision_of_range(const PredictedRange& pi,
                                 const std::vector<AnomalyRange>& real, AdLevel level) {
    return detail::range_score(pi.start, pi.end, std::span<const AnomalyRange>(real),
                               ScoringParams::precision_preset(level));
}

// ---------------------------------------------------------------------------
// Collection-level evaluation
// ---------------------------------------------------------------------------

/// Real + predicted ranges of one trace. Both lists sorted and disjoint.
struct TraceRanges {
    std::vector<AnomalyRange> real;
    std::vector<PredictedRange> predicted;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

inline double harmonic_f(double p, double r) {
    // Extended precision keeps F-scores exactly ordered across levels when
    // the precision/recall pairs are ordered (the quotient of independently
    // rounded doubles can otherwise invert by an ulp).
    long double pl = p, rl = r;
    return (pl + rl) > 0.0L ? static_cast<double>(2.0L * pl * rl / (pl + rl)) : 0.0;
}

/// Mean-over-ranges precision/recall/F at one level across a set of traces.
/// No real ranges -> recall 1; no predictions -> precision 1.
inline Prf evaluate_level(const std::vector<TraceRanges>& traces, AdLevel level) {
    double recall_sum = 0.0;
    std::size_t real_count = 0;
    double precision_sum = 0.0;
    std::size_t predicted_count = 0;
    for (const auto& t : traces) {
        for (const auto& ri : t.real) {
            recall_sum += recall_of_range(ri, t.predicted, level);
            ++real_count;
        }
        for (const auto& pi : t.predicted) {
            precision_sum += precision_of_range(pi, t.real, level);
            ++predicted_count;
        }
    }
    Prf out;
    out.recall = real_count > 0 ? recall_sum / static_cast<double>(real_count) : 1.0;
    out.precision =
        predicted_count > 0 ? precision_sum / static_cast<double>(predicted_count) : 1.0;
    out.f_score = harmonic_f(out.precision, out.recall);
    return out;
}

inline Prf evaluate_level(const std::vector<AnomalyRange>& real,
                          const std::vector<PredictedRange>& predicted, AdLevel level) {
    std::vector<TraceRanges> one{{real, predicted}};
    return evaluate_level(one, level);
}

/// Mean recall_of_range grouped by anomaly type. Types absent from the
/// trace set are omitted. Precision has no type-wise counterpart: false
/// positives are typeless.
inline std::map<AnomalyType, double> typewise_recall(const std::vector<TraceRanges>& traces,
                                                     AdLevel level) {
    std::map<AnomalyType, double> sums;
    std::map<AnomalyType, std::size_t> counts;
    for (const auto& t : traces)
        for (const auto& ri : t.real) {
            sums[ri.anomaly_type] += recall_of_range(ri, t.predicted, level);
            counts[ri.anomaly_type] += 1;
        }
    std::map<AnomalyType, double> out;
    for (auto& [type, sum] : sums)
        out[type] = sum / static_cast<double>(counts[type]);
    return out;
}

// ---------------------------------------------------------------------------
// Aggregated report
// ---------------------------------------------------------------------------

struct AdLevelResult {
    AdLevel level = AdLevel::AD1;
    Prf prf;
    std::map<AnomalyType, double> type_recall;
};

struct AdReport {
    std::vector<AdLevelResult> levels; // in the order requested
    std::size_t real_range_count = 0;
    std::size_t predicted_range_count = 0;
};

/// Evaluate all requested levels and assert the level ordering. A violation
/// indicates an implementation bug, so it is a hard failure, not a domain
/// error.
inline AdReport evaluate_ad(const std::vector<TraceRanges>& traces,
                            std::vector<AdLevel> levels = {AdLevel::AD1, AdLevel::AD2,
                                                           AdLevel::AD3, AdLevel::AD4}) {
    AdReport report;
    for (const auto& t : traces) {
        report.real_range_count += t.real.size();
        report.predicted_range_count += t.predicted.size();
    }
    for (AdLevel level : levels) {
        AdLevelResult r;
        r.level = level;
        r.prf = evaluate_level(traces, level);
        r.type_recall = typewise_recall(traces, level);
        report.levels.push_back(std::move(r));
    }

    std::vector<AdLevelResult> sorted = report.levels;
    std::sort(sorted.begin(), sorted.end(), [](const AdLevelResult& a, const AdLevelResult& b) {
        return static_cast<int>(a.level) < static_cast<int>(b.level);
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const auto& prev = sorted[i - 1].prf;
        const auto& cur = sorted[i].prf;
        if (cur.recall > prev.recall || cur.precision > prev.precision ||
            cur.f_score > prev.f_score)
            throw std::logic_error(std::string("AD level monotonicity violated between ") +
                                   to_string(sorted[i - 1].level) + " and " +
                                   to_string(sorted[i].level));
    }
    return report;
}

} // namespace adex
