#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "adex/ad_metrics.hpp"
#include "adex/error.hpp"
#include "adex/ranges.hpp"
#include "adex/types.hpp"

namespace adex {

/// One trace's scores and labels for curve computation.
struct ScoredTrace {
    std::string trace_id;
    int app_id = 0;
    std::vector<double> scores;
    std::vector<AnomalyRange> real;
};

enum class Granularity { Global, App, TraceLevel };

inline const char* to_string(Granularity g) {
    switch (g) {
    case Granularity::Global: return "global";
    case Granularity::App: return "app";
    case Granularity::TraceLevel: return "trace";
    }
    return "?";
}

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
    double threshold = 0.0;
};

namespace detail {

/// Candidate thresholds: quantile levels of the pooled scores (all distinct
/// values when there are no more than max_thresholds of them), plus a
/// below-minimum sentinel so the all-positive point is always present.
inline std::vector<double> candidate_thresholds(const std::vector<ScoredTrace>& traces,
                                                std::size_t max_thresholds) {
    std::vector<double> pooled;
    for (const auto& t : traces)
        pooled.insert(pooled.end(), t.scores.begin(), t.scores.end());
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    std::vector<double> thresholds;
    if (pooled.empty())
        return thresholds;
    if (max_thresholds == 0 || pooled.size() <= max_thresholds) {
        thresholds = pooled;
    } else {
        // Nearest-rank quantiles over the distinct values.
        thresholds.reserve(max_thresholds);
        for (std::size_t i = 0; i < max_thresholds; ++i) {
            double p = static_cast<double>(i) / static_cast<double>(max_thresholds - 1);
            auto idx = static_cast<std::size_t>(
                std::llround(p * static_cast<double>(pooled.size() - 1)));
            thresholds.push_back(pooled[idx]);
        }
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    }
    thresholds.insert(thresholds.begin(), -std::numeric_limits<double>::infinity());
    return thresholds;
}

inline std::vector<TraceRanges> detect_at(const std::vector<ScoredTrace>& traces,
                                          double threshold) {
    std::vector<TraceRanges> out;
    out.reserve(traces.size());
    for (const auto& t : traces) {
        std::vector<int> binary(t.scores.size(), 0);
        for (std::size_t i = 0; i < t.scores.size(); ++i)
            binary[i] = t.scores[i] > threshold ? 1 : 0;
        out.push_back({t.real, ranges_from_binary(binary)});
    }
    return out;
}

} // namespace detail

/// Precision/recall points over a threshold sweep, sorted by ascending
/// recall (ties by descending precision), with the (0, 1) anchor prepended.
inline std::vector<PrPoint> pr_curve(const std::vector<ScoredTrace>& traces, AdLevel level,
                                     std::size_t max_thresholds = 200) {
    std::vector<PrPoint> points;
    for (double thr : detail::candidate_thresholds(traces, max_thresholds)) {
        Prf prf = evaluate_level(detail::detect_at(traces, thr), level);
        points.push_back({prf.recall, prf.precision, thr});
    }
    std::sort(points.begin(), points.end(), [](const PrPoint& a, const PrPoint& b) {
        if (a.recall != b.recall)
            return a.recall < b.recall;
        return a.precision > b.precision;
    });
    points.insert(points.begin(), {0.0, 1.0, std::numeric_limits<double>::infinity()});
    return points;
}

/// Step integration of a sorted PR point list: sum of delta-recall times the
/// precision at the higher-recall point.
inline double integrate_pr(const std::vector<PrPoint>& points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].recall - points[i - 1].recall) * points[i].precision;
    return area;
}

/// Area under the range-based precision/recall curve. At App/TraceLevel
/// granularity, the AUPRC is computed per unit and averaged; units with no
/// real ranges are skipped with a warning.
inline double auprc(const std::vector<ScoredTrace>& traces, AdLevel level,
                    Granularity granularity = Granularity::Global,
                    std::size_t max_thresholds = 200,
                    std::vector<std::string>* warnings = nullptr) {
    if (granularity == Granularity::Global) {
        bool any_real = false;
        for (const auto& t : traces)
            any_real |= !t.real.empty();
        if (!any_real)
            throw DegenerateError("auprc: no real ranges at global granularity");
        return integrate_pr(pr_curve(traces, level, max_thresholds));
    }

    std::map<std::string, std::vector<ScoredTrace>> groups;
    for (const auto& t : traces) {
        std::string key = granularity == Granularity::App ? "app:" + std::to_string(t.app_id)
                                                          : "trace:" + t.trace_id;
        groups[key].push_back(t);
    }
    double sum = 0.0;
    std::size_t used = 0;
    for (auto& [key, group] : groups) {
        bool any_real = false;
        for (const auto& t : group)
            any_real |= !t.real.empty();
        if (!any_real) {
            if (warnings)
                warnings->push_back("auprc: skipping " + key + " (no real ranges)");
            continue;
        }
        sum += integrate_pr(pr_curve(group, level, max_thresholds));
        ++used;
    }
    if (used == 0)
        throw DegenerateError("auprc: no unit has real ranges");
    return sum / static_cast<double>(used);
}

} // namespace adex
