#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/stats.hpp"

namespace adex {

enum class ThresholdMethod { Std, Mad, Iqr };

inline const char* to_string(ThresholdMethod m) {
    switch (m) {
    case ThresholdMethod::Std: return "STD";
    case ThresholdMethod::Mad: return "MAD";
    case ThresholdMethod::Iqr: return "IQR";
    }
    return "?";
}

inline ThresholdMethod threshold_method_from_string(const std::string& s) {
    if (s == "STD") return ThresholdMethod::Std;
    if (s == "MAD") return ThresholdMethod::Mad;
    if (s == "IQR") return ThresholdMethod::Iqr;
    throw FormatError("unknown threshold method '" + s + "'");
}

/// threshold = S1 + c * S2, where (S1, S2) depend on the method. With
/// iterations = 2 the computation runs again on the scores at or below the
/// first threshold, dropping obvious outliers.
struct ThresholdRule {
    ThresholdMethod method = ThresholdMethod::Mad;
    double c = 2.0;
    int iterations = 1;

    std::string name() const {
        std::string c_str = std::to_string(c);
        c_str.erase(c_str.find_last_not_of('0') + 1);
        if (!c_str.empty() && c_str.back() == '.')
            c_str.pop_back();
        return std::string(to_string(method)) + "_c" + c_str + "_i" + std::to_string(iterations);
    }
};

struct ThresholdResult {
    double value = 0.0;
    bool degenerate = false; // all scores identical
};

inline constexpr double kMadScale = 1.4826;

namespace detail {

inline double threshold_once(std::vector<double> scores, const ThresholdRule& rule) {
    switch (rule.method) {
    case ThresholdMethod::Std: {
        double m = mean(scores);
        return m + rule.c * sample_stddev(scores);
    }
    case ThresholdMethod::Mad: {
        std::sort(scores.begin(), scores.end());
        double med = quantile_sorted(scores, 0.5);
        std::vector<double> devs(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i)
            devs[i] = std::abs(scores[i] - med);
        std::sort(devs.begin(), devs.end());
        return med + rule.c * kMadScale * quantile_sorted(devs, 0.5);
    }
    case ThresholdMethod::Iqr: {
        std::sort(scores.begin(), scores.end());
        double q1 = quantile_sorted(scores, 0.25);
        double q3 = quantile_sorted(scores, 0.75);
        return q3 + rule.c * (q3 - q1);
    }
    }
    throw std::logic_error("bad threshold method");
}

} // namespace detail

/// Unsupervised threshold selection on held-out training scores.
inline ThresholdResult select_threshold(const std::vector<double>& scores,
                                        const ThresholdRule& rule) {
    if (scores.size() < 4)
        throw DegenerateError("select_threshold: need at least 4 scores, got " +
                              std::to_string(scores.size()));
    if (rule.c <= 0.0)
        throw ConfigError("select_threshold: c must be positive");
    if (rule.iterations != 1 && rule.iterations != 2)
        throw ConfigError("select_threshold: iterations must be 1 or 2");

    auto [min_it, max_it] = std::minmax_element(scores.begin(), scores.end());
    if (*min_it == *max_it)
        return {*min_it, true};

    double threshold = detail::threshold_once(scores, rule);
    if (rule.iterations == 2) {
        std::vector<double> kept;
        kept.reserve(scores.size());
        for (double s : scores)
            if (s <= threshold)
                kept.push_back(s);
        // Every rule's threshold is at or above a central statistic, so the
        // filtered set is never empty.
        if (!kept.empty())
            threshold = detail::threshold_once(std::move(kept), rule);
    }
    return {threshold, false};
}

/// The full grid the evaluation sweeps: 3 methods x 4 factors x 2 pass
/// counts = 24 combinations.
inline std::vector<ThresholdRule> threshold_grid(
    const std::vector<ThresholdMethod>& methods = {ThresholdMethod::Std, ThresholdMethod::Mad,
                                                   ThresholdMethod::Iqr},
    const std::vector<double>& factors = {1.5, 2.0, 2.5, 3.0},
    const std::vector<int>& iteration_choices = {1, 2}) {
    std::vector<ThresholdRule> grid;
    for (auto m : methods)
        for (double c : factors)
            for (int it : iteration_choices)
                grid.push_back({m, c, it});
    return grid;
}

/// Binary predictions: 1 iff score strictly exceeds the threshold.
inline std::vector<int> detect(const std::vector<double>& scores, double threshold) {
    std::vector<int> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        out[i] = scores[i] > threshold ? 1 : 0;
    return out;
}

} // namespace adex
