#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "adex/error.hpp"
#include "adex/explain.hpp"
#include "adex/stats.hpp"
#include "adex/types.hpp"

namespace adex {

namespace detail {

inline double entropy2(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

} // namespace detail

/// Entropy-based single-feature reward: the ability of one feature to
/// separate anomalous from reference values.
///
/// The merged values are sorted and cut into maximal runs: adjacent
/// same-class values merge into pure runs, while a value shared by both
/// classes forms a standalone mixed run. The segmentation entropy
///   H_seg = sum_pure (n_r/n) log2(n/n_r)
///         + sum_mixed (n_r/n) (log2(n/n_r) + H_run)
/// penalizes interleaving, and the reward is H_class / H_seg in (0, 1].
/// The reward is 1 exactly when a single threshold separates the classes.
inline double exstream_reward(std::span<const double> anomalous,
                              std::span<const double> reference) {
    if (anomalous.empty() || reference.empty())
        throw DegenerateError("exstream_reward: both value lists must be nonempty");

    const std::size_t n = anomalous.size() + reference.size();
    struct Tagged {
        double value;
        bool is_anomalous;
    };
    std::vector<Tagged> merged;
    merged.reserve(n);
    for (double v : anomalous)
        merged.push_back({v, true});
    for (double v : reference)
        merged.push_back({v, false});
    std::sort(merged.begin(), merged.end(), [](const Tagged& a, const Tagged& b) {
        if (a.value != b.value)
            return a.value < b.value;
        return a.is_anomalous < b.is_anomalous;
    });

    double h_class = detail::entropy2(static_cast<double>(anomalous.size()) / n) +
                     detail::entropy2(static_cast<double>(reference.size()) / n);

    double h_seg = 0.0;
    // Pending pure run being merged across value groups.
    std::size_t pure_len = 0;
    bool pure_class = false;
    auto flush_pure = [&]() {
        if (pure_len > 0)
            h_seg += detail::entropy2(static_cast<double>(pure_len) / n);
        pure_len = 0;
    };

    std::size_t i = 0;
    while (i < merged.size()) {
        std::size_t j = i;
        std::size_t anom = 0;
        while (j < merged.size() && merged[j].value == merged[i].value) {
            anom += merged[j].is_anomalous ? 1 : 0;
            ++j;
        }
        std::size_t len = j - i;
        if (anom > 0 && anom < len) {
            // Mixed run: the tied group stands alone and is penalized by its
            // internal class entropy.
            flush_pure();
            double frac = static_cast<double>(len) / n;
            double h_run = detail::entropy2(static_cast<double>(anom) / len) +
                           detail::entropy2(static_cast<double>(len - anom) / len);
            h_seg += detail::entropy2(frac) + frac * h_run;
        } else {
            bool cls = anom > 0;
            if (pure_len > 0 && cls != pure_class)
                flush_pure();
            pure_class = cls;
            pure_len += len;
        }
        i = j;
    }
    flush_pure();

    if (h_seg <= 0.0)
        return 1.0; // degenerate single-class input is excluded by the precondition
    return h_class / h_seg;
}

/// EXstream-style explanation: rank features by reward, keep the head above
/// the sharpest reward drop, prune correlated survivors, and emit the
/// anomalous-value hull of each retained feature as an interval predicate.
inline Explanation explain_exstream(const ReferencePair& pair, const ExstreamConfig& config) {
    pair.validate();
    const std::size_t m = pair.features.size();

    struct Ranked {
        std::size_t feature;
        double reward;
    };
    std::vector<Ranked> ranked;
    for (std::size_t c = 0; c < m; ++c) {
        auto av = pair.anomalous.column(c);
        auto rv = pair.reference.column(c);
        // A feature with one tied value across both slices carries no
        // separating information; the reward formula degenerates there.
        auto all_equal = [](const std::vector<double>& xs) {
            return std::adjacent_find(xs.begin(), xs.end(),
                                      [](double a, double b) { return a != b; }) == xs.end();
        };
        if (all_equal(av) && all_equal(rv) && av.front() == rv.front())
            continue;
        ranked.push_back({c, exstream_reward(av, rv)});
    }
    if (ranked.empty())
        throw EmptyExplanationError("explain_exstream: no feature separates the slices");

    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.reward > b.reward; });

    // Cut at the largest consecutive reward gap; all-equal rewards keep only
    // the single top feature.
    std::size_t keep = 1;
    double best_gap = 0.0;
    for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
        double gap = ranked[i].reward - ranked[i + 1].reward;
        if (gap > best_gap) {
            best_gap = gap;
            keep = i + 1;
        }
    }
    if (best_gap <= 0.0)
        keep = 1;
    ranked.resize(keep);

    // Among correlated survivors, keep only the highest-reward one.
    std::vector<Ranked> retained;
    std::vector<std::vector<double>> retained_values;
    for (const auto& cand : ranked) {
        std::vector<double> values = pair.reference.column(cand.feature);
        auto av = pair.anomalous.column(cand.feature);
        values.insert(values.end(), av.begin(), av.end());
        bool correlated = false;
        for (const auto& kept : retained_values)
            if (std::abs(pearson(kept, values)) > config.correlation_cutoff) {
                correlated = true;
                break;
            }
        if (!correlated) {
            retained.push_back(cand);
            retained_values.push_back(std::move(values));
        }
    }

    Explanation out;
    out.kind = ExplanationKind::Predicate;
    for (const auto& r : retained) {
        auto av = pair.anomalous.column(r.feature);
        auto [lo, hi] = std::minmax_element(av.begin(), av.end());
        out.feature_set.push_back(pair.features[r.feature]);
        out.predicates.push_back({pair.features[r.feature], *lo, *hi});
    }
    return out;
}

} // namespace adex
