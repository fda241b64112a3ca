#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "adex/error.hpp"
#include "adex/explain.hpp"
#include "adex/types.hpp"

namespace adex {

/// Relative risk of abnormality for rows matching an itemset (subscript o =
/// anomalous/outlier, i = reference/inlier; a = matching, b = non-matching).
/// RR = (a_o/(a_o+a_i)) / (b_o/(b_o+b_i)).
/// b_o == 0 with b_i > 0 yields the +infinity sentinel; an itemset matching
/// every row (b empty) has no contrast and yields 1.
inline double risk_ratio(std::size_t a_o, std::size_t a_i, std::size_t b_o, std::size_t b_i) {
    if (a_o + a_i == 0)
        throw DegenerateError("risk_ratio: itemset matches no rows");
    double matched = static_cast<double>(a_o) / static_cast<double>(a_o + a_i);
    if (b_o + b_i == 0)
        return 1.0;
    if (b_o == 0)
        return matched > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    double unmatched = static_cast<double>(b_o) / static_cast<double>(b_o + b_i);
    return matched / unmatched;
}

namespace detail {

struct BinSpec {
    double lo = 0.0;
    double width = 1.0;
    std::size_t bins = 1;

    std::size_t bin_of(double v) const {
        if (width <= 0.0)
            return 0;
        auto b = static_cast<long long>(std::floor((v - lo) / width));
        return static_cast<std::size_t>(std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1));
    }
};

struct Itemset {
    // Sorted (feature, bin) pairs, one per feature at most.
    std::vector<std::pair<std::size_t, std::size_t>> items;
    double support = 0.0;
    double rr = 0.0;
};

inline bool row_matches(const std::vector<std::size_t>& row_bins, const Itemset& set) {
    for (auto [feature, bin] : set.items)
        if (row_bins[feature] != bin)
            return false;
    return true;
}

} // namespace detail

/// MacroBase-style explanation: equal-width binning over the combined
/// min/max of both slices, then Apriori-style mining of itemsets with
/// sufficient support (over anomalous rows) and risk ratio. The winning
/// itemset maximizes RR; ties prefer larger support, then fewer items.
inline Explanation explain_macrobase(const ReferencePair& pair, const MacrobaseConfig& config) {
    pair.validate();
    if (config.bins < 2)
        throw ConfigError("explain_macrobase: bins must be >= 2");
    const std::size_t m = pair.features.size();
    const std::size_t n_anom = pair.anomalous.rows;
    const std::size_t n_ref = pair.reference.rows;

    std::vector<detail::BinSpec> specs(m);
    for (std::size_t c = 0; c < m; ++c) {
        double lo = pair.anomalous.at(0, c);
        double hi = lo;
        for (std::size_t r = 0; r < n_anom; ++r) {
            lo = std::min(lo, pair.anomalous.at(r, c));
            hi = std::max(hi, pair.anomalous.at(r, c));
        }
        for (std::size_t r = 0; r < n_ref; ++r) {
            lo = std::min(lo, pair.reference.at(r, c));
            hi = std::max(hi, pair.reference.at(r, c));
        }
        specs[c] = {lo, hi > lo ? (hi - lo) / static_cast<double>(config.bins) : 0.0,
                    config.bins};
    }

    auto bin_rows = [&](const Matrix& mat) {
        std::vector<std::vector<std::size_t>> rows(mat.rows, std::vector<std::size_t>(m));
        for (std::size_t r = 0; r < mat.rows; ++r)
            for (std::size_t c = 0; c < m; ++c)
                rows[r][c] = specs[c].bin_of(mat.at(r, c));
        return rows;
    };
    auto anom_bins = bin_rows(pair.anomalous);
    auto ref_bins = bin_rows(pair.reference);

    auto evaluate = [&](detail::Itemset& set) {
        std::size_t a_o = 0, a_i = 0;
        for (const auto& row : anom_bins)
            a_o += detail::row_matches(row, set) ? 1 : 0;
        for (const auto& row : ref_bins)
            a_i += detail::row_matches(row, set) ? 1 : 0;
        set.support = static_cast<double>(a_o) / static_cast<double>(n_anom);
        if (a_o + a_i == 0) {
            set.rr = 0.0;
            return;
        }
        set.rr = risk_ratio(a_o, a_i, n_anom - a_o, n_ref - a_i);
    };

    // Level 1: single items over the bins actually hit by anomalous rows.
    std::vector<detail::Itemset> frontier;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& row : anom_bins)
        for (std::size_t c = 0; c < m; ++c)
            seen.insert({c, row[c]});
    for (auto& item : seen) {
        detail::Itemset set;
        set.items = {item};
        evaluate(set);
        if (set.support >= config.min_support && set.rr >= config.min_risk_ratio)
            frontier.push_back(std::move(set));
    }

    std::vector<detail::Itemset> passing = frontier;
    for (std::size_t size = 2; size <= config.max_itemset_size && frontier.size() > 1; ++size) {
        std::vector<detail::Itemset> next;
        std::set<std::vector<std::pair<std::size_t, std::size_t>>> emitted;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            for (std::size_t j = i + 1; j < frontier.size(); ++j) {
                detail::Itemset joined;
                joined.items = frontier[i].items;
                for (auto& item : frontier[j].items) {
                    bool dup_feature = false;
                    for (auto& mine : joined.items)
                        if (mine.first == item.first)
                            dup_feature = true;
                    if (!dup_feature)
                        joined.items.push_back(item);
                }
                if (joined.items.size() != size)
                    continue;
                std::sort(joined.items.begin(), joined.items.end());
                if (!emitted.insert(joined.items).second)
                    continue;
                evaluate(joined);
                if (joined.support >= config.min_support && joined.rr >= config.min_risk_ratio)
                    next.push_back(std::move(joined));
            }
        }
        passing.insert(passing.end(), next.begin(), next.end());
        frontier = std::move(next);
    }

    if (passing.empty())
        throw EmptyExplanationError(
            "explain_macrobase: no itemset passes the support/risk-ratio thresholds");

    const detail::Itemset* best = &passing.front();
    for (const auto& set : passing) {
        if (set.rr > best->rr ||
            (set.rr == best->rr && (set.support > best->support ||
                                    (set.support == best->support &&
                                     set.items.size() < best->items.size()))))
            best = &set;
    }

    Explanation out;
    out.kind = ExplanationKind::Predicate;
    for (auto [feature, bin] : best->items) {
        const auto& spec = specs[feature];
        double lo = spec.lo + spec.width * static_cast<double>(bin);
        double hi = spec.width > 0.0 ? lo + spec.width : spec.lo;
        out.feature_set.push_back(pair.features[feature]);
        out.predicates.push_back({pair.features[feature], lo, hi});
    }
    return out;
}

} // namespace adex
