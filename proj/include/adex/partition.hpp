#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/rng.hpp"
#include "adex/types.hpp"

namespace adex {

/// The four learning settings: {1-App, N-App} x {Many-Examples,
/// Few-Examples}. Many-Examples settings additionally peek at a normal
/// prefix of each disturbed trace.
enum class LearningSetting { LS1, LS2, LS3, LS4 };

inline const char* to_string(LearningSetting s) {
    switch (s) {
    case LearningSetting::LS1: return "LS1";
    case LearningSetting::LS2: return "LS2";
    case LearningSetting::LS3: return "LS3";
    case LearningSetting::LS4: return "LS4";
    }
    return "?";
}

inline LearningSetting learning_setting_from_string(const std::string& s) {
    if (s == "LS1") return LearningSetting::LS1;
    if (s == "LS2") return LearningSetting::LS2;
    if (s == "LS3") return LearningSetting::LS3;
    if (s == "LS4") return LearningSetting::LS4;
    throw FormatError("unknown learning setting '" + s + "'");
}

inline bool is_one_app(LearningSetting s) {
    return s == LearningSetting::LS1 || s == LearningSetting::LS3;
}
inline bool is_many_examples(LearningSetting s) {
    return s == LearningSetting::LS1 || s == LearningSetting::LS2;
}

struct PartitionPlan {
    LearningSetting setting = LearningSetting::LS4;
    std::optional<int> app_id;
    std::vector<std::string> train_traces;
    std::vector<std::string> test_traces;
    // Many-Examples only: disturbed-trace prefix (record count) usable for
    // training. Train/test stay disjoint at the segment level.
    std::map<std::string, std::size_t> peeked_segments;
};

/// Peeking margin before the first root cause, and the minimum usable
/// prefix, both in seconds.
inline constexpr std::int64_t kPeekMarginSeconds = 300;
inline constexpr std::int64_t kMinPeekPrefixSeconds = 600;

inline PartitionPlan partition(const std::vector<Trace>& traces, const GroundTruthTable& truth,
                               LearningSetting setting, std::optional<int> app_id = std::nullopt,
                               std::vector<std::string>* warnings = nullptr) {
    if (is_one_app(setting) && !app_id)
        throw ConfigError("partition: LS1/LS3 require an app_id");

    PartitionPlan plan;
    plan.setting = setting;
    plan.app_id = is_one_app(setting) ? app_id : std::nullopt;

    std::map<std::string, std::int64_t> first_rci;
    for (const auto& e : truth) {
        auto it = first_rci.find(e.trace_id);
        if (it == first_rci.end() || e.root_cause_start < it->second)
            first_rci[e.trace_id] = e.root_cause_start;
    }

    for (const auto& trace : traces) {
        if (is_one_app(setting) && trace.app_id != *app_id)
            continue;
        auto rci = first_rci.find(trace.trace_id);
        if (rci == first_rci.end()) {
            plan.train_traces.push_back(trace.trace_id);
            continue;
        }
        plan.test_traces.push_back(trace.trace_id);
        if (is_many_examples(setting) && trace.record_count() > 0) {
            std::int64_t prefix_end_ts = rci->second - kPeekMarginSeconds;
            std::int64_t t0 = trace.timestamps.front();
            if (prefix_end_ts - t0 >= kMinPeekPrefixSeconds) {
                auto end_index = static_cast<std::size_t>((prefix_end_ts - t0) / trace.step());
                end_index = std::min(end_index, trace.record_count());
                if (end_index > 0)
                    plan.peeked_segments[trace.trace_id] = end_index;
            }
        }
    }

    if (plan.test_traces.empty() && warnings)
        warnings->push_back("partition: no disturbed traces in scope (empty test set)");
    return plan;
}

/// Trace-level random split of the training traces into internal training,
/// validation, and threshold-fitting sets. Fractions are floored, the
/// remainder is handed out D1-first, and nonemptiness is restored from D0.
struct TrainSplit {
    std::vector<std::string> d0; // model fitting
    std::vector<std::string> d1; // validation
    std::vector<std::string> d2; // threshold selection
};

inline TrainSplit split_train(const std::vector<std::string>& train_traces,
                              std::uint64_t seed, double f0 = 0.7, double f1 = 0.15,
                              double f2 = 0.15) {
    const std::size_t n = train_traces.size();
    if (n < 3)
        throw DegenerateError("split_train: need at least 3 training traces, got " +
                              std::to_string(n));
    if (f0 <= 0.0 || f1 <= 0.0 || f2 <= 0.0 || f0 + f1 + f2 > 1.0 + 1e-9)
        throw ConfigError("split_train: fractions must be positive and sum to at most 1");

    auto n0 = static_cast<std::size_t>(f0 * static_cast<double>(n));
    auto n1 = static_cast<std::size_t>(f1 * static_cast<double>(n));
    auto n2 = static_cast<std::size_t>(f2 * static_cast<double>(n));
    std::size_t rest = n - n0 - n1 - n2;
    std::size_t give[3] = {0, 0, 0}; // D1-first remainder order: D1, D2, D0
    for (std::size_t i = 0; i < rest; ++i)
        ++give[i % 3];
    n1 += give[0];
    n2 += give[1];
    n0 += give[2];
    while (n1 == 0 && n0 > 1) { --n0; ++n1; }
    while (n2 == 0 && n0 > 1) { --n0; ++n2; }
    if (n0 == 0 || n1 == 0 || n2 == 0)
        throw DegenerateError("split_train: cannot make all splits nonempty");

    std::vector<std::string> shuffled = train_traces;
    Rng rng(seed);
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.uniform_index(i)]);

    TrainSplit split;
    split.d0.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n0));
    split.d1.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n0),
                    shuffled.begin() + static_cast<std::ptrdiff_t>(n0 + n1));
    split.d2.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n0 + n1),
                    shuffled.begin() + static_cast<std::ptrdiff_t>(n0 + n1 + n2));
    return split;
}

} // namespace adex
