#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/types.hpp"

namespace adex {

/// Maximal runs of 1s in a 0/1 series, as sorted disjoint half-open ranges.
inline std::vector<PredictedRange> ranges_from_binary(const std::vector<int>& predictions) {
    std::vector<PredictedRange> out;
    std::size_t i = 0;
    const std::size_t n = predictions.size();
    while (i < n) {
        if (predictions[i] != 0) {
            std::size_t j = i;
            while (j < n && predictions[j] != 0)
                ++j;
            out.push_back({i, j});
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

/// Inverse of ranges_from_binary.
inline std::vector<int> binary_from_ranges(const std::vector<PredictedRange>& ranges,
                                           std::size_t length) {
    std::vector<int> out(length, 0);
    for (const auto& r : ranges)
        for (std::size_t i = r.start; i < r.end && i < length; ++i)
            out[i] = 1;
    return out;
}

namespace detail {

/// Epoch second -> record index. Exact matches map directly; off-grid
/// timestamps snap to the nearest record and emit a warning. `ts` may equal
/// last + step (end-exclusive bound).
inline std::size_t timestamp_to_index(const Trace& trace, std::int64_t ts,
                                      std::vector<std::string>* warnings) {
    if (trace.record_count() == 0)
        throw IntegrityError("trace '" + trace.trace_id + "' has no records");
    const std::int64_t t0 = trace.timestamps.front();
    const std::int64_t step = trace.step();
    const auto n = static_cast<std::int64_t>(trace.record_count());
    if (ts < t0 || ts > t0 + n * step)
        throw IntegrityError("timestamp " + std::to_string(ts) + " outside span of trace '" +
                             trace.trace_id + "'");
    std::int64_t offset = ts - t0;
    std::int64_t idx = offset / step;
    if (offset % step != 0) {
        idx = static_cast<std::int64_t>(
            std::llround(static_cast<double>(offset) / static_cast<double>(step)));
        if (warnings)
            warnings->push_back("trace '" + trace.trace_id + "': timestamp " + std::to_string(ts) +
                                " is off-grid, snapped to record " + std::to_string(idx));
    }
    idx = std::clamp<std::int64_t>(idx, 0, n);
    return static_cast<std::size_t>(idx);
}

} // namespace detail

/// Map every ground-truth entry of `trace` to an AnomalyRange covering
/// RCI ∪ EEI in record indices. Sorted by start; overlapping entries on the
/// same trace are an integrity error.
inline std::vector<AnomalyRange> anomaly_ranges(const GroundTruthTable& table, const Trace& trace,
                                                std::vector<std::string>* warnings = nullptr) {
    std::vector<AnomalyRange> out;
    for (const auto& entry : table) {
        if (entry.trace_id != trace.trace_id)
            continue;
        entry.validate();
        std::size_t start = detail::timestamp_to_index(trace, entry.interval_start(), warnings);
        std::size_t end = detail::timestamp_to_index(trace, entry.interval_end(), warnings);
        if (start >= end)
            throw IntegrityError("ground truth for '" + trace.trace_id +
                                 "' maps to an empty record range");
        out.push_back({start, end, entry.anomaly_type});
    }
    std::sort(out.begin(), out.end(),
              [](const AnomalyRange& a, const AnomalyRange& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].start < out[i - 1].end)
            throw IntegrityError("overlapping ground-truth entries on trace '" + trace.trace_id +
                                 "'");
    return out;
}

} // namespace adex
