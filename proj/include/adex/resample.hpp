#pragma once

#include <cstddef>

#include "adex/error.hpp"
#include "adex/types.hpp"

namespace adex {

/// Average records into l-second buckets. Output row i is the mean of
/// bucket i; its timestamp is the bucket's start time. The corresponding
/// cardinality factor is 1/l.
inline Trace resample(const Trace& trace, std::size_t bucket_seconds) {
    const std::size_t n = trace.record_count();
    if (bucket_seconds < 1 || (n > 0 && bucket_seconds > n))
        throw ConfigError("resample: bucket length must be in [1, record count]");
    if (bucket_seconds == 1)
        return trace;

    const std::size_t m = trace.feature_count();
    const std::size_t out_rows = (n + bucket_seconds - 1) / bucket_seconds;

    Trace out;
    out.trace_id = trace.trace_id;
    out.app_id = trace.app_id;
    out.features = trace.features;
    out.values = Matrix(out_rows, m);
    out.timestamps.resize(out_rows);

    // Bucket starts are bucket_seconds * step apart even when the last
    // bucket is partial, so the constant-step invariant survives.
    for (std::size_t b = 0; b < out_rows; ++b) {
        std::size_t lo = b * bucket_seconds;
        std::size_t hi = std::min(lo + bucket_seconds, n);
        out.timestamps[b] = trace.timestamps[lo];
        for (std::size_t c = 0; c < m; ++c) {
            double sum = 0.0;
            for (std::size_t r = lo; r < hi; ++r)
                sum += trace.values.at(r, c);
            out.values.at(b, c) = sum / static_cast<double>(hi - lo);
        }
    }
    out.validate();
    return out;
}

} // namespace adex
