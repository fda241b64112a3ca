#pragma once

#include <vector>

#include "adex/types.hpp"

namespace adex {

/// Per-feature min/max captured from one trace.
struct ScalerModel {
    std::vector<double> min_values;
    std::vector<double> max_values;
};

/// Per-trace min-max rescaling to [0, 1]; constant features map to 0.
inline std::pair<Trace, ScalerModel> rescale(const Trace& trace) {
    const std::size_t n = trace.record_count();
    const std::size_t m = trace.feature_count();

    ScalerModel scaler;
    scaler.min_values.assign(m, 0.0);
    scaler.max_values.assign(m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        double lo = n > 0 ? trace.values.at(0, c) : 0.0;
        double hi = lo;
        for (std::size_t r = 1; r < n; ++r) {
            double v = trace.values.at(r, c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        scaler.min_values[c] = lo;
        scaler.max_values[c] = hi;
    }

    Trace out = trace;
    for (std::size_t c = 0; c < m; ++c) {
        double span = scaler.max_values[c] - scaler.min_values[c];
        for (std::size_t r = 0; r < n; ++r)
            out.values.at(r, c) =
                span > 0.0 ? (trace.values.at(r, c) - scaler.min_values[c]) / span : 0.0;
    }
    return {std::move(out), std::move(scaler)};
}

} // namespace adex
