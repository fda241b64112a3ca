#pragma once

#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/matrix.hpp"
#include "adex/pca.hpp"
#include "adex/types.hpp"

namespace adex {

/// PCA over flattened sliding windows (size s, slide 1). Stands in for
/// neural reconstruction models: window score = reconstruction MSE, record
/// score = mean over enclosing windows.
struct PcaReconstructor {
    std::size_t window = 1;
    PcaModel model; // over dimension window * m
    std::size_t feature_count = 0;
};

namespace detail {

inline void append_windows(const Trace& trace, std::size_t window, Matrix& out) {
    const std::size_t n = trace.record_count();
    const std::size_t m = trace.feature_count();
    for (std::size_t start = 0; start + window <= n; ++start)
        for (std::size_t r = 0; r < window; ++r)
            for (std::size_t c = 0; c < m; ++c)
                out.data.push_back(trace.values.at(start + r, c));
    out.rows += n >= window ? n - window + 1 : 0;
    out.cols = window * m;
}

} // namespace detail

/// Fit on all windows of all training traces. Traces shorter than the
/// window are skipped with a warning; if everything is skipped, error.
inline PcaReconstructor fit_reconstructor(const std::vector<Trace>& training, std::size_t window,
                                          PcaTarget target,
                                          std::vector<std::string>* warnings = nullptr) {
    if (window < 1)
        throw ConfigError("fit_reconstructor: window must be >= 1");
    if (training.empty())
        throw DegenerateError("fit_reconstructor: empty training set");
    const std::size_t m = training.front().feature_count();

    Matrix windows;
    windows.cols = window * m;
    std::size_t used = 0;
    for (const auto& trace : training) {
        if (trace.feature_count() != m)
            throw IntegrityError("fit_reconstructor: inconsistent feature counts");
        if (trace.record_count() < window) {
            if (warnings)
                warnings->push_back("fit_reconstructor: trace '" + trace.trace_id +
                                    "' shorter than window, skipped");
            continue;
        }
        detail::append_windows(trace, window, windows);
        ++used;
    }
    if (used == 0)
        throw DegenerateError("fit_reconstructor: every training trace is shorter than the window");

    PcaReconstructor rec;
    rec.window = window;
    rec.feature_count = m;
    rec.model = fit_pca(windows, target);
    return rec;
}

/// Record score = mean reconstruction MSE over the sliding windows that
/// contain the record; edge records simply use fewer windows.
inline ScoreSeries score_reconstruction(const PcaReconstructor& rec, const Trace& trace) {
    const std::size_t n = trace.record_count();
    const std::size_t m = trace.feature_count();
    const std::size_t s = rec.window;
    if (m != rec.feature_count)
        throw IntegrityError("score_reconstruction: feature count mismatch");
    if (n < s)
        throw DegenerateError("score_reconstruction: trace '" + trace.trace_id +
                              "' shorter than window");

    ScoreSeries out;
    out.trace_id = trace.trace_id;
    out.scores.assign(n, 0.0);
    std::vector<std::size_t> window_counts(n, 0);

    std::vector<double> flat(s * m);
    for (std::size_t start = 0; start + s <= n; ++start) {
        for (std::size_t r = 0; r < s; ++r)
            for (std::size_t c = 0; c < m; ++c)
                flat[r * m + c] = trace.values.at(start + r, c);
        double mse = rec.model.reconstruction_mse(flat);
        for (std::size_t r = start; r < start + s; ++r) {
            out.scores[r] += mse;
            ++window_counts[r];
        }
    }
    for (std::size_t r = 0; r < n; ++r)
        if (window_counts[r] > 0)
            out.scores[r] /= static_cast<double>(window_counts[r]);
    return out;
}

} // namespace adex
