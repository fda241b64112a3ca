#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/types.hpp"

namespace adex {

/// Exponentially weighted moving-average forecaster. Stands in for heavier
/// forecasting models behind the same contract: one-step prediction, record
/// score = relative forecasting error.
struct EwmaForecaster {
    double smoothing = 0.01;        // lambda in (0, 1]; slow tracking of the normal regime
    std::vector<double> state;      // initial per-feature forecast
    double epsilon = 1e-8;

    std::size_t feature_count() const { return state.size(); }
};

/// Initial state is the mean of the first records of the training traces.
inline EwmaForecaster fit_forecaster(const std::vector<Trace>& training, double smoothing) {
    if (training.empty())
        throw DegenerateError("fit_forecaster: empty training set");
    if (smoothing <= 0.0 || smoothing > 1.0)
        throw ConfigError("fit_forecaster: smoothing must be in (0, 1]");
    const std::size_t m = training.front().feature_count();
    EwmaForecaster model;
    model.smoothing = smoothing;
    model.state.assign(m, 0.0);
    std::size_t used = 0;
    for (const auto& trace : training) {
        if (trace.feature_count() != m)
            throw IntegrityError("fit_forecaster: inconsistent feature counts");
        if (trace.record_count() == 0)
            continue;
        for (std::size_t c = 0; c < m; ++c)
            model.state[c] += trace.values.at(0, c);
        ++used;
    }
    if (used == 0)
        throw DegenerateError("fit_forecaster: all training traces are empty");
    for (auto& v : model.state)
        v /= static_cast<double>(used);
    return model;
}

/// score(t) = ||forecast(t) - x(t)|| / (||x(t)|| + eps); score(0) = 0.
/// The forecast state folds in each record after it is scored, so the scan
/// is sequential within a trace.
inline ScoreSeries score_forecast(const EwmaForecaster& model, const Trace& trace) {
    if (trace.feature_count() != model.feature_count())
        throw IntegrityError("score_forecast: feature count mismatch");
    const std::size_t m = model.feature_count();
    std::vector<double> forecast = model.state;

    ScoreSeries out;
    out.trace_id = trace.trace_id;
    out.scores.resize(trace.record_count(), 0.0);
    for (std::size_t r = 0; r < trace.record_count(); ++r) {
        if (r > 0) {
            double err = 0.0;
            double norm = 0.0;
            for (std::size_t c = 0; c < m; ++c) {
                double x = trace.values.at(r, c);
                double d = forecast[c] - x;
                err += d * d;
                norm += x * x;
            }
            out.scores[r] = std::sqrt(err) / (std::sqrt(norm) + model.epsilon);
        }
        for (std::size_t c = 0; c < m; ++c)
            forecast[c] =
                model.smoothing * trace.values.at(r, c) + (1.0 - model.smoothing) * forecast[c];
    }
    return out;
}

} // namespace adex
