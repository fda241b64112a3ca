#pragma once

#include <span>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/matrix.hpp"
#include "adex/types.hpp"

namespace adex {

/// An anomalous slice and the normal slice immediately preceding it, over
/// the same feature set. The model-free explainers consume this pair.
struct ReferencePair {
    Matrix anomalous;
    Matrix reference;
    std::vector<std::string> features;

    void validate() const {
        if (anomalous.rows == 0 || reference.rows == 0)
            throw DegenerateError("reference pair: both slices must be nonempty");
        if (anomalous.cols != reference.cols || anomalous.cols != features.size())
            throw IntegrityError("reference pair: feature sets differ");
    }
};

struct ExstreamConfig {
    double correlation_cutoff = 0.9;
};

struct MacrobaseConfig {
    std::size_t bins = 10;
    double min_support = 0.5;     // over anomalous rows
    double min_risk_ratio = 3.0;
    std::size_t max_itemset_size = 3;
};

struct SurrogateConfig {
    std::size_t k = 5;                  // features to report
    std::size_t perturbation_count = 1000;
    double kernel_width = 0.75;
};

struct ExplainerConfig {
    ExstreamConfig exstream;
    MacrobaseConfig macrobase;
    SurrogateConfig surrogate;

    void validate() const {
        if (macrobase.bins < 2)
            throw ConfigError("explainer config: bins must be >= 2");
        if (macrobase.min_support <= 0.0 || macrobase.min_support > 1.0)
            throw ConfigError("explainer config: min_support must be in (0, 1]");
        if (surrogate.k < 1)
            throw ConfigError("explainer config: surrogate k must be >= 1");
    }
};

/// Apply a predicate-kind explanation to one data row: 1 iff every interval
/// predicate is satisfied. Weights-kind explanations carry no predictive
/// power and are rejected.
inline int predict(const Explanation& explanation, std::span<const double> row,
                   const std::vector<std::string>& features) {
    if (explanation.kind != ExplanationKind::Predicate)
        throw UnsupportedError("predict: weights-kind explanations cannot serve as predictors");
    for (const auto& pred : explanation.predicates) {
        int idx = -1;
        for (std::size_t i = 0; i < features.size(); ++i)
            if (features[i] == pred.feature) {
                idx = static_cast<int>(i);
                break;
            }
        if (idx < 0)
            throw IntegrityError("predict: feature '" + pred.feature + "' not present in row");
        double v = row[static_cast<std::size_t>(idx)];
        if (v < pred.lo || v > pred.hi)
            return 0;
    }
    return 1;
}

} // namespace adex
