#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/matrix.hpp"

namespace adex {

// ---------------------------------------------------------------------------
// Anomaly taxonomy
// ---------------------------------------------------------------------------

enum class AnomalyType : int {
    BurstyInput = 1,       // T1
    BurstyInputCrash = 2,  // T2
    StalledInput = 3,      // T3
    CpuContention = 4,     // T4
    DriverFailure = 5,     // T5
    ExecutorFailure = 6,   // T6
};

inline const char* to_string(AnomalyType t) {
    switch (t) {
    case AnomalyType::BurstyInput: return "T1";
    case AnomalyType::BurstyInputCrash: return "T2";
    case AnomalyType::StalledInput: return "T3";
    case AnomalyType::CpuContention: return "T4";
    case AnomalyType::DriverFailure: return "T5";
    case AnomalyType::ExecutorFailure: return "T6";
    }
    return "?";
}

inline AnomalyType anomaly_type_from_string(const std::string& s) {
    if (s == "T1") return AnomalyType::BurstyInput;
    if (s == "T2") return AnomalyType::BurstyInputCrash;
    if (s == "T3") return AnomalyType::StalledInput;
    if (s == "T4") return AnomalyType::CpuContention;
    if (s == "T5") return AnomalyType::DriverFailure;
    if (s == "T6") return AnomalyType::ExecutorFailure;
    throw FormatError("unknown anomaly_type token: '" + s + "'");
}

constexpr int kAnomalyTypeCount = 6;

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

/// A uniformly sampled multivariate time series with named features.
/// Immutable by convention after construction; operations return new traces.
struct Trace {
    std::string trace_id;
    int app_id = 0;
    std::vector<std::int64_t> timestamps; // strictly increasing, constant step
    std::vector<std::string> features;
    Matrix values; // one row per timestamp, one column per feature

    std::size_t record_count() const { return timestamps.size(); }
    std::size_t feature_count() const { return features.size(); }

    std::int64_t step() const {
        return timestamps.size() >= 2 ? timestamps[1] - timestamps[0] : 1;
    }

    /// Throws IntegrityError unless the shape/timestamp invariants hold.
    void validate() const {
        if (values.rows != timestamps.size())
            throw IntegrityError("trace '" + trace_id + "': row count != timestamp count");
        if (values.cols != features.size())
            throw IntegrityError("trace '" + trace_id + "': column count != feature count");
        if (timestamps.size() >= 2) {
            std::int64_t d = timestamps[1] - timestamps[0];
            if (d <= 0)
                throw IntegrityError("trace '" + trace_id + "': non-increasing timestamps");
            for (std::size_t i = 1; i < timestamps.size(); ++i)
                if (timestamps[i] - timestamps[i - 1] != d)
                    throw IntegrityError("trace '" + trace_id +
                                         "': timestamps not strictly increasing with constant step");
        }
    }

    int feature_index(const std::string& name) const {
        for (std::size_t i = 0; i < features.size(); ++i)
            if (features[i] == name)
                return static_cast<int>(i);
        return -1;
    }
};

// ---------------------------------------------------------------------------
// Ground truth
// ---------------------------------------------------------------------------

/// One labeled anomaly: root-cause interval plus optional extended-effect
/// interval, in epoch seconds (end-exclusive).
struct GroundTruthEntry {
    int app_id = 0;
    std::string trace_id;
    AnomalyType anomaly_type = AnomalyType::BurstyInput;
    std::int64_t root_cause_start = 0;
    std::int64_t root_cause_end = 0;
    std::optional<std::int64_t> extended_effect_start;
    std::optional<std::int64_t> extended_effect_end;

    bool has_eei() const { return extended_effect_start.has_value(); }

    void validate() const {
        if (root_cause_start >= root_cause_end)
            throw IntegrityError("ground truth for '" + trace_id +
                                 "': root_cause_start must precede root_cause_end");
        if (extended_effect_start.has_value() != extended_effect_end.has_value())
            throw IntegrityError("ground truth for '" + trace_id + "': half-specified EEI");
        if (has_eei()) {
            if (*extended_effect_start != root_cause_end)
                throw IntegrityError("ground truth for '" + trace_id +
                                     "': EEI must start at root_cause_end");
            if (*extended_effect_start >= *extended_effect_end)
                throw IntegrityError("ground truth for '" + trace_id + "': empty or inverted EEI");
        }
    }

    /// [start, end) of RCI ∪ EEI in epoch seconds.
    std::int64_t interval_start() const { return root_cause_start; }
    std::int64_t interval_end() const {
        return has_eei() ? *extended_effect_end : root_cause_end;
    }
};

using GroundTruthTable = std::vector<GroundTruthEntry>;

// ---------------------------------------------------------------------------
// Ranges and scores
// ---------------------------------------------------------------------------

/// Real anomaly range in record indices, half-open [start, end).
struct AnomalyRange {
    std::size_t start = 0;
    std::size_t end = 0;
    AnomalyType anomaly_type = AnomalyType::BurstyInput;

    std::size_t length() const { return end - start; }
};

/// Predicted anomaly range in record indices, half-open [start, end).
struct PredictedRange {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start; }
};

/// Record-wise outlier scores for one trace.
struct ScoreSeries {
    std::string trace_id;
    std::vector<double> scores;
};

// ---------------------------------------------------------------------------
// Explanations
// ---------------------------------------------------------------------------

enum class ExplanationKind { Predicate, Weights };

/// Closed-interval predicate on one feature.
struct FeaturePredicate {
    std::string feature;
    double lo = 0.0;
    double hi = 0.0;
};

struct FeatureWeight {
    std::string feature;
    double weight = 0.0;
};

/// Abstract explanation: an ordered feature set (the extraction view), and
/// either interval predicates (conjunctive, usable for prediction) or
/// per-feature weights (attribution only).
struct Explanation {
    ExplanationKind kind = ExplanationKind::Predicate;
    std::vector<std::string> feature_set;
    std::vector<FeaturePredicate> predicates; // kind == Predicate
    std::vector<FeatureWeight> weights;       // kind == Weights
    double build_time_seconds = 0.0;
    bool degenerate = false;

    std::size_t size() const { return feature_set.size(); }
};

} // namespace adex
