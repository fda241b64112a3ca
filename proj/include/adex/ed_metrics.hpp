#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/explain.hpp"
#include "adex/matrix.hpp"
#include "adex/rng.hpp"
#include "adex/types.hpp"

namespace adex {

// ---------------------------------------------------------------------------
// Core consistency metrics
// ---------------------------------------------------------------------------

/// Number of features in an explanation; mean size for a set.
inline double conciseness(const std::vector<Explanation>& explanations) {
    if (explanations.empty())
        throw DegenerateError("conciseness: empty explanation set");
    double sum = 0.0;
    for (const auto& e : explanations)
        sum += static_cast<double>(e.size());
    return sum / static_cast<double>(explanations.size());
}

/// Entropy (bits) of the duplicate-preserving union of the explanations'
/// feature sets. Identical explanations of size s give exactly log2(s).
inline double consistency_entropy(const std::vector<Explanation>& explanations) {
    if (explanations.empty())
        throw DegenerateError("consistency_entropy: empty explanation set");
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& e : explanations) {
        if (e.feature_set.empty())
            throw DegenerateError("consistency_entropy: explanation with empty feature set");
        for (const auto& f : e.feature_set) {
            ++counts[f];
            ++total;
        }
    }
    double h = 0.0;
    for (const auto& [feature, count] : counts) {
        double p = static_cast<double>(count) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

/// 2^consistency / conciseness: 1.0 for identical explanations of any size,
/// larger under disagreement.
inline double normalized_consistency(double entropy_bits, double conciseness_value) {
    if (conciseness_value <= 0.0)
        throw DegenerateError("normalized_consistency: conciseness must be positive");
    return std::exp2(entropy_bits) / conciseness_value;
}

// ---------------------------------------------------------------------------
// Explanation contexts
// ---------------------------------------------------------------------------

/// One anomaly instance handed to ED evaluation: the anomalous rows plus
/// the normal rows immediately preceding them, in the same feature space.
struct AnomalyInstance {
    AnomalyType type = AnomalyType::BurstyInput;
    Matrix anomalous;
    Matrix preceding_normal;
    std::vector<std::string> features;
};

/// Builds an explanation for (anomalous rows, reference rows); the seed
/// feeds any internal randomness.
using Explainer =
    std::function<Explanation(const Matrix& anomalous, const Matrix& reference,
                              const std::vector<std::string>& features, std::uint64_t seed)>;

namespace detail {

/// Uniform sample of `count` distinct row indices, in increasing order.
inline std::vector<std::size_t> sample_rows(std::size_t n, std::size_t count, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = i;
    for (std::size_t i = n; i > 1; --i)
        std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline Matrix take_rows(const Matrix& mat, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), mat.cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < mat.cols; ++c)
            out.at(i, c) = mat.at(rows[i], c);
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// ED1: stability and local accuracy
// ---------------------------------------------------------------------------

struct ConsistencyResult {
    double entropy = 0.0;
    double normalized = 0.0;
    std::size_t explanation_count = 0;
};

/// Stability (ED1 consistency): explain n_samples independent 80% record
/// subsamples of one anomaly and measure the entropy of the pooled feature
/// multiset. Explainer failures skip the sample; fewer than 2 surviving
/// samples is an error.
inline ConsistencyResult stability(const AnomalyInstance& instance, const Explainer& explainer,
                                   std::size_t n_samples, std::uint64_t seed) {
    if (instance.anomalous.rows < 5)
        throw DegenerateError("stability: anomaly must have at least 5 records");
    Rng rng(seed);
    std::vector<Explanation> explanations;
    for (std::size_t i = 0; i < n_samples; ++i) {
        auto count = static_cast<std::size_t>(
            std::ceil(0.8 * static_cast<double>(instance.anomalous.rows)));
        auto rows = detail::sample_rows(instance.anomalous.rows, count, rng);
        try {
            explanations.push_back(explainer(detail::take_rows(instance.anomalous, rows),
                                             instance.preceding_normal, instance.features,
                                             rng.next_u64()));
        } catch (const Error&) {
            // sample skipped
        }
    }
    if (explanations.size() < 2)
        throw DegenerateError("stability: fewer than 2 explanations survived");
    ConsistencyResult out;
    out.entropy = consistency_entropy(explanations);
    out.normalized = normalized_consistency(out.entropy, conciseness(explanations));
    out.explanation_count = explanations.size();
    return out;
}

/// Concordance (ED2 consistency): one explanation per anomaly of one type,
/// full slices, entropy over the pooled feature multiset.
inline ConsistencyResult concordance(const std::vector<AnomalyInstance>& anomalies,
                                     const Explainer& explainer, std::uint64_t seed) {
    if (anomalies.size() < 2)
        throw DegenerateError("concordance: need at least 2 anomalies");
    for (std::size_t i = 1; i < anomalies.size(); ++i)
        if (anomalies[i].type != anomalies[0].type)
            throw IntegrityError("concordance: mixed anomaly types");
    Rng rng(seed);
    std::vector<Explanation> explanations;
    for (const auto& a : anomalies) {
        try {
            explanations.push_back(
                explainer(a.anomalous, a.preceding_normal, a.features, rng.next_u64()));
        } catch (const Error&) {
        }
    }
    if (explanations.size() < 2)
        throw DegenerateError("concordance: fewer than 2 explanations survived");
    ConsistencyResult out;
    out.entropy = consistency_entropy(explanations);
    out.normalized = normalized_consistency(out.entropy, conciseness(explanations));
    out.explanation_count = explanations.size();
    return out;
}

// ---------------------------------------------------------------------------
// Accuracy (point-based)
// ---------------------------------------------------------------------------

struct PointAccuracy {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

namespace detail {

inline PointAccuracy point_accuracy(std::size_t tp, std::size_t fp, std::size_t fn) {
    PointAccuracy out;
    out.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
    out.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
    out.f_score = out.precision + out.recall > 0.0
                      ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                      : 0.0;
    return out;
}

} // namespace detail

/// ED1 accuracy: build the explanation on a random 80% subsample, predict
/// on the held-out 20% (label 1) plus the equal-length immediately
/// preceding normal rows (label 0). Weights-kind explanations yield no
/// number (nullopt).
inline std::optional<PointAccuracy> accuracy_ed1(const AnomalyInstance& instance,
                                                 const Explainer& explainer,
                                                 std::uint64_t seed) {
    if (instance.anomalous.rows < 5)
        throw DegenerateError("accuracy_ed1: anomaly must have at least 5 records");
    if (instance.preceding_normal.rows == 0)
        throw DegenerateError("accuracy_ed1: empty normal context");
    Rng rng(seed);
    auto count =
        static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(instance.anomalous.rows)));
    auto train_rows = detail::sample_rows(instance.anomalous.rows, count, rng);
    Explanation explanation = explainer(detail::take_rows(instance.anomalous, train_rows),
                                        instance.preceding_normal, instance.features,
                                        rng.next_u64());
    if (explanation.kind != ExplanationKind::Predicate)
        return std::nullopt;

    std::vector<bool> in_train(instance.anomalous.rows, false);
    for (std::size_t r : train_rows)
        in_train[r] = true;

    std::size_t tp = 0, fp = 0, fn = 0;
    std::size_t held_out = 0;
    for (std::size_t r = 0; r < instance.anomalous.rows; ++r) {
        if (in_train[r])
            continue;
        ++held_out;
        int p = predict(explanation, instance.anomalous.row(r), instance.features);
        tp += p == 1 ? 1 : 0;
        fn += p == 0 ? 1 : 0;
    }
    std::size_t normal_len = std::min(held_out, instance.preceding_normal.rows);
    for (std::size_t i = 0; i < normal_len; ++i) {
        std::size_t r = instance.preceding_normal.rows - normal_len + i;
        int p = predict(explanation, instance.preceding_normal.row(r), instance.features);
        fp += p == 1 ? 1 : 0;
    }
    return detail::point_accuracy(tp, fp, fn);
}

/// ED2 accuracy: split the same-type anomaly set 50/50, build one
/// explanation per training anomaly, and predict on the test anomalies with
/// the disjunction of the member explanations.
inline std::optional<PointAccuracy> accuracy_ed2(const std::vector<AnomalyInstance>& anomalies,
                                                 const Explainer& explainer,
                                                 std::uint64_t seed) {
    if (anomalies.size() < 2)
        throw DegenerateError("accuracy_ed2: need at least 2 anomalies");
    for (std::size_t i = 1; i < anomalies.size(); ++i)
        if (anomalies[i].type != anomalies[0].type)
            throw IntegrityError("accuracy_ed2: mixed anomaly types");

    Rng rng(seed);
    std::vector<std::size_t> order(anomalies.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
    std::size_t train_count = (anomalies.size() + 1) / 2;

    std::vector<Explanation> members;
    for (std::size_t i = 0; i < train_count; ++i) {
        const auto& a = anomalies[order[i]];
        Explanation e = explainer(a.anomalous, a.preceding_normal, a.features, rng.next_u64());
        if (e.kind != ExplanationKind::Predicate)
            return std::nullopt;
        members.push_back(std::move(e));
    }

    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = train_count; i < order.size(); ++i) {
        const auto& a = anomalies[order[i]];
        auto global_predict = [&](std::span<const double> row) {
            for (const auto& e : members)
                if (predict(e, row, a.features) == 1)
                    return 1;
            return 0;
        };
        for (std::size_t r = 0; r < a.anomalous.rows; ++r) {
            int p = global_predict(a.anomalous.row(r));
            tp += p == 1 ? 1 : 0;
            fn += p == 0 ? 1 : 0;
        }
        std::size_t normal_len = std::min(a.anomalous.rows, a.preceding_normal.rows);
        for (std::size_t j = 0; j < normal_len; ++j) {
            std::size_t r = a.preceding_normal.rows - normal_len + j;
            fp += global_predict(a.preceding_normal.row(r)) == 1 ? 1 : 0;
        }
    }
    return detail::point_accuracy(tp, fp, fn);
}

// ---------------------------------------------------------------------------
// Full ED report
// ---------------------------------------------------------------------------

struct EdTypeRow {
    AnomalyType type = AnomalyType::BurstyInput;
    std::size_t instance_count = 0;
    double conciseness_ed1 = 0.0;
    std::optional<double> conciseness_ed2;
    std::optional<double> consistency_ed1; // mean stability entropy
    std::optional<double> normalized_ed1;
    std::optional<double> consistency_ed2; // concordance entropy
    std::optional<double> normalized_ed2;
    std::optional<PointAccuracy> accuracy_ed1; // mean over instances
    std::optional<PointAccuracy> accuracy_ed2;
    double mean_build_seconds = 0.0;
};

struct EdReport {
    std::vector<EdTypeRow> rows;   // one per type present
    EdTypeRow average;             // unweighted mean over rows
    std::size_t explanation_count = 0;
};

struct EdEvalConfig {
    std::size_t stability_samples = 5;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::optional<double> mean_opt(const std::vector<double>& values) {
    if (values.empty())
        return std::nullopt;
    double s = 0.0;
    for (double v : values)
        s += v;
    return s / static_cast<double>(values.size());
}

} // namespace detail

/// Per-type ED metrics plus their average row (the shape of a per-type
/// results table). Types with fewer than 2 instances skip concordance and
/// ED2 accuracy. Wall-clock per explanation is measured around the
/// explainer calls used for the ED1 row.
inline EdReport evaluate_ed(const std::vector<AnomalyInstance>& anomalies,
                            const Explainer& explainer, const EdEvalConfig& config) {
    std::map<AnomalyType, std::vector<const AnomalyInstance*>> by_type;
    for (const auto& a : anomalies)
        by_type[a.type].push_back(&a);

    EdReport report;
    for (auto& [type, instances] : by_type) {
        EdTypeRow row;
        row.type = type;
        row.instance_count = instances.size();

        std::vector<Explanation> full_explanations;
        double time_sum = 0.0;
        std::size_t time_count = 0;
        Rng rng(derive_seed(config.seed, "ed_eval", to_string(type)));
        for (const auto* a : instances) {
            auto t0 = std::chrono::steady_clock::now();
            try {
                Explanation e =
                    explainer(a->anomalous, a->preceding_normal, a->features, rng.next_u64());
                auto t1 = std::chrono::steady_clock::now();
                e.build_time_seconds = std::chrono::duration<double>(t1 - t0).count();
                time_sum += e.build_time_seconds;
                ++time_count;
                full_explanations.push_back(std::move(e));
            } catch (const Error&) {
            }
        }
        if (full_explanations.empty())
            continue;
        report.explanation_count += full_explanations.size();
        row.conciseness_ed1 = conciseness(full_explanations);
        row.mean_build_seconds = time_count > 0 ? time_sum / static_cast<double>(time_count) : 0.0;

        std::vector<double> stab_h, stab_norm;
        for (std::size_t i = 0; i < instances.size(); ++i) {
            if (instances[i]->anomalous.rows < 5)
                continue;
            try {
                auto s = stability(*instances[i], explainer, config.stability_samples,
                                   derive_seed(config.seed, "stability",
                                               std::string(to_string(type)) + std::to_string(i)));
                stab_h.push_back(s.entropy);
                stab_norm.push_back(s.normalized);
            } catch (const Error&) {
            }
        }
        row.consistency_ed1 = detail::mean_opt(stab_h);
        row.normalized_ed1 = detail::mean_opt(stab_norm);

        std::vector<double> prec1, rec1, f1;
        for (std::size_t i = 0; i < instances.size(); ++i) {
            if (instances[i]->anomalous.rows < 5 || instances[i]->preceding_normal.rows == 0)
                continue;
            try {
                auto acc = accuracy_ed1(*instances[i], explainer,
                                        derive_seed(config.seed, "accuracy_ed1",
                                                    std::string(to_string(type)) +
                                                        std::to_string(i)));
                if (acc) {
                    prec1.push_back(acc->precision);
                    rec1.push_back(acc->recall);
                    f1.push_back(acc->f_score);
                }
            } catch (const Error&) {
            }
        }
        if (!prec1.empty())
            row.accuracy_ed1 = PointAccuracy{*detail::mean_opt(prec1), *detail::mean_opt(rec1),
                                             *detail::mean_opt(f1)};

        if (instances.size() >= 2) {
            std::vector<AnomalyInstance> copies;
            copies.reserve(instances.size());
            for (const auto* a : instances)
                copies.push_back(*a);
            try {
                auto c = concordance(copies, explainer,
                                     derive_seed(config.seed, "concordance", to_string(type)));
                row.consistency_ed2 = c.entropy;
                row.normalized_ed2 = c.normalized;
            } catch (const Error&) {
            }
            try {
                Rng split_rng(derive_seed(config.seed, "ed2_members", to_string(type)));
                std::vector<Explanation> members;
                std::size_t train_count = (copies.size() + 1) / 2;
                for (std::size_t i = 0; i < train_count; ++i)
                    members.push_back(explainer(copies[i].anomalous, copies[i].preceding_normal,
                                                copies[i].features, split_rng.next_u64()));
                row.conciseness_ed2 = conciseness(members);
            } catch (const Error&) {
            }
            try {
                row.accuracy_ed2 = accuracy_ed2(copies, explainer,
                                                derive_seed(config.seed, "accuracy_ed2",
                                                            to_string(type)));
            } catch (const Error&) {
            }
        }
        report.rows.push_back(std::move(row));
    }

    // Average row: unweighted mean over present values.
    EdTypeRow& avg = report.average;
    avg.instance_count = 0;
    std::vector<double> c1, c2, h1, n1, h2, n2, p1v, r1v, f1v, p2v, r2v, f2v, tv;
    for (const auto& row : report.rows) {
        avg.instance_count += row.instance_count;
        c1.push_back(row.conciseness_ed1);
        tv.push_back(row.mean_build_seconds);
        if (row.conciseness_ed2) c2.push_back(*row.conciseness_ed2);
        if (row.consistency_ed1) h1.push_back(*row.consistency_ed1);
        if (row.normalized_ed1) n1.push_back(*row.normalized_ed1);
        if (row.consistency_ed2) h2.push_back(*row.consistency_ed2);
        if (row.normalized_ed2) n2.push_back(*row.normalized_ed2);
        if (row.accuracy_ed1) {
            p1v.push_back(row.accuracy_ed1->precision);
            r1v.push_back(row.accuracy_ed1->recall);
            f1v.push_back(row.accuracy_ed1->f_score);
        }
        if (row.accuracy_ed2) {
            p2v.push_back(row.accuracy_ed2->precision);
            r2v.push_back(row.accuracy_ed2->recall);
            f2v.push_back(row.accuracy_ed2->f_score);
        }
    }
    if (!c1.empty())
        avg.conciseness_ed1 = *detail::mean_opt(c1);
    avg.conciseness_ed2 = detail::mean_opt(c2);
    avg.consistency_ed1 = detail::mean_opt(h1);
    avg.normalized_ed1 = detail::mean_opt(n1);
    avg.consistency_ed2 = detail::mean_opt(h2);
    avg.normalized_ed2 = detail::mean_opt(n2);
    if (!p1v.empty())
        avg.accuracy_ed1 =
            PointAccuracy{*detail::mean_opt(p1v), *detail::mean_opt(r1v), *detail::mean_opt(f1v)};
    if (!p2v.empty())
        avg.accuracy_ed2 =
            PointAccuracy{*detail::mean_opt(p2v), *detail::mean_opt(r2v), *detail::mean_opt(f2v)};
    if (!tv.empty())
        avg.mean_build_seconds = *detail::mean_opt(tv);
    return report;
}

} // namespace adex
