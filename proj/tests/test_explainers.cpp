#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "adex/exstream.hpp"
#include "adex/macrobase.hpp"
#include "adex/rng.hpp"
#include "adex/surrogate.hpp"

using namespace adex;

namespace {

Matrix column_matrix(const std::vector<std::vector<double>>& columns) {
    Matrix m(columns.at(0).size(), columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (std::size_t r = 0; r < columns[c].size(); ++r)
            m.at(r, c) = columns[c][r];
    return m;
}

std::vector<std::string> names(std::size_t m) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < m; ++i)
        out.push_back("f" + std::to_string(i));
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// exstream_reward
// ---------------------------------------------------------------------------

TEST(ExstreamReward, PerfectSeparationIsOne) {
    std::vector<double> ref = {1.0, 2.0};
    std::vector<double> anom = {3.0, 4.0};
    EXPECT_NEAR(exstream_reward(anom, ref), 1.0, 1e-12);
    // Also with unequal counts and reversed order.
    std::vector<double> ref2 = {5.0, 6.0, 7.0};
    std::vector<double> anom2 = {1.0, 2.0};
    EXPECT_NEAR(exstream_reward(anom2, ref2), 1.0, 1e-12);
}

TEST(ExstreamReward, IdenticalDistributionsNearMinimum) {
    std::vector<double> values = {1, 2, 3, 4, 5};
    double reward = exstream_reward(values, values);
    // Five mixed runs: H_seg = log2(5) + 1, H_class = 1.
    EXPECT_NEAR(reward, 1.0 / (1.0 + std::log2(5.0)), 1e-12);
    EXPECT_NEAR(reward, 0.30103, 1e-5);
    EXPECT_LT(reward, 0.5);
}

TEST(ExstreamReward, ScaleAndShiftInvariant) {
    Rng rng(100);
    for (int round = 0; round < 100; ++round) {
        std::vector<double> anom, ref;
        for (int i = 0; i < 12; ++i)
            anom.push_back(rng.normal(1.0, 2.0));
        for (int i = 0; i < 9; ++i)
            ref.push_back(rng.normal(0.0, 1.0));
        double base = exstream_reward(anom, ref);
        double a = rng.uniform(0.1, 5.0);
        double b = rng.uniform(-10.0, 10.0);
        auto scale = [&](std::vector<double> xs) {
            for (auto& x : xs)
                x = a * x + b;
            return xs;
        };
        EXPECT_NEAR(exstream_reward(scale(anom), scale(ref)), base, 1e-12);
        auto reflect = [&](std::vector<double> xs) {
            for (auto& x : xs)
                x = -x;
            return xs;
        };
        EXPECT_NEAR(exstream_reward(reflect(anom), reflect(ref)), base, 1e-12);
    }
}

TEST(ExstreamReward, OneIffThresholdSeparable) {
    Rng rng(200);
    for (int round = 0; round < 300; ++round) {
        std::vector<double> anom, ref;
        for (int i = 0; i < 8; ++i)
            anom.push_back(static_cast<double>(rng.uniform_index(12)));
        for (int i = 0; i < 8; ++i)
            ref.push_back(static_cast<double>(rng.uniform_index(12)));
        bool all_tied = true;
        for (double v : anom)
            all_tied &= v == anom[0];
        for (double v : ref)
            all_tied &= v == anom[0];
        if (all_tied)
            continue;
        double max_anom = *std::max_element(anom.begin(), anom.end());
        double min_anom = *std::min_element(anom.begin(), anom.end());
        double max_ref = *std::max_element(ref.begin(), ref.end());
        double min_ref = *std::min_element(ref.begin(), ref.end());
        bool separable = max_anom < min_ref || max_ref < min_anom;
        double reward = exstream_reward(anom, ref);
        if (separable)
            EXPECT_NEAR(reward, 1.0, 1e-12);
        else
            EXPECT_LT(reward, 1.0 - 1e-12);
    }
}

TEST(ExstreamReward, EmptyInputRejected) {
    std::vector<double> some = {1.0};
    std::vector<double> none;
    EXPECT_THROW(exstream_reward(none, some), DegenerateError);
    EXPECT_THROW(exstream_reward(some, none), DegenerateError);
}

// ---------------------------------------------------------------------------
// explain_exstream
// ---------------------------------------------------------------------------

TEST(ExplainExstream, PicksThePerfectlySeparatingFeature) {
    Rng rng(7);
    std::vector<double> sep_anom, sep_ref;
    std::vector<std::vector<double>> anom_cols(4), ref_cols(4);
    for (int i = 0; i < 30; ++i) {
        anom_cols[0].push_back(rng.normal(10.0, 0.5));
        ref_cols[0].push_back(rng.normal(0.0, 0.5));
        for (std::size_t c = 1; c < 4; ++c) {
            anom_cols[c].push_back(rng.normal(0.0, 1.0));
            ref_cols[c].push_back(rng.normal(0.0, 1.0));
        }
    }
    ReferencePair pair{column_matrix(anom_cols), column_matrix(ref_cols), names(4)};
    Explanation e = explain_exstream(pair, {});
    ASSERT_EQ(e.feature_set.size(), 1u);
    EXPECT_EQ(e.feature_set[0], "f0");
    EXPECT_EQ(e.kind, ExplanationKind::Predicate);
    // The predicate is the anomalous hull, so it accepts every anomalous row.
    for (std::size_t r = 0; r < pair.anomalous.rows; ++r)
        EXPECT_EQ(predict(e, pair.anomalous.row(r), pair.features), 1);
}

TEST(ExplainExstream, CorrelatedDuplicateRetainedOnce) {
    Rng rng(11);
    std::vector<std::vector<double>> anom_cols(3), ref_cols(3);
    for (int i = 0; i < 25; ++i) {
        double v = rng.normal(8.0, 0.3);
        double w = rng.normal(0.0, 0.3);
        anom_cols[0].push_back(v);
        anom_cols[1].push_back(v); // exact duplicate
        anom_cols[2].push_back(rng.normal(0.0, 1.0));
        ref_cols[0].push_back(w);
        ref_cols[1].push_back(w);
        ref_cols[2].push_back(rng.normal(0.0, 1.0));
    }
    ReferencePair pair{column_matrix(anom_cols), column_matrix(ref_cols), names(3)};
    Explanation e = explain_exstream(pair, {});
    EXPECT_EQ(e.feature_set.size(), 1u);
    EXPECT_EQ(e.feature_set[0], "f0");
}

TEST(ExplainExstream, EqualRewardsKeepSingleTop) {
    // Every feature carries the same values, so every reward ties.
    std::vector<double> anom_col = {5.0, 6.0, 7.0};
    std::vector<double> ref_col = {1.0, 2.0, 3.0};
    std::vector<std::vector<double>> anom_cols(3, anom_col), ref_cols(3, ref_col);
    ReferencePair pair{column_matrix(anom_cols), column_matrix(ref_cols), names(3)};
    Explanation e = explain_exstream(pair, {});
    EXPECT_EQ(e.feature_set.size(), 1u);
}

TEST(ExplainExstream, ConstantTiedFeatureNeverSelected) {
    Rng rng(13);
    std::vector<std::vector<double>> anom_cols(2), ref_cols(2);
    for (int i = 0; i < 20; ++i) {
        anom_cols[0].push_back(0.0); // identical constant in both slices
        ref_cols[0].push_back(0.0);
        anom_cols[1].push_back(rng.normal(4.0, 0.2));
        ref_cols[1].push_back(rng.normal(0.0, 0.2));
    }
    ReferencePair pair{column_matrix(anom_cols), column_matrix(ref_cols), names(2)};
    Explanation e = explain_exstream(pair, {});
    ASSERT_EQ(e.feature_set.size(), 1u);
    EXPECT_EQ(e.feature_set[0], "f1");
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

TEST(Predict, ConjunctionOfIntervals) {
    Explanation e;
    e.kind = ExplanationKind::Predicate;
    e.feature_set = {"f0", "f1"};
    e.predicates = {{"f0", 1.0, 2.0}, {"f1", 10.0, 20.0}};
    std::vector<double> inside = {1.5, 15.0};
    std::vector<double> outside = {1.5, 25.0};
    EXPECT_EQ(predict(e, inside, names(2)), 1);
    EXPECT_EQ(predict(e, outside, names(2)), 0);
}

TEST(Predict, WeightsKindRejected) {
    Explanation e;
    e.kind = ExplanationKind::Weights;
    e.feature_set = {"f0"};
    e.weights = {{"f0", 0.7}};
    std::vector<double> row = {1.0};
    EXPECT_THROW(predict(e, row, names(1)), UnsupportedError);
}

// ---------------------------------------------------------------------------
// risk_ratio
// ---------------------------------------------------------------------------

TEST(RiskRatio, HandValue) {
    EXPECT_NEAR(risk_ratio(8, 1, 2, 9), 44.0 / 9.0, 1e-12);
}

TEST(RiskRatio, NoLiftIsOne) {
    EXPECT_DOUBLE_EQ(risk_ratio(4, 4, 6, 6), 1.0);
    EXPECT_DOUBLE_EQ(risk_ratio(10, 10, 0, 0), 1.0); // matches every row
}

TEST(RiskRatio, MatchingOnlyAnomalousIsInfinite) {
    double rr = risk_ratio(8, 0, 0, 10);
    EXPECT_TRUE(std::isinf(rr));
    EXPECT_GT(rr, 0.0);
}

TEST(RiskRatio, EmptyMatchRejected) {
    EXPECT_THROW(risk_ratio(0, 0, 5, 5), DegenerateError);
}

// ---------------------------------------------------------------------------
// explain_macrobase
// ---------------------------------------------------------------------------

TEST(ExplainMacrobase, SingleShiftedFeature) {
    Rng rng(17);
    std::vector<std::vector<double>> anom_cols(3), ref_cols(3);
    for (int i = 0; i < 40; ++i) {
        anom_cols[0].push_back(rng.uniform(9.0, 10.0)); // shifted into the top bin
        ref_cols[0].push_back(rng.uniform(0.0, 1.0));
        for (std::size_t c = 1; c < 3; ++c) {
            double v = rng.uniform(0.0, 1.0);
            anom_cols[c].push_back(v);
            ref_cols[c].push_back(rng.uniform(0.0, 1.0));
        }
    }
    ReferencePair pair{column_matrix(anom_cols), column_matrix(ref_cols), names(3)};
    Explanation e = explain_macrobase(pair, {});
    ASSERT_GE(e.feature_set.size(), 1u);
    EXPECT_EQ(e.feature_set[0], "f0");
    EXPECT_EQ(e.kind, ExplanationKind::Predicate);
}

TEST(ExplainMacrobase, IdenticalSlicesHaveNoExplanation) {
    std::vector<std::vector<double>> cols(2);
    for (int i = 0; i < 20; ++i) {
        cols[0].push_back(static_cast<double>(i));
        cols[1].push_back(static_cast<double>(i % 5));
    }
    ReferencePair pair{column_matrix(cols), column_matrix(cols), names(2)};
    EXPECT_THROW(explain_macrobase(pair, {}), EmptyExplanationError);
}

TEST(ExplainMacrobase, PairBeatsSingletonsWhenJointlyShifted) {
    // 10 anomalous rows: 8 high/high, one high/low, one low/high.
    // 12 reference rows: 6 high/low, 6 low/high. Hand-computed risk ratios:
    // singletons 4.2, pair 7.
    std::vector<std::vector<double>> anom_cols(2), ref_cols(2);
    for (int i = 0; i < 8; ++i) {
        anom_cols[0].push_back(9.5);
        anom_cols[1].push_back(9.5);
    }
    anom_cols[0].push_back(9.5);
    anom_cols[1].push_back(0.5);
    anom_cols[0].push_back(0.5);
    anom_cols[1].push_back(9.5);
    for (int i = 0; i < 6; ++i) {
        ref_cols[0].push_back(9.5);
        ref_cols[1].push_back(0.5);
    }
    for (int i = 0; i < 6; ++i) {
        ref_cols[0].push_back(0.5);
        ref_cols[1].push_back(9.5);
    }
    ReferencePair pair{column_matrix(anom_cols), column_matrix(ref_cols), names(2)};
    MacrobaseConfig config;
    config.bins = 10;
    config.min_support = 0.5;
    config.min_risk_ratio = 3.0;
    Explanation e = explain_macrobase(pair, config);
    ASSERT_EQ(e.feature_set.size(), 2u);
    EXPECT_NE(std::find(e.feature_set.begin(), e.feature_set.end(), "f0"), e.feature_set.end());
    EXPECT_NE(std::find(e.feature_set.begin(), e.feature_set.end(), "f1"), e.feature_set.end());
}

TEST(ExplainMacrobase, ExplanationSatisfiesItsOwnThresholds) {
    // The winning itemset predicate must match >= min_support of the
    // anomalous rows it was mined from.
    Rng rng(23);
    std::vector<std::vector<double>> anom_cols(4), ref_cols(4);
    for (int i = 0; i < 50; ++i) {
        anom_cols[0].push_back(rng.uniform(8.0, 10.0));
        ref_cols[0].push_back(rng.uniform(0.0, 2.0));
        for (std::size_t c = 1; c < 4; ++c) {
            anom_cols[c].push_back(rng.uniform(0.0, 10.0));
            ref_cols[c].push_back(rng.uniform(0.0, 10.0));
        }
    }
    ReferencePair pair{column_matrix(anom_cols), column_matrix(ref_cols), names(4)};
    MacrobaseConfig config;
    Explanation e = explain_macrobase(pair, config);
    std::size_t matched = 0;
    for (std::size_t r = 0; r < pair.anomalous.rows; ++r)
        matched += predict(e, pair.anomalous.row(r), pair.features) == 1 ? 1 : 0;
    EXPECT_GE(static_cast<double>(matched) / static_cast<double>(pair.anomalous.rows),
              config.min_support);
}

// ---------------------------------------------------------------------------
// explain_surrogate
// ---------------------------------------------------------------------------

TEST(ExplainSurrogate, FindsTheDrivingFeature) {
    const std::size_t m = 6;
    Matrix window(4, m, 5.0);
    std::vector<double> ref_means(m, 0.0);
    WindowScoreFn score_fn = [](const Matrix& w) {
        double s = 0.0;
        for (std::size_t r = 0; r < w.rows; ++r)
            s += w.at(r, 3);
        return s / static_cast<double>(w.rows);
    };
    SurrogateConfig config;
    config.k = 3;
    config.perturbation_count = 400;
    Explanation e = explain_surrogate(score_fn, window, ref_means, names(m), config, 9);
    ASSERT_EQ(e.feature_set.size(), 3u);
    EXPECT_EQ(e.feature_set[0], "f3");
    ASSERT_EQ(e.weights.size(), 3u);
    EXPECT_NEAR(e.weights[0].weight, 5.0, 0.5);
    for (std::size_t i = 1; i < e.weights.size(); ++i)
        EXPECT_GT(std::abs(e.weights[0].weight), 5.0 * std::abs(e.weights[i].weight));
    EXPECT_EQ(e.kind, ExplanationKind::Weights);
}

TEST(ExplainSurrogate, ConstantScoreIsDegenerate) {
    Matrix window(3, 4, 1.0);
    std::vector<double> ref_means(4, 0.0);
    WindowScoreFn score_fn = [](const Matrix&) { return 2.5; };
    Explanation e = explain_surrogate(score_fn, window, ref_means, names(4), {}, 1);
    EXPECT_TRUE(e.degenerate);
    for (const auto& w : e.weights)
        EXPECT_DOUBLE_EQ(w.weight, 0.0);
}

TEST(ExplainSurrogate, ReportsExactlyKFeatures) {
    const std::size_t m = 19;
    Matrix window(5, m, 1.0);
    std::vector<double> ref_means(m, 0.0);
    WindowScoreFn score_fn = [](const Matrix& w) {
        double s = 0.0;
        for (std::size_t c = 0; c < w.cols; ++c)
            s += (static_cast<double>(c) + 1.0) * w.at(0, c);
        return s;
    };
    SurrogateConfig config; // k = 5 default
    Explanation e = explain_surrogate(score_fn, window, ref_means, names(m), config, 4);
    EXPECT_EQ(e.feature_set.size(), 5u);
}

TEST(ExplainSurrogate, DeterministicGivenSeed) {
    Matrix window(4, 8, 2.0);
    std::vector<double> ref_means(8, 0.0);
    WindowScoreFn score_fn = [](const Matrix& w) {
        return w.at(0, 1) * 3.0 + w.at(1, 6);
    };
    SurrogateConfig config;
    config.k = 4;
    config.perturbation_count = 300;
    Explanation a = explain_surrogate(score_fn, window, ref_means, names(8), config, 77);
    Explanation b = explain_surrogate(score_fn, window, ref_means, names(8), config, 77);
    EXPECT_EQ(a.feature_set, b.feature_set);
    for (std::size_t i = 0; i < a.weights.size(); ++i)
        EXPECT_DOUBLE_EQ(a.weights[i].weight, b.weights[i].weight);
}
