// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Tolerances are pinned in code next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adex/ad_metrics.hpp"
#include "adex/auprc.hpp"
#include "adex/datagen.hpp"
#include "adex/ed_metrics.hpp"
#include "adex/exstream.hpp"
#include "adex/macrobase.hpp"
#include "adex/pipeline.hpp"
#include "adex/ranges.hpp"
#include "adex/recipe_io.hpp"
#include "adex/reconstructor.hpp"
#include "adex/rng.hpp"
#include "adex/run_config.hpp"
#include "adex/surrogate.hpp"
#include "adex/threshold.hpp"

using namespace adex;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

fs::path workspace() { return fs::temp_directory_path() / "adex_acceptance"; }

// ---------------------------------------------------------------------------
// Criterion 1: AD-level monotonicity on >= 1000 random instances, exact,
// under 10 seconds.
// ---------------------------------------------------------------------------

template <typename RangeT>
std::vector<RangeT> random_ranges(Rng& rng, std::size_t n, double density) {
    std::vector<RangeT> out;
    std::size_t i = 0;
    while (i < n) {
        if (rng.bernoulli(density)) {
            std::size_t len = 1 + rng.uniform_index(std::max<std::size_t>(n / 6, 1));
            RangeT r;
            r.start = i;
            r.end = std::min(n, i + len);
            out.push_back(r);
            i = r.end + 1;
        } else {
            ++i;
        }
    }
    return out;
}

Outcome criterion_monotonicity() {
    double start = now_seconds();
    Rng rng(1001);
    const int instances = 1000;
    for (int round = 0; round < instances; ++round) {
        std::size_t n = 20 + rng.uniform_index(180);
        std::vector<TraceRanges> traces(1);
        traces[0].real = random_ranges<AnomalyRange>(rng, n, 0.05);
        traces[0].predicted = random_ranges<PredictedRange>(rng, n, 0.05);
        Prf prev;
        bool first = true;
        for (AdLevel level : kAllAdLevels) {
            Prf cur = evaluate_level(traces, level);
            if (!first && (cur.recall > prev.recall || cur.precision > prev.precision ||
                           cur.f_score > prev.f_score))
                return {false, "ordering violated at instance " + std::to_string(round)};
            prev = cur;
            first = false;
        }
    }
    double elapsed = now_seconds() - start;
    std::ostringstream detail;
    detail << instances << " instances in " << elapsed << " s";
    return {elapsed < 10.0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 2: point reduction against a brute-force counter, 1e-12.
// ---------------------------------------------------------------------------

Outcome criterion_point_reduction() {
    Rng rng(1002);
    double worst = 0.0;
    for (int round = 0; round < 500; ++round) {
        std::size_t n = 30 + rng.uniform_index(100);
        std::vector<AnomalyRange> reals;
        std::vector<PredictedRange> preds;
        std::size_t tp = 0, fp = 0, fn = 0;
        std::vector<char> is_real(n, 0), is_pred(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.bernoulli(0.2)) {
                reals.push_back({i, i + 1, AnomalyType::BurstyInput});
                is_real[i] = 1;
            }
            if (rng.bernoulli(0.2)) {
                preds.push_back({i, i + 1});
                is_pred[i] = 1;
            }
        }
        if (reals.empty() || preds.empty())
            continue;
        for (std::size_t i = 0; i < n; ++i) {
            tp += is_real[i] && is_pred[i] ? 1 : 0;
            fp += !is_real[i] && is_pred[i] ? 1 : 0;
            fn += is_real[i] && !is_pred[i] ? 1 : 0;
        }
        double point_recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        double point_precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        worst = std::max(worst,
                         std::abs(evaluate_level(reals, preds, AdLevel::AD2).recall - point_recall));
        for (AdLevel level : {AdLevel::AD1, AdLevel::AD2, AdLevel::AD3})
            worst = std::max(worst, std::abs(evaluate_level(reals, preds, level).precision -
                                             point_precision));
    }
    std::ostringstream detail;
    detail << "max deviation " << worst;
    return {worst <= 1e-12, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 3: AD3 hand values.
// ---------------------------------------------------------------------------

Outcome criterion_ad3_hand_value() {
    AnomalyRange ri{0, 10, AnomalyType::BurstyInput};
    double tail = recall_of_range(ri, {{5, 10}}, AdLevel::AD3);
    double head3 = recall_of_range(ri, {{0, 5}}, AdLevel::AD3);
    double head2 = recall_of_range(ri, {{0, 5}}, AdLevel::AD2);
    bool pass = std::abs(tail - 0.14285714285714285) <= 1e-9 && head3 == head2 &&
                std::abs(head2 - 0.5) <= 1e-12;
    std::ostringstream detail;
    detail << "tail " << tail << ", earliest " << head3 << " == AD2 " << head2;
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 4: entropy constants and normalized consistency.
// ---------------------------------------------------------------------------

Outcome criterion_entropy_constants() {
    auto identical = [](std::size_t count, std::size_t size) {
        Explanation e;
        e.kind = ExplanationKind::Predicate;
        for (std::size_t i = 0; i < size; ++i)
            e.feature_set.push_back("f" + std::to_string(i));
        return std::vector<Explanation>(count, e);
    };
    double h1 = consistency_entropy(identical(5, 1));
    double h2 = consistency_entropy(identical(5, 2));
    double h3 = consistency_entropy(identical(5, 3));
    bool pass = std::abs(h1 - 0.0) <= 0.005 && std::abs(h2 - 1.0) <= 0.005 &&
                std::abs(h3 - 1.58) <= 0.005;
    double worst_norm = 0.0;
    for (std::size_t k = 1; k <= 10; ++k) {
        auto es = identical(4, k);
        double norm = normalized_consistency(consistency_entropy(es), conciseness(es));
        worst_norm = std::max(worst_norm, std::abs(norm - 1.0));
    }
    pass = pass && worst_norm <= 1e-9;
    std::ostringstream detail;
    detail << "H1 " << h1 << ", H2 " << h2 << ", H3 " << h3 << ", worst |norm-1| "
           << worst_norm;
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 5: threshold formulas and grid size.
// ---------------------------------------------------------------------------

Outcome criterion_threshold_formulas() {
    bool pass = kMadScale == 1.4826;
    auto grid = threshold_grid();
    pass = pass && grid.size() == 24;
    std::set<std::string> names;
    for (const auto& rule : grid)
        names.insert(rule.name());
    pass = pass && names.size() == 24;
    std::vector<double> scores = {1, 2, 3, 4, 5};
    double mad = select_threshold(scores, {ThresholdMethod::Mad, 2.0, 1}).value;
    pass = pass && std::abs(mad - 5.9652) <= 1e-9;
    std::ostringstream detail;
    detail << "grid " << grid.size() << " combos, MAD({1..5}, c=2) = " << mad;
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 6: AUPRC vs an exhaustive-threshold brute force, and the perfect
// separator.
// ---------------------------------------------------------------------------

double oracle_auprc_ad(const std::vector<ScoredTrace>& traces, int level) {
    // Every distinct score is a threshold; precision/recall by naive
    // position counting; identical sort-and-step integration contract.
    std::set<double> distinct;
    for (const auto& t : traces)
        for (double s : t.scores)
            distinct.insert(s);
    std::vector<double> thresholds(distinct.begin(), distinct.end());
    thresholds.insert(thresholds.begin(), -std::numeric_limits<double>::infinity());

    struct Point {
        double recall, precision;
    };
    std::vector<Point> points;
    points.push_back({0.0, 1.0});
    for (double thr : thresholds) {
        double recall_sum = 0.0, precision_sum = 0.0;
        std::size_t recall_count = 0, precision_count = 0;
        for (const auto& t : traces) {
            std::vector<char> pred(t.scores.size(), 0), real_mask(t.scores.size(), 0);
            for (std::size_t i = 0; i < t.scores.size(); ++i)
                pred[i] = t.scores[i] > thr ? 1 : 0;
            for (const auto& r : t.real)
                for (std::size_t i = r.start; i < r.end; ++i)
                    real_mask[i] = 1;
            for (const auto& r : t.real) {
                std::size_t overlap = 0;
                for (std::size_t i = r.start; i < r.end; ++i)
                    overlap += pred[i];
                recall_sum += level == 1 ? (overlap > 0 ? 1.0 : 0.0)
                                         : static_cast<double>(overlap) /
                                               static_cast<double>(r.end - r.start);
                ++recall_count;
            }
            std::size_t i = 0;
            while (i < pred.size()) {
                if (!pred[i]) {
                    ++i;
                    continue;
                }
                std::size_t j = i, overlap = 0;
                while (j < pred.size() && pred[j]) {
                    overlap += real_mask[j];
                    ++j;
                }
                precision_sum += static_cast<double>(overlap) / static_cast<double>(j - i);
                ++precision_count;
                i = j;
            }
        }
        points.push_back(
            {recall_count ? recall_sum / static_cast<double>(recall_count) : 1.0,
             precision_count ? precision_sum / static_cast<double>(precision_count) : 1.0});
    }
    std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
        if (a.recall != b.recall)
            return a.recall < b.recall;
        return a.precision > b.precision;
    });
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].recall - points[i - 1].recall) * points[i].precision;
    return area;
}

Outcome criterion_auprc_oracle() {
    Rng rng(1006);
    double worst = 0.0;
    int used = 0;
    for (int round = 0; round < 150; ++round) {
        std::size_t n = 10 + rng.uniform_index(41);
        std::vector<double> scores(n);
        for (auto& s : scores)
            s = rng.bernoulli(0.3) ? rng.uniform(0.0, 1.0)
                                   : static_cast<double>(rng.uniform_index(8)) / 8.0;
        std::vector<AnomalyRange> real;
        std::size_t i = 0;
        while (i < n) {
            if (rng.bernoulli(0.08)) {
                std::size_t len = 1 + rng.uniform_index(6);
                real.push_back({i, std::min(n, i + len), AnomalyType::BurstyInput});
                i += len + 1;
            } else {
                ++i;
            }
        }
        if (real.empty())
            continue;
        ++used;
        std::vector<ScoredTrace> traces = {{"t", 1, scores, real}};
        worst = std::max(worst, std::abs(auprc(traces, AdLevel::AD1) - oracle_auprc_ad(traces, 1)));
        worst = std::max(worst, std::abs(auprc(traces, AdLevel::AD2) - oracle_auprc_ad(traces, 2)));
    }

    std::vector<double> sep(40, 0.1);
    for (std::size_t i = 10; i < 20; ++i)
        sep[i] = 0.9;
    std::vector<ScoredTrace> perfect = {{"p", 1, sep, {{10, 20, AnomalyType::BurstyInput}}}};
    double separator = auprc(perfect, AdLevel::AD1);

    std::ostringstream detail;
    detail << used << " instances, max |diff| " << worst << ", perfect separator " << separator;
    return {worst <= 1e-9 && std::abs(separator - 1.0) <= 1e-12, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 7: end-to-end synthetic detection under 5 minutes.
// ---------------------------------------------------------------------------

fs::path build_e2e_dataset() {
    auto dir = workspace() / "e2e_dataset";
    if (fs::exists(dir / "ground_truth.csv"))
        return dir;
    datagen::DatasetRecipe recipe;
    recipe.config.duration_seconds = 7200; // ~2 h at 1 Hz
    recipe.config.noise_sigma = 0.1;
    recipe.config.seed = 424242;
    for (int i = 0; i < 10; ++i)
        recipe.traces.push_back(
            {"app" + std::to_string(1 + i % 2) + "_n" + std::to_string(i), 1 + i % 2,
             std::nullopt,
             {}});
    recipe.traces.push_back({"app1_t1", 1, std::nullopt,
                             {{AnomalyType::BurstyInput, 1200, 900, 2.0},
                              {AnomalyType::BurstyInput, 4200, 900, 2.0}}});
    recipe.traces.push_back(
        {"app2_t2", 2, std::nullopt, {{AnomalyType::BurstyInputCrash, 2500, 0, 3.0}}});
    recipe.traces.push_back({"app1_t3", 1, std::nullopt,
                             {{AnomalyType::StalledInput, 1200, 900, 0.0},
                              {AnomalyType::StalledInput, 4200, 900, 0.0}}});
    recipe.traces.push_back({"app2_t4", 2, std::nullopt,
                             {{AnomalyType::CpuContention, 1200, 900, 1.0},
                              {AnomalyType::CpuContention, 4200, 900, 1.0}}});
    recipe.traces.push_back(
        {"app1_t5", 1, std::nullopt, {{AnomalyType::DriverFailure, 3000, 0, 0.0}}});
    recipe.traces.push_back(
        {"app2_t6", 2, std::nullopt, {{AnomalyType::ExecutorFailure, 3000, 0, 0.0}}});
    datagen::generate_dataset(recipe, dir);
    return dir;
}

RunConfig e2e_config(const fs::path& dataset, const fs::path& out) {
    RunConfig config;
    config.traces_dir = dataset;
    config.ground_truth = dataset / "ground_truth.csv";
    config.setting = LearningSetting::LS2;
    config.resample_seconds = 15;
    // Everything except the cumulative counter and the constant executor
    // count, which min-max scaling handles poorly across traces.
    config.features.strategy = FeatureStrategy::Subset;
    datagen::GeneratorConfig gen;
    for (const auto& name : datagen::feature_names(gen))
        if (name != "driver_processed_records" && name != "driver_active_executors")
            config.features.subset.push_back(name);
    config.detector.kind = DetectorKind::Reconstruct;
    config.detector.window = 10;
    config.detector.k = 5;
    config.explain.kind = ExplainerKind::Exstream;
    config.output_dir = out;
    config.seed = 9;
    return config;
}

Outcome criterion_end_to_end() {
    double start = now_seconds();
    auto dataset = build_e2e_dataset();
    auto out = workspace() / "e2e_run";
    fs::remove_all(out);
    RunResult result = run_pipeline(e2e_config(dataset, out));
    double elapsed = now_seconds() - start;

    double auprc_ad2 = result.ad_report.at("auprc").at("AD2").at("global").get<double>();
    const auto& median_ad1 = result.ad_report.at("median").at("type_recall").at("AD1");
    double t1 = median_ad1.value("T1", 0.0);
    double t3 = median_ad1.value("T3", 0.0);
    double t4 = median_ad1.value("T4", 0.0);

    bool pass = auprc_ad2 > 0.5 && t1 > 0.6 && t3 > 0.6 && t4 > 0.6 && elapsed < 300.0;
    std::ostringstream detail;
    detail << "AUPRC(AD2) " << auprc_ad2 << ", median AD1 recall T1 " << t1 << " T3 " << t3
           << " T4 " << t4 << ", wall " << elapsed << " s";
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 8: explainers recover the injected feature.
// ---------------------------------------------------------------------------

Outcome criterion_ed_recovery() {
    const std::size_t m = 19;
    int exstream_hits = 0;
    int macrobase_hits = 0;
    const int cases = 100;
    for (int round = 0; round < cases; ++round) {
        Rng rng(5000 + static_cast<std::uint64_t>(round));
        std::size_t target = rng.uniform_index(m);
        std::vector<std::string> features;
        for (std::size_t c = 0; c < m; ++c)
            features.push_back("f" + std::to_string(c));
        std::vector<double> base(m), sigma(m);
        for (std::size_t c = 0; c < m; ++c) {
            base[c] = rng.uniform(10.0, 100.0);
            sigma[c] = rng.uniform(0.5, 2.0);
        }
        Matrix reference(60, m), anomalous(40, m);
        for (std::size_t r = 0; r < 60; ++r)
            for (std::size_t c = 0; c < m; ++c)
                reference.at(r, c) = rng.normal(base[c], sigma[c]);
        for (std::size_t r = 0; r < 40; ++r)
            for (std::size_t c = 0; c < m; ++c)
                anomalous.at(r, c) = c == target
                                         // A stuck-at fault: far outside the
                                         // normal band and tightly clustered.
                                         ? rng.normal(base[c] + 12.0 * sigma[c], sigma[c] / 3.0)
                                         : rng.normal(base[c], sigma[c]);
        ReferencePair pair{anomalous, reference, features};
        try {
            Explanation e = explain_exstream(pair, {});
            if (std::find(e.feature_set.begin(), e.feature_set.end(), features[target]) !=
                e.feature_set.end())
                ++exstream_hits;
        } catch (const Error&) {
        }
        try {
            Explanation e = explain_macrobase(pair, {});
            if (std::find(e.feature_set.begin(), e.feature_set.end(), features[target]) !=
                e.feature_set.end())
                ++macrobase_hits;
        } catch (const Error&) {
        }
    }
    std::ostringstream detail;
    detail << "EXstream " << exstream_hits << "/100, MacroBase " << macrobase_hits << "/100";
    return {exstream_hits >= 95 && macrobase_hits >= 90, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 9: explainer timing order.
// ---------------------------------------------------------------------------

Outcome criterion_ed_timing() {
    const std::size_t m = 19;
    Rng rng(6001);
    std::vector<ReferencePair> pairs;
    for (int i = 0; i < 10; ++i) {
        // Many jointly shifted features: itemset mining then walks a large
        // candidate frontier, as it does on real cluster anomalies.
        Matrix reference(1200, m), anomalous(800, m);
        for (auto& v : reference.data)
            v = rng.normal(10.0, 1.0);
        for (std::size_t r = 0; r < anomalous.rows; ++r)
            for (std::size_t c = 0; c < m; ++c)
                anomalous.at(r, c) = c >= 2 ? rng.normal(25.0, 0.2) // tight cluster
                                                : rng.normal(10.0, 1.0);
        std::vector<std::string> features;
        for (std::size_t c = 0; c < m; ++c)
            features.push_back("f" + std::to_string(c));
        pairs.push_back({std::move(anomalous), std::move(reference), features});
    }

    // Surrogate score function: reconstruction error against a model of the
    // reference regime.
    Matrix training(0, m);
    for (const auto& p : pairs) {
        training.cols = m;
        training.rows += p.reference.rows;
        training.data.insert(training.data.end(), p.reference.data.begin(),
                             p.reference.data.end());
    }
    PcaModel ref_model = fit_pca(training, PcaTarget::fixed(5));
    WindowScoreFn score_fn = [&ref_model](const Matrix& w) {
        double sum = 0.0;
        for (std::size_t r = 0; r < w.rows; ++r)
            sum += ref_model.reconstruction_mse(w.row(r));
        return sum / static_cast<double>(w.rows);
    };

    auto time_explainer = [&](const std::function<void(const ReferencePair&)>& fn) {
        double best = 1e18; // best of 3 damps scheduler noise
        for (int rep = 0; rep < 3; ++rep) {
            double t0 = now_seconds();
            for (const auto& p : pairs)
                fn(p);
            best = std::min(best, (now_seconds() - t0) / static_cast<double>(pairs.size()));
        }
        return best;
    };
    double exstream_mean = time_explainer(
        [](const ReferencePair& p) { (void)explain_exstream(p, {}); });
    double macrobase_mean = time_explainer(
        [](const ReferencePair& p) { (void)explain_macrobase(p, {}); });
    SurrogateConfig surrogate_config;
    double surrogate_mean = time_explainer([&](const ReferencePair& p) {
        std::vector<double> means(m, 0.0);
        for (std::size_t c = 0; c < m; ++c)
            means[c] = mean(p.reference.column(c));
        (void)explain_surrogate(score_fn, p.anomalous, means, p.features, surrogate_config, 3);
    });

    std::ostringstream detail;
    detail << "mean seconds: exstream " << exstream_mean << " < macrobase " << macrobase_mean
           << " < surrogate " << surrogate_mean;
    return {exstream_mean < macrobase_mean && macrobase_mean < surrogate_mean, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 10: byte-identical reports across reruns.
// ---------------------------------------------------------------------------

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Outcome criterion_determinism() {
    auto dataset = build_e2e_dataset();
    auto out_a = workspace() / "det_a";
    auto out_b = workspace() / "det_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    RunConfig config = e2e_config(dataset, out_a);
    config.resample_seconds = 30; // lighter run, same contract
    run_pipeline(config);
    config.output_dir = out_b;
    run_pipeline(config);
    for (const char* name : {"plan.json", "transform.json", "thresholds.json",
                             "detections.json", "ad_report.json", "ed_report.json"}) {
        std::string a = slurp(out_a / name);
        if (a.empty() || a != slurp(out_b / name))
            return {false, std::string("mismatch in ") + name};
    }
    return {true, "all report files byte-identical"};
}

// ---------------------------------------------------------------------------
// Criterion 11: performance reporting and the linear-scan contract.
// ---------------------------------------------------------------------------

Outcome criterion_performance_reporting() {
    auto out = workspace() / "e2e_run"; // produced by criterion 7
    if (!fs::exists(out / "timings.json"))
        return {false, "timings.json missing (criterion 7 run absent)"};
    auto timings = detail::read_json(out / "timings.json");
    for (const char* key : {"P1_fit_seconds", "P2_score_seconds", "P3_mean_explain_seconds",
                            "M_dimensionality", "alpha_cardinality_factor"})
        if (!timings.contains(key))
            return {false, std::string("missing ") + key};

    // Linear-scan contract: doubling the trace length at most ~doubles the
    // scoring time (tolerance x2.5), best of 3.
    datagen::GeneratorConfig gen;
    gen.duration_seconds = 20000;
    gen.node_count = 1; // 10 features
    Trace long_trace = datagen::generate_normal(gen, 3, "long", 1);
    Trace half = long_trace;
    half.timestamps.resize(10000);
    half.values = half.values.slice_rows(0, 10000);

    auto rec = fit_reconstructor({half}, 10, PcaTarget::fixed(4));
    auto best_of = [&](const Trace& t) {
        double best = 1e9;
        for (int i = 0; i < 3; ++i) {
            double t0 = now_seconds();
            auto s = score_reconstruction(rec, t);
            best = std::min(best, now_seconds() - t0);
            if (s.scores.empty())
                return 1e9;
        }
        return best;
    };
    double t_half = best_of(half);
    double t_full = best_of(long_trace);
    double ratio = t_full / t_half;
    std::ostringstream detail;
    detail << "P1/P2/P3 + M + alpha present; P2(2n)/P2(n) = " << ratio;
    return {ratio <= 2.5, detail.str()};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    // Hermetic run: stale artifacts from earlier binaries must not leak in.
    std::error_code ec;
    fs::remove_all(workspace(), ec);
    fs::create_directories(workspace());
    std::vector<Criterion> criteria = {
        {"ad-level-monotonicity", criterion_monotonicity},
        {"point-reduction-oracle", criterion_point_reduction},
        {"ad3-hand-value", criterion_ad3_hand_value},
        {"entropy-constants", criterion_entropy_constants},
        {"threshold-formulas", criterion_threshold_formulas},
        {"auprc-oracle", criterion_auprc_oracle},
        {"end-to-end-detection", criterion_end_to_end},
        {"ed-ground-truth-recovery", criterion_ed_recovery},
        {"ed-directional-timing", criterion_ed_timing},
        {"run-determinism", criterion_determinism},
        {"performance-reporting", criterion_performance_reporting},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %2zu %-26s %s  (%s)\n", i + 1, criteria[i].name,
                    outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
        std::fflush(stdout);
        failures += outcome.pass ? 0 : 1;
    }
    if (failures > 0)
        std::printf("%d criterion(s) failed\n", failures);
    else
        std::printf("all %zu criteria passed\n", criteria.size());
    return failures == 0 ? 0 : 1;
}
